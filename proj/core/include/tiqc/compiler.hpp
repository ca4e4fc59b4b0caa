// Copyright 2026 The tiqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sequence-level unitaries, MS concatenation and equivalence-aware
// verification of a sequence against a target unitary.

#pragma once

#include <string>
#include <vector>

#include "tiqc/gates.hpp"

namespace tiqc {

/// Product of op unitaries in temporal order (first op rightmost).
/// Hide/Unhide update the decoupled set; any other non-coherent op is
/// rejected.
UnitaryMatrix sequence_unitary(const PulseSequence& seq, const CrosstalkMatrix* crosstalk = nullptr);

/// k with k * base_angle = theta, for theta a positive multiple of
/// base_angle within 1e-9.
int ms_concatenation(double theta, double base_angle);

/// Freedoms allowed when comparing a sequence with a target.  Global phase
/// is always modded out.
struct Equivalences {
    /// Same qubit relabeling on input and output.
    bool relabel = false;
    /// Independent qubit permutations on input and output.  Implies relabel.
    bool io_permutations = false;
    /// Bit flips applied on both sides (the |0>/|1> naming of some qubits).
    bool bit_flips = false;
    /// Diagonal phase frames on input and output.
    bool diagonal_phases = false;

    static Equivalences phase_only() { return {}; }
};

/// The maximizing equivalence element.  With P_in, P_out the permutation
/// matrices, F the flips and D_in, D_out the phase frames,
///     frame_out * U * frame_in ~ target,
///     frame_in  = P_in^T F D_in,   frame_out = D_out F P_out.
struct VerifyReport {
    /// |Tr(target^dag frame_out U frame_in)| / d.
    double fidelity = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<int> input_perm;
    std::vector<int> output_perm;
    unsigned flip_mask = 0;
    RealVector input_phases;
    RealVector output_phases;
    Matrix frame_in;
    Matrix frame_out;

    std::string to_text() const;
};

/// Passes when 1 - fidelity <= tolerance.
VerifyReport verify_unitary(const Matrix& u, const Matrix& target, double tolerance, const Equivalences& eq = {});
VerifyReport verify_sequence(const PulseSequence& seq, const Matrix& target, double tolerance,
                             const Equivalences& eq = {});

/// Qubit permutation as a basis permutation: qubit q moves to position
/// perm[q].
Matrix qubit_permutation_matrix(const std::vector<int>& perm);
/// X on every qubit whose bit is set in `mask` (bit q = qubit q).
Matrix bit_flip_matrix(int n, unsigned mask);

}  // namespace tiqc
