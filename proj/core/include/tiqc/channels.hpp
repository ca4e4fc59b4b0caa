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

// Non-coherent single-ion operations: damping channels, projective
// measurement of one ion inside a register, and reset.
//
// Channels act as rho -> sum_k E_k rho E_k^dagger.

#pragma once

#include <array>
#include <optional>
#include <random>
#include <vector>

#include "tiqc/gates.hpp"

namespace tiqc {

struct KrausChannel {
    std::vector<Mat2> kraus_ops;

    /// max |sum_k E_k^dagger E_k - I|.
    double completeness_error() const;
    /// The channel embedded on qubit `ion` of an n-qubit register.
    ProcessMap embedded(int n, int ion) const;
};

/// E0 = diag(1, sqrt(1-g)), E1 = diag(0, sqrt(g)).
KrausChannel phase_damp_channel(double gamma);

/// Damping into basis state `target`.  target = 0 gives the tabulated pair
/// E0 = diag(1, sqrt(1-g)), E1 = sqrt(g)|0><1|; target = 1 mirrors it.
KrausChannel amp_damp_channel(double gamma, int target = 0);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, int ion);

enum class Strictness {
    /// Measuring with non-hidden spectators throws.
    Strict,
    /// Non-hidden spectators are fully dephased by the detection light.
    Permissive,
};

template <class State>
struct MeasureBranch {
    int outcome;
    double probability;
    State state;
};

/// Both outcomes of measuring `ion`; a branch is empty when its probability
/// is below 1e-15.
std::array<std::optional<MeasureBranch<PureState>>, 2> measure_branches(const PureState& psi, int ion,
                                                                        HiddenMask hidden = 0);
std::array<std::optional<MeasureBranch<DensityMatrix>>, 2> measure_branches(const DensityMatrix& rho, int ion,
                                                                            HiddenMask hidden = 0);

/// One sampled outcome with the renormalized post-measurement state.
MeasureBranch<PureState> measure_sample(const PureState& psi, int ion, std::mt19937_64& rng,
                                        HiddenMask hidden = 0);
MeasureBranch<DensityMatrix> measure_sample(const DensityMatrix& rho, int ion, std::mt19937_64& rng,
                                            HiddenMask hidden = 0);

/// Checks the spectator rule for an in-register measurement of `ion`.
/// Strict: throws if another ion is not hidden.  Returns the mask of
/// spectators that must be decohered (empty in strict mode).
HiddenMask check_spectators(int n, int ion, HiddenMask hidden, Strictness mode);

/// Full phase damping on every qubit in `mask`.
DensityMatrix dephase_qubits(const DensityMatrix& rho, HiddenMask mask);

/// Amplitude damping with gamma = 1 toward `target` (default: S = |1>).
DensityMatrix reset_ion(const DensityMatrix& rho, int ion, int target = 1);
/// Pure-state reset: the ion is projected, then flipped into `target`.
/// The result is a single sampled trajectory of the reset channel.
PureState reset_ion(const PureState& psi, int ion, std::mt19937_64& rng, int target = 1);

}  // namespace tiqc
