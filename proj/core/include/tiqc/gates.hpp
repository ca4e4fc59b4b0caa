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

// Native operation set of the ion-trap register and exact unitaries for
// the coherent subset.
//
//   ZRot{i, t}        exp(-i t sz_i / 2)               addressed Stark shift
//   Collective{p, t}  exp(-i t S_p / 2)                 global carrier pulse
//   MS{p, t}          exp(-i t S_p^2 / 4)               Molmer-Sorensen
//
// with S_p = sum_j (cos p sx_j + sin p sy_j) over non-hidden ions.  Hidden
// ions are spectroscopically decoupled and see identity under every
// collective operation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tiqc/state.hpp"

namespace tiqc {

namespace op {
struct ZRot {
    int ion;
    double theta;
};
struct Collective {
    double phi;
    double theta;
};
struct MS {
    double phi;
    double theta;
};
struct Hide {
    int ion;
};
struct Unhide {
    int ion;
};
struct PhaseDamp {
    int ion;
    double gamma;
};
/// `target` is the basis state population is pumped into.  0 matches the
/// tabulated Kraus pair; 1 is the physical optical-pumping direction.
struct AmpDamp {
    int ion;
    double gamma;
    int target = 0;
};
struct Measure {
    int ion;
    int cbit;
};
/// Fires when classical bit `cbit` is 1, or when it is 0 if `negate` is set.
struct ConditionalZRot {
    int ion;
    double theta;
    int cbit;
    bool negate = false;
};
struct Recool {
    double duration;  // seconds
};
struct Idle {
    double duration;  // seconds
};
/// Exact, instantaneous basis change on the whole register.  Used to splice
/// reference blocks into a sequence; has no text form.
struct Frame {
    std::string label;
    Matrix matrix;
};
}  // namespace op

using NativeOp = std::variant<op::ZRot, op::Collective, op::MS, op::Hide, op::Unhide, op::PhaseDamp,
                              op::AmpDamp, op::Measure, op::ConditionalZRot, op::Recool, op::Idle,
                              op::Frame>;

bool is_coherent(const NativeOp& op);
std::string op_name(const NativeOp& op);

/// Bit q set means qubit q is hidden.
using HiddenMask = std::uint32_t;

inline bool is_hidden(HiddenMask h, int q) { return (h >> q) & 1u; }

struct PulseSequence {
    int n_qubits = 0;
    std::vector<NativeOp> ops;
    /// Trailing free-text annotation per op (may be empty); same size as ops.
    std::vector<std::string> annotations;
    std::string name;
    std::string source;
    std::vector<std::string> notes;

    void push(NativeOp op, std::string annotation = {});
    std::size_t size() const { return ops.size(); }
    /// Largest classical bit index referenced plus one.
    int classical_bits() const;
    /// Checks ion ranges, parameter domains and the hide/measure discipline.
    /// Throws ValidationError naming the offending op.
    void validate() const;
};

class CrosstalkMatrix {
   public:
    /// Validates eps_ii = 1 and 0 <= eps_ij <= 1.
    explicit CrosstalkMatrix(Eigen::MatrixXd eps);

    static CrosstalkMatrix identity(int n);
    /// eps = 1 on the diagonal, `neighbor` on the first off-diagonals.
    static CrosstalkMatrix nearest_neighbor(int n, double neighbor);

    int size() const { return static_cast<int>(eps_.rows()); }
    double operator()(int i, int j) const { return eps_(i, j); }
    const Eigen::MatrixXd& matrix() const { return eps_; }

   private:
    Eigen::MatrixXd eps_;
};

/// Single-qubit matrix of the collective rotation on one ion.
Mat2 rotation_1q(double phi, double theta);
/// exp(-i theta sz / 2).
Mat2 zrot_1q(double theta);

/// Embeds a single-qubit operator on qubit q of an n-qubit register.
Matrix embed_1q(const Mat2& m, int n, int q);

UnitaryMatrix op_unitary(const NativeOp& op, int n, HiddenMask hidden = 0);

/// ZRot with crosstalk: every non-hidden j is rotated by theta * eps(ion, j).
UnitaryMatrix zrot_with_crosstalk(const op::ZRot& z, int n, HiddenMask hidden, const CrosstalkMatrix& eps);

/// In-place state-vector kernel for coherent ops; O(n 2^n) for ZRot,
/// Collective and MS.  Crosstalk, when given, affects ZRot only.
void apply_op_inplace(Vector& amplitudes, int n, const NativeOp& op, HiddenMask hidden,
                      const CrosstalkMatrix* crosstalk = nullptr);
/// Single-qubit gate on qubit q, in place.
void apply_1q_inplace(Vector& amplitudes, int n, int q, const Mat2& m);

/// Applies a coherent op; crosstalk, when given, affects ZRot only.
PureState apply_op(const PureState& state, const NativeOp& op, HiddenMask hidden,
                   const CrosstalkMatrix* crosstalk = nullptr);
DensityMatrix apply_op(const DensityMatrix& rho, const NativeOp& op, HiddenMask hidden,
                       const CrosstalkMatrix* crosstalk = nullptr);

/// Replaces MS_p(t), t < 0, by MS_p(pi - |t|), followed by R_p(pi) when the
/// number of non-hidden ions at that point is even.
PulseSequence rewrite_negative_ms(const PulseSequence& seq);

/// -Omega^2 / (2 Delta) in rad/s.
double ac_stark_shift(double rabi_freq, double detuning);

/// Per-op fidelity product: 0.995 per ZRot, Collective or conditional
/// rotation and {0.98, 0.97, 0.95, 0.93, 0.90} per MS on an n = 2..6 ion
/// register.  Everything else counts as 1.
double crude_fidelity_estimate(const PulseSequence& seq, int n);

/// (|0...0> - i e^{i n phi} |1...1>) / sqrt(2).
PureState ghz_reference(int n, double phi);

}  // namespace tiqc
