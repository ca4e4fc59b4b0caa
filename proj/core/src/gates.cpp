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

#include "tiqc/gates.hpp"

#include <array>
#include <cmath>

namespace tiqc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string at(std::size_t i, const NativeOp& op) {
    return "op " + std::to_string(i + 1) + " (" + op_name(op) + ")";
}

void check_ion(int ion, int n, const std::string& where) {
    require(ion >= 0 && ion < n, where + ": ion index out of range");
}

int active_count(int n, HiddenMask hidden) {
    int k = 0;
    for (int q = 0; q < n; ++q) k += is_hidden(hidden, q) ? 0 : 1;
    return k;
}

// Tensor product of per-qubit 2x2 factors, identity on hidden qubits.
Matrix product_operator(int n, HiddenMask hidden, const Mat2& m) {
    Matrix out = Matrix::Identity(1, 1);
    const Matrix id = Matrix::Identity(2, 2);
    for (int q = 0; q < n; ++q) out = kron(out, is_hidden(hidden, q) ? id : Matrix(m));
    return out;
}

Matrix ms_matrix(int n, HiddenMask hidden, double phi, double theta) {
    // S_phi is diagonal in the product basis of sigma_phi eigenvectors, with
    // eigenvalue m = (#0 - #1) over the active qubits.
    const Complex e = std::exp(kI * phi);
    Mat2 v;
    v << 1.0, 1.0, e, -e;
    v /= std::sqrt(2.0);
    const Matrix vv = product_operator(n, hidden, v);
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Vector diag(d);
    for (Eigen::Index x = 0; x < d; ++x) {
        int m = 0;
        for (int q = 0; q < n; ++q) {
            if (is_hidden(hidden, q)) continue;
            m += bit_of(static_cast<std::size_t>(x), n, q) ? -1 : 1;
        }
        diag(x) = std::exp(-kI * theta * static_cast<double>(m * m) / 4.0);
    }
    return vv * diag.asDiagonal() * vv.adjoint();
}

}  // namespace

bool is_coherent(const NativeOp& op) {
    return std::holds_alternative<op::ZRot>(op) || std::holds_alternative<op::Collective>(op) ||
           std::holds_alternative<op::MS>(op) || std::holds_alternative<op::Frame>(op);
}

std::string op_name(const NativeOp& op) {
    return std::visit(overloaded{
                          [](const op::ZRot&) { return std::string("Sz"); },
                          [](const op::Collective&) { return std::string("R"); },
                          [](const op::MS&) { return std::string("MS"); },
                          [](const op::Hide&) { return std::string("HIDE"); },
                          [](const op::Unhide&) { return std::string("UNHIDE"); },
                          [](const op::PhaseDamp&) { return std::string("PD"); },
                          [](const op::AmpDamp&) { return std::string("AD"); },
                          [](const op::Measure&) { return std::string("MEAS"); },
                          [](const op::ConditionalZRot&) { return std::string("CZROT"); },
                          [](const op::Recool&) { return std::string("RECOOL"); },
                          [](const op::Idle&) { return std::string("IDLE"); },
                          [](const op::Frame& f) { return "FRAME[" + f.label + "]"; },
                      },
                      op);
}

// ------------------------------------------------------------ PulseSequence

void PulseSequence::push(NativeOp op, std::string annotation) {
    ops.push_back(std::move(op));
    annotations.push_back(std::move(annotation));
}

int PulseSequence::classical_bits() const {
    int bits = 0;
    for (const NativeOp& o : ops) {
        if (auto* m = std::get_if<op::Measure>(&o)) bits = std::max(bits, m->cbit + 1);
        if (auto* c = std::get_if<op::ConditionalZRot>(&o)) bits = std::max(bits, c->cbit + 1);
    }
    return bits;
}

void PulseSequence::validate() const {
    require(n_qubits >= 1 && n_qubits <= kMaxQubits, "sequence qubit count out of range");
    require(annotations.size() == ops.size(), "annotation list does not match op list");
    const std::size_t d = dim_for(n_qubits);
    HiddenMask hidden = 0;
    std::vector<bool> written(static_cast<std::size_t>(classical_bits()), false);
    auto finite = [](double v) { return std::isfinite(v); };
    auto gamma_ok = [](double g) { return g >= 0.0 && g <= 1.0; };
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const NativeOp& o = ops[i];
        const std::string where = at(i, o);
        std::visit(overloaded{
                       [&](const op::ZRot& z) {
                           check_ion(z.ion, n_qubits, where);
                           require(finite(z.theta), where + ": non-finite angle");
                           require(!is_hidden(hidden, z.ion), where + ": addressed ion is hidden");
                       },
                       [&](const op::Collective& r) {
                           require(finite(r.phi) && finite(r.theta), where + ": non-finite angle");
                       },
                       [&](const op::MS& m) {
                           require(finite(m.phi) && finite(m.theta), where + ": non-finite angle");
                       },
                       [&](const op::Hide& h) {
                           check_ion(h.ion, n_qubits, where);
                           require(!is_hidden(hidden, h.ion), where + ": ion already hidden");
                           hidden |= HiddenMask{1} << h.ion;
                       },
                       [&](const op::Unhide& h) {
                           check_ion(h.ion, n_qubits, where);
                           require(is_hidden(hidden, h.ion), where + ": ion is not hidden");
                           hidden &= ~(HiddenMask{1} << h.ion);
                       },
                       [&](const op::PhaseDamp& p) {
                           check_ion(p.ion, n_qubits, where);
                           require(gamma_ok(p.gamma), where + ": gamma outside [0, 1]");
                       },
                       [&](const op::AmpDamp& a) {
                           check_ion(a.ion, n_qubits, where);
                           require(gamma_ok(a.gamma), where + ": gamma outside [0, 1]");
                           require(a.target == 0 || a.target == 1, where + ": damping target must be 0 or 1");
                       },
                       [&](const op::Measure& m) {
                           check_ion(m.ion, n_qubits, where);
                           require(m.cbit >= 0, where + ": negative classical bit");
                           require(!is_hidden(hidden, m.ion), where + ": measured ion is hidden");
                           written[static_cast<std::size_t>(m.cbit)] = true;
                       },
                       [&](const op::ConditionalZRot& c) {
                           check_ion(c.ion, n_qubits, where);
                           require(finite(c.theta), where + ": non-finite angle");
                           require(c.cbit >= 0, where + ": negative classical bit");
                           require(!is_hidden(hidden, c.ion), where + ": addressed ion is hidden");
                           require(written[static_cast<std::size_t>(c.cbit)],
                                   where + ": classical bit read before it is measured");
                       },
                       [&](const op::Recool& r) {
                           require(finite(r.duration) && r.duration >= 0.0, where + ": negative duration");
                       },
                       [&](const op::Idle& r) {
                           require(finite(r.duration) && r.duration >= 0.0, where + ": negative duration");
                       },
                       [&](const op::Frame& f) {
                           require(static_cast<std::size_t>(f.matrix.rows()) == d &&
                                       static_cast<std::size_t>(f.matrix.cols()) == d,
                                   where + ": frame dimension mismatch");
                       },
                   },
                   o);
    }
}

// ---------------------------------------------------------- CrosstalkMatrix

CrosstalkMatrix::CrosstalkMatrix(Eigen::MatrixXd eps) : eps_(std::move(eps)) {
    require(eps_.rows() == eps_.cols() && eps_.rows() >= 1, "crosstalk matrix must be square");
    for (Eigen::Index i = 0; i < eps_.rows(); ++i)
        for (Eigen::Index j = 0; j < eps_.cols(); ++j) {
            if (i == j)
                require(eps_(i, j) == 1.0, "crosstalk diagonal must be 1");
            else
                require(eps_(i, j) >= 0.0 && eps_(i, j) <= 1.0, "crosstalk entries must lie in [0, 1]");
        }
}

CrosstalkMatrix CrosstalkMatrix::identity(int n) {
    return CrosstalkMatrix(Eigen::MatrixXd::Identity(n, n));
}

CrosstalkMatrix CrosstalkMatrix::nearest_neighbor(int n, double neighbor) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i + 1 < n; ++i) e(i, i + 1) = e(i + 1, i) = neighbor;
    return CrosstalkMatrix(std::move(e));
}

// ---------------------------------------------------------------- unitaries

Mat2 rotation_1q(double phi, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Mat2 m;
    m << c, -kI * s * std::exp(-kI * phi), -kI * s * std::exp(kI * phi), c;
    return m;
}

Mat2 zrot_1q(double theta) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::exp(-kI * theta / 2.0);
    m(1, 1) = std::exp(kI * theta / 2.0);
    return m;
}

Matrix embed_1q(const Mat2& m, int n, int q) {
    require(q >= 0 && q < n, "qubit index out of range");
    Matrix out = Matrix::Identity(1, 1);
    const Matrix id = Matrix::Identity(2, 2);
    for (int j = 0; j < n; ++j) out = kron(out, j == q ? Matrix(m) : id);
    return out;
}

UnitaryMatrix op_unitary(const NativeOp& op, int n, HiddenMask hidden) {
    dim_for(n);
    return std::visit(
        overloaded{
            [&](const op::ZRot& z) {
                check_ion(z.ion, n, "Sz");
                require(!is_hidden(hidden, z.ion), "Sz on hidden ion " + std::to_string(z.ion + 1));
                return UnitaryMatrix(embed_1q(zrot_1q(z.theta), n, z.ion));
            },
            [&](const op::Collective& r) {
                return UnitaryMatrix(product_operator(n, hidden, rotation_1q(r.phi, r.theta)));
            },
            [&](const op::MS& m) { return UnitaryMatrix(ms_matrix(n, hidden, m.phi, m.theta)); },
            [&](const op::Frame& f) {
                require(f.matrix.rows() == static_cast<Eigen::Index>(dim_for(n)), "frame dimension mismatch");
                return UnitaryMatrix(f.matrix);
            },
            [&](const auto& other) -> UnitaryMatrix {
                throw ValidationError(op_name(NativeOp(other)) + " is not a coherent operation");
            },
        },
        op);
}

UnitaryMatrix zrot_with_crosstalk(const op::ZRot& z, int n, HiddenMask hidden, const CrosstalkMatrix& eps) {
    check_ion(z.ion, n, "Sz");
    require(eps.size() == n, "crosstalk matrix size does not match register");
    require(!is_hidden(hidden, z.ion), "Sz on hidden ion " + std::to_string(z.ion + 1));
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Vector diag(d);
    for (Eigen::Index x = 0; x < d; ++x) {
        double phase = 0.0;
        for (int j = 0; j < n; ++j) {
            if (is_hidden(hidden, j)) continue;
            const double t = z.theta * eps(z.ion, j);
            phase += bit_of(static_cast<std::size_t>(x), n, j) ? t / 2.0 : -t / 2.0;
        }
        diag(x) = std::exp(kI * phase);
    }
    return UnitaryMatrix(Matrix(diag.asDiagonal()));
}

void apply_1q_inplace(Vector& amplitudes, int n, int q, const Mat2& m) {
    const std::size_t mask = qubit_mask(n, q);
    const auto d = static_cast<std::size_t>(amplitudes.size());
    for (std::size_t x = 0; x < d; ++x) {
        if (x & mask) continue;
        const auto i0 = static_cast<Eigen::Index>(x);
        const auto i1 = static_cast<Eigen::Index>(x | mask);
        const Complex a = amplitudes(i0), b = amplitudes(i1);
        amplitudes(i0) = m(0, 0) * a + m(0, 1) * b;
        amplitudes(i1) = m(1, 0) * a + m(1, 1) * b;
    }
}

void apply_op_inplace(Vector& amplitudes, int n, const NativeOp& op, HiddenMask hidden,
                      const CrosstalkMatrix* crosstalk) {
    require(static_cast<std::size_t>(amplitudes.size()) == dim_for(n), "state/op dimension mismatch");
    const auto d = amplitudes.size();
    std::visit(overloaded{
                   [&](const op::ZRot& z) {
                       check_ion(z.ion, n, "Sz");
                       require(!is_hidden(hidden, z.ion), "Sz on hidden ion " + std::to_string(z.ion + 1));
                       if (!crosstalk) {
                           apply_1q_inplace(amplitudes, n, z.ion, zrot_1q(z.theta));
                           return;
                       }
                       require(crosstalk->size() == n, "crosstalk matrix size does not match register");
                       for (int j = 0; j < n; ++j) {
                           if (is_hidden(hidden, j)) continue;
                           const double t = z.theta * (*crosstalk)(z.ion, j);
                           if (t != 0.0) apply_1q_inplace(amplitudes, n, j, zrot_1q(t));
                       }
                   },
                   [&](const op::Collective& r) {
                       const Mat2 m = rotation_1q(r.phi, r.theta);
                       for (int q = 0; q < n; ++q)
                           if (!is_hidden(hidden, q)) apply_1q_inplace(amplitudes, n, q, m);
                   },
                   [&](const op::MS& m) {
                       const Complex e = std::exp(kI * m.phi);
                       Mat2 v;
                       v << 1.0, 1.0, e, -e;
                       v /= std::sqrt(2.0);
                       const Mat2 vd = v.adjoint();
                       for (int q = 0; q < n; ++q)
                           if (!is_hidden(hidden, q)) apply_1q_inplace(amplitudes, n, q, vd);
                       for (Eigen::Index x = 0; x < d; ++x) {
                           int s = 0;
                           for (int q = 0; q < n; ++q)
                               if (!is_hidden(hidden, q)) s += bit_of(static_cast<std::size_t>(x), n, q) ? -1 : 1;
                           amplitudes(x) *= std::exp(-kI * m.theta * static_cast<double>(s * s) / 4.0);
                       }
                       for (int q = 0; q < n; ++q)
                           if (!is_hidden(hidden, q)) apply_1q_inplace(amplitudes, n, q, v);
                   },
                   [&](const op::Frame& f) {
                       require(f.matrix.rows() == d, "frame dimension mismatch");
                       amplitudes = (f.matrix * amplitudes).eval();
                   },
                   [&](const auto& other) {
                       throw ValidationError(op_name(NativeOp(other)) + " is not a coherent operation");
                   },
               },
               op);
}

PureState apply_op(const PureState& state, const NativeOp& op, HiddenMask hidden, const CrosstalkMatrix* crosstalk) {
    Vector v = state.amplitudes();
    apply_op_inplace(v, state.n_qubits(), op, hidden, crosstalk);
    return PureState(std::move(v));
}

DensityMatrix apply_op(const DensityMatrix& rho, const NativeOp& op, HiddenMask hidden,
                       const CrosstalkMatrix* crosstalk) {
    const int n = rho.n_qubits();
    if (crosstalk)
        if (auto* z = std::get_if<op::ZRot>(&op)) return apply_unitary(rho, zrot_with_crosstalk(*z, n, hidden, *crosstalk));
    return apply_unitary(rho, op_unitary(op, n, hidden));
}

PulseSequence rewrite_negative_ms(const PulseSequence& seq) {
    PulseSequence out = seq;
    out.ops.clear();
    out.annotations.clear();
    HiddenMask hidden = 0;
    for (std::size_t i = 0; i < seq.ops.size(); ++i) {
        const NativeOp& o = seq.ops[i];
        const std::string& note = i < seq.annotations.size() ? seq.annotations[i] : std::string();
        if (auto* h = std::get_if<op::Hide>(&o)) hidden |= HiddenMask{1} << h->ion;
        if (auto* h = std::get_if<op::Unhide>(&o)) hidden &= ~(HiddenMask{1} << h->ion);
        const auto* m = std::get_if<op::MS>(&o);
        if (!m || m->theta >= 0.0) {
            out.push(o, note);
            continue;
        }
        // MS is pi-periodic up to a global phase (odd n) or an R(pi) (even n).
        const double turns = std::ceil(-m->theta / kPi);
        out.push(op::MS{m->phi, m->theta + turns * kPi}, note);
        const bool odd_turns = std::fmod(turns, 2.0) != 0.0;
        if (odd_turns && active_count(seq.n_qubits, hidden) % 2 == 0) out.push(op::Collective{m->phi, kPi});
    }
    return out;
}

double ac_stark_shift(double rabi_freq, double detuning) {
    require(detuning != 0.0 && std::isfinite(detuning), "AC-Stark shift needs a non-zero detuning");
    return -rabi_freq * rabi_freq / (2.0 * detuning);
}

double crude_fidelity_estimate(const PulseSequence& seq, int n) {
    static constexpr std::array<double, 5> kMs = {0.98, 0.97, 0.95, 0.93, 0.90};
    double f = 1.0;
    for (const NativeOp& o : seq.ops) {
        if (std::holds_alternative<op::MS>(o)) {
            require(n >= 2 && n <= 6, "MS fidelity table covers 2 to 6 ions, got " + std::to_string(n));
            f *= kMs[static_cast<std::size_t>(n - 2)];
        } else if (std::holds_alternative<op::ZRot>(o) || std::holds_alternative<op::Collective>(o) ||
                   std::holds_alternative<op::ConditionalZRot>(o)) {
            f *= 0.995;
        }
    }
    return f;
}

PureState ghz_reference(int n, double phi) {
    require(n >= 1, "GHZ state needs at least one qubit");
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Vector v = Vector::Zero(d);
    v(0) = 1.0 / std::sqrt(2.0);
    v(d - 1) = -kI * std::exp(kI * static_cast<double>(n) * phi) / std::sqrt(2.0);
    return PureState(std::move(v));
}

}  // namespace tiqc
