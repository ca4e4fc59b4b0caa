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

#include "tiqc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tiqc/config.hpp"

namespace tiqc {
namespace {

int log2_dim(Eigen::Index d) {
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    require((Eigen::Index{1} << n) == d, "matrix dimension is not a power of two");
    return n;
}

struct PhaseFit {
    double value;
    Vector a;  // output phases (unit modulus)
    Vector b;  // input phases (unit modulus)
};

// max over unit-modulus a, b of |sum_ij a_i M_ij b_j| / d by alternating
// maximization from a fixed set of starts.
PhaseFit fit_diagonal_phases(const Matrix& m) {
    const Eigen::Index d = m.rows();
    auto unit = [](const Vector& v) {
        Vector out(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::abs(v(i)) > 0.0 ? v(i) / std::abs(v(i)) : Complex(1.0);
        return out;
    };
    std::mt19937_64 rng(0x7469716370686173ULL);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    PhaseFit best{-1.0, Vector::Ones(d), Vector::Ones(d)};
    for (int start = 0; start < 8; ++start) {
        Vector b = Vector::Ones(d);
        if (start > 0)
            for (Eigen::Index i = 0; i < d; ++i) b(i) = std::exp(kI * angle(rng));
        Vector a(d);
        double prev = -1.0;
        for (int it = 0; it < 500; ++it) {
            a = unit((m * b).conjugate());
            b = unit((a.transpose() * m).transpose().conjugate());
            const double v = std::abs((a.transpose() * m * b)(0, 0));
            if (v - prev < 1e-15) break;
            prev = v;
        }
        const double v = std::abs((a.transpose() * m * b)(0, 0)) / static_cast<double>(d);
        if (v > best.value + 1e-14) best = {v, a, b};
    }
    return best;
}

RealVector phases_of(const Vector& v) {
    RealVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::arg(v(i));
    return out;
}

std::vector<std::vector<int>> all_perms(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

UnitaryMatrix sequence_unitary(const PulseSequence& seq, const CrosstalkMatrix* crosstalk) {
    seq.validate();
    const int n = seq.n_qubits;
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Matrix u = Matrix::Identity(d, d);
    HiddenMask hidden = 0;
    for (std::size_t k = 0; k < seq.ops.size(); ++k) {
        const NativeOp& op = seq.ops[k];
        if (const auto* h = std::get_if<op::Hide>(&op)) {
            hidden |= 1u << h->ion;
            continue;
        }
        if (const auto* h = std::get_if<op::Unhide>(&op)) {
            hidden &= ~(1u << h->ion);
            continue;
        }
        require(is_coherent(op), "op " + std::to_string(k + 1) + " (" + op_name(op) + ") is not coherent");
        for (Eigen::Index c = 0; c < d; ++c) {
            Vector col = u.col(c);
            apply_op_inplace(col, n, op, hidden, crosstalk);
            u.col(c) = col;
        }
    }
    return UnitaryMatrix(std::move(u));
}

int ms_concatenation(double theta, double base_angle) {
    require(std::isfinite(theta) && std::isfinite(base_angle) && base_angle > 0.0,
            "concatenation needs a positive base angle");
    require(theta > 0.0, "concatenation needs a positive angle");
    const double k = std::round(theta / base_angle);
    require(k >= 1.0 && std::abs(k * base_angle - theta) <= 1e-9,
            "angle " + format_double(theta) + " is not a multiple of " + format_double(base_angle));
    return static_cast<int>(k);
}

Matrix qubit_permutation_matrix(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<int> seen(perm.begin(), perm.end());
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < n; ++i) require(seen[i] == i, "qubit permutation is not a bijection");
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Matrix p = Matrix::Zero(d, d);
    for (Eigen::Index x = 0; x < d; ++x) {
        std::size_t y = 0;
        for (int q = 0; q < n; ++q)
            if (bit_of(static_cast<std::size_t>(x), n, q)) y |= qubit_mask(n, perm[q]);
        p(static_cast<Eigen::Index>(y), x) = 1.0;
    }
    return p;
}

Matrix bit_flip_matrix(int n, unsigned mask) {
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    std::size_t flip = 0;
    for (int q = 0; q < n; ++q)
        if ((mask >> q) & 1u) flip |= qubit_mask(n, q);
    Matrix f = Matrix::Zero(d, d);
    for (Eigen::Index x = 0; x < d; ++x) f(static_cast<Eigen::Index>(static_cast<std::size_t>(x) ^ flip), x) = 1.0;
    return f;
}

VerifyReport verify_unitary(const Matrix& u, const Matrix& target, double tolerance, const Equivalences& eq) {
    require(u.rows() == u.cols() && target.rows() == target.cols(), "verification needs square matrices");
    require(u.rows() == target.rows(), "sequence and target dimensions differ");
    require(tolerance >= 0.0, "tolerance must be >= 0");
    const int n = log2_dim(u.rows());
    const Eigen::Index d = u.rows();
    const bool permute = eq.relabel || eq.io_permutations;
    require(!eq.io_permutations || n <= 4, "independent io permutations are limited to 4 qubits");
    require(!permute || n <= 6, "qubit relabeling is limited to 6 qubits");

    std::vector<int> ident(n);
    std::iota(ident.begin(), ident.end(), 0);
    const std::vector<std::vector<int>> perms = permute ? all_perms(n) : std::vector<std::vector<int>>{ident};
    const unsigned n_masks = eq.bit_flips ? (1u << n) : 1u;

    VerifyReport best;
    best.fidelity = -1.0;
    best.tolerance = tolerance;
    const Matrix target_conj = target.conjugate();
    for (std::size_t pi = 0; pi < perms.size(); ++pi) {
        const Matrix p_in = qubit_permutation_matrix(perms[pi]);
        for (std::size_t po = 0; po < perms.size(); ++po) {
            if (!eq.io_permutations && po != pi) continue;
            const Matrix p_out = qubit_permutation_matrix(perms[po]);
            for (unsigned mask = 0; mask < n_masks; ++mask) {
                const Matrix f = bit_flip_matrix(n, mask);
                const Matrix w = f * p_out * u * p_in.transpose() * f;
                VerifyReport r;
                Vector a = Vector::Ones(d), b = Vector::Ones(d);
                if (eq.diagonal_phases) {
                    const PhaseFit fit = fit_diagonal_phases(target_conj.cwiseProduct(w));
                    r.fidelity = fit.value;
                    a = fit.a;
                    b = fit.b;
                } else {
                    r.fidelity = std::abs((target.adjoint() * w).trace()) / static_cast<double>(d);
                }
                if (r.fidelity <= best.fidelity + 1e-12) continue;
                // Remove the global phase from the frames so the product matches
                // the target including phase.
                const Matrix frame_in = p_in.transpose() * f * b.asDiagonal();
                const Matrix frame_out = Matrix(a.asDiagonal()) * f * p_out;
                const Complex ov = (target.adjoint() * frame_out * u * frame_in).trace();
                const Complex g = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : Complex(1.0);
                r.input_perm = perms[pi];
                r.output_perm = perms[po];
                r.flip_mask = mask;
                r.input_phases = phases_of(b);
                r.output_phases = phases_of(a * g);
                r.frame_in = frame_in;
                r.frame_out = frame_out * g;
                r.tolerance = tolerance;
                best = std::move(r);
            }
        }
    }
    best.fidelity = std::min(1.0, best.fidelity);
    best.passed = 1.0 - best.fidelity <= tolerance;
    return best;
}

VerifyReport verify_sequence(const PulseSequence& seq, const Matrix& target, double tolerance,
                             const Equivalences& eq) {
    return verify_unitary(sequence_unitary(seq).matrix(), target, tolerance, eq);
}

std::string VerifyReport::to_text() const {
    std::ostringstream out;
    out << "fidelity = " << format_double(fidelity) << "\n";
    out << "tolerance = " << format_double(tolerance) << "\n";
    out << "passed = " << (passed ? "true" : "false") << "\n";
    out << "input_perm = " << join(input_perm) << "\n";
    out << "output_perm = " << join(output_perm) << "\n";
    out << "flip_mask = " << flip_mask << "\n";
    auto phases = [&](const char* key, const RealVector& v) {
        out << key << " =";
        for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : " ") << format_double(v(i));
        out << "\n";
    };
    phases("input_phases", input_phases);
    phases("output_phases", output_phases);
    return out.str();
}

}  // namespace tiqc
