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

#include "tiqc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

namespace tiqc {
namespace {

int qubits_for_dim(Eigen::Index d, const char* what) {
    require(d >= 1, std::string(what) + ": empty");
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    require((Eigen::Index{1} << n) == d,
            std::string(what) + ": dimension " + std::to_string(d) + " is not a power of two");
    dim_for(n);
    return n;
}

void check_hermitian_trace(const Matrix& rho) {
    require(rho.rows() == rho.cols(), "density matrix must be square");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= kInvariantTol, "density matrix is not Hermitian");
    require(std::abs(rho.trace() - Complex{1.0, 0.0}) <= kInvariantTol,
            "density matrix trace differs from 1");
}

double min_eig(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

// ---------------------------------------------------------------- PureState

PureState::PureState(Vector amplitudes) : n_(qubits_for_dim(amplitudes.size(), "state")) {
    const double norm = amplitudes.norm();
    require(std::isfinite(norm) && norm > 0.0, "state has zero or non-finite norm");
    amp_ = amplitudes / norm;
}

PureState PureState::basis(int n_qubits, std::size_t index) {
    const std::size_t d = dim_for(n_qubits);
    require(index < d, "basis index out of range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
}

PureState PureState::from_bits(std::string_view bits) {
    const int n = static_cast<int>(bits.size());
    dim_for(n);
    std::size_t index = 0;
    for (int q = 0; q < n; ++q) {
        require(bits[q] == '0' || bits[q] == '1', "bit string may contain only 0 and 1");
        if (bits[q] == '1') index |= qubit_mask(n, q);
    }
    return basis(n, index);
}

PureState PureState::from_amplitudes(std::span<const Complex> amplitudes) {
    Vector v(static_cast<Eigen::Index>(amplitudes.size()));
    for (std::size_t i = 0; i < amplitudes.size(); ++i) v(static_cast<Eigen::Index>(i)) = amplitudes[i];
    return PureState(std::move(v));
}

DensityMatrix PureState::projector() const { return DensityMatrix::trusted(amp_ * amp_.adjoint()); }

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(Matrix rho)
    : n_(qubits_for_dim(rho.rows(), "density matrix")), rho_(std::move(rho)) {
    check_hermitian_trace(rho_);
    require(min_eig(rho_) >= -kInvariantTol, "density matrix has a negative eigenvalue");
}

DensityMatrix::DensityMatrix(Matrix rho, TrustedTag)
    : n_(qubits_for_dim(rho.rows(), "density matrix")), rho_(std::move(rho)) {
    // Symmetrize away rounding so downstream eigen-solvers see exact Hermiticity.
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    check_hermitian_trace(rho_);
}

DensityMatrix DensityMatrix::trusted(Matrix rho) { return DensityMatrix(std::move(rho), TrustedTag{}); }

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    const auto d = static_cast<Eigen::Index>(dim_for(n_qubits));
    return trusted(Matrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const { return min_eig(rho_); }

// ----------------------------------------------------------------- ProbDist

ProbDist::ProbDist(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    require(!p_.empty(), "empty distribution");
    double sum = 0.0;
    for (double v : p_) {
        require(std::isfinite(v) && v >= -kInvariantTol, "negative probability");
        sum += v;
    }
    require(std::abs(sum - 1.0) <= kInvariantTol, "probabilities do not sum to 1");
    for (double& v : p_) v = std::max(v, 0.0);
}

ProbDist ProbDist::from_counts(std::span<const std::uint64_t> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0,
                                         [](double a, std::uint64_t c) { return a + static_cast<double>(c); });
    require(total > 0.0, "counts are all zero");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
    return ProbDist(std::move(p));
}

ProbDist ProbDist::uniform(std::size_t size) {
    require(size > 0, "empty distribution");
    return ProbDist(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

// ------------------------------------------------------------ UnitaryMatrix

UnitaryMatrix::UnitaryMatrix(Matrix u) : n_(qubits_for_dim(u.rows(), "unitary")), u_(std::move(u)) {
    require(u_.rows() == u_.cols(), "unitary must be square");
    const auto d = u_.rows();
    const double err = (u_.adjoint() * u_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    require(err <= kInvariantTol, "matrix is not unitary (|U^dag U - I| = " + std::to_string(err) + ")");
}

UnitaryMatrix UnitaryMatrix::identity(int n_qubits) {
    const auto d = static_cast<Eigen::Index>(dim_for(n_qubits));
    return UnitaryMatrix(Matrix::Identity(d, d));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(u_.adjoint()); }

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    require(a.dim() == b.dim(), "unitary dimension mismatch");
    return UnitaryMatrix(a.u_ * b.u_);
}

// --------------------------------------------------------------- ProcessMap

ProcessMap ProcessMap::from_unitary(const UnitaryMatrix& u) { return ProcessMap{{u.matrix()}}; }

std::size_t ProcessMap::dim() const {
    require(!kraus.empty(), "process has no Kraus operators");
    return static_cast<std::size_t>(kraus.front().rows());
}

double ProcessMap::completeness_error() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& e : kraus) {
        require(e.rows() == d && e.cols() == d, "Kraus operator dimension mismatch");
        sum += e.adjoint() * e;
    }
    return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------ algebra

Matrix kron(const Matrix& a, const Matrix& b) {
    const int na = qubits_for_dim(a.rows(), "tensor operand");
    const int nb = qubits_for_dim(b.rows(), "tensor operand");
    require(na + nb <= kMaxQubits, "tensor product exceeds " + std::to_string(kMaxQubits) + " qubits");
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

PureState tensor(const PureState& a, const PureState& b) {
    return PureState(kron(a.amplitudes(), b.amplitudes()));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix::trusted(kron(a.matrix(), b.matrix()));
}

UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    return UnitaryMatrix(kron(a.matrix(), b.matrix()));
}

PureState apply_unitary(const PureState& state, const UnitaryMatrix& u) {
    require(state.dim() == u.dim(), "state/unitary dimension mismatch");
    return PureState(u.matrix() * state.amplitudes());
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const UnitaryMatrix& u) {
    require(rho.dim() == u.dim(), "state/unitary dimension mismatch");
    return DensityMatrix::trusted(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

ProbDist measure_probabilities(const PureState& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state[i]);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    return ProbDist(std::move(p));
}

ProbDist measure_probabilities(const DensityMatrix& rho) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(0.0, rho(i, i).real());
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= s;
    return ProbDist(std::move(p));
}

std::vector<std::uint64_t> sample_outcomes(const ProbDist& dist, std::uint64_t shots, std::uint64_t seed) {
    require(shots >= 1, "shots must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> counts(dist.size(), 0);
    // Sequential conditional binomials give an exact multinomial draw.
    std::uint64_t remaining = shots;
    double mass = 1.0;
    for (std::size_t k = 0; k + 1 < dist.size() && remaining > 0; ++k) {
        const double q = mass > 0.0 ? std::clamp(dist[k] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::uint64_t> bin(remaining, q);
        counts[k] = bin(rng);
        remaining -= counts[k];
        mass -= dist[k];
    }
    counts.back() += remaining;
    return counts;
}

double state_fidelity(const PureState& a, const DensityMatrix& b) {
    require(a.dim() == b.dim(), "fidelity dimension mismatch");
    const Complex f = a.amplitudes().dot(b.matrix() * a.amplitudes());
    return std::clamp(f.real(), 0.0, 1.0);
}

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    require(a.dim() == b.dim(), "fidelity dimension mismatch");
    const double pure_tol = 1e-12;
    auto as_pure = [&](const DensityMatrix& r) -> std::optional<PureState> {
        if (std::abs(r.purity() - 1.0) > pure_tol) return std::nullopt;
        Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix());
        return PureState(es.eigenvectors().col(es.eigenvalues().size() - 1));
    };
    if (auto psi = as_pure(a)) return state_fidelity(*psi, b);
    if (auto psi = as_pure(b)) return state_fidelity(*psi, a);

    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix sqrt_a = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Matrix m = sqrt_a * b.matrix() * sqrt_a;
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es2(m, Eigen::EigenvaluesOnly);
    const double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

DensityMatrix choi_state(const ProcessMap& map) {
    const double err = map.completeness_error();
    require(err <= 1e-6, "process is not trace preserving (completeness error " + std::to_string(err) + ")");
    const auto d = static_cast<Eigen::Index>(map.dim());
    // (1/d) sum_k vec(E_k) vec(E_k)^dagger with vec stacking |i> (x) E|i>.
    Matrix choi = Matrix::Zero(d * d, d * d);
    for (const Matrix& e : map.kraus) {
        Vector v(d * d);
        for (Eigen::Index i = 0; i < d; ++i) v.segment(i * d, d) = e.col(i);
        choi += v * v.adjoint();
    }
    return DensityMatrix::trusted(choi / static_cast<double>(d));
}

double process_fidelity(const ProcessMap& a, const ProcessMap& b) {
    require(a.dim() == b.dim(), "process dimension mismatch");
    return state_fidelity(choi_state(a), choi_state(b));
}

double process_fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    require(a.dim() == b.dim(), "process dimension mismatch");
    const double d = static_cast<double>(a.dim());
    const double t = std::abs((a.matrix().adjoint() * b.matrix()).trace()) / d;
    return std::clamp(t * t, 0.0, 1.0);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.n_qubits();
    require(!keep.empty(), "partial trace: keep set is empty");
    std::vector<int> k(keep.begin(), keep.end());
    std::sort(k.begin(), k.end());
    require(std::adjacent_find(k.begin(), k.end()) == k.end(), "partial trace: duplicate qubit");
    require(k.front() >= 0 && k.back() < n, "partial trace: qubit out of range");
    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!std::binary_search(k.begin(), k.end(), q)) traced.push_back(q);

    const int nk = static_cast<int>(k.size());
    const std::size_t dk = std::size_t{1} << nk;
    const std::size_t dt = std::size_t{1} << traced.size();
    auto compose = [&](std::size_t kept_idx, std::size_t traced_idx) {
        std::size_t full = 0;
        for (int i = 0; i < nk; ++i)
            if (bit_of(kept_idx, nk, i)) full |= qubit_mask(n, k[i]);
        const int nt = static_cast<int>(traced.size());
        for (int i = 0; i < nt; ++i)
            if (bit_of(traced_idx, nt, i)) full |= qubit_mask(n, traced[i]);
        return static_cast<std::size_t>(full);
    };
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            Complex s = 0.0;
            for (std::size_t t = 0; t < dt; ++t) s += rho(compose(r, t), compose(c, t));
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s;
        }
    return DensityMatrix::trusted(std::move(out));
}

}  // namespace tiqc
