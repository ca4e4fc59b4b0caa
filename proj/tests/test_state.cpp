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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tiqc/channels.hpp"
#include "tiqc/state.hpp"

namespace tiqc {
namespace {

Matrix sx() { return oracle::pauli_on(1, 0, 'X'); }
Matrix sz() { return oracle::pauli_on(1, 0, 'Z'); }

Matrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    return (a + a.adjoint()) / 2.0;
}

DensityMatrix random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return DensityMatrix(rho / rho.trace().real());
}

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_TRUE(kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)).isApprox(Matrix::Identity(4, 4)));
}

TEST(Kron, BasisKets) {
    const PureState s = tensor(PureState::from_bits("0"), PureState::from_bits("1"));
    EXPECT_TRUE(s.amplitudes().isApprox(PureState::from_bits("01").amplitudes()));
    EXPECT_EQ(std::abs(s[1]), 1.0);
}

TEST(Kron, SigmaXSigmaXFlipsBothQubits) {
    const Vector out = kron(sx(), sx()) * PureState::from_bits("00").amplitudes();
    EXPECT_NEAR(std::abs(out(3)), 1.0, 1e-15);
}

TEST(ApplyUnitary, Examples) {
    EXPECT_TRUE(apply_unitary(PureState::from_bits("0"), UnitaryMatrix::identity(1))
                    .amplitudes()
                    .isApprox(PureState::from_bits("0").amplitudes()));
    EXPECT_TRUE(apply_unitary(PureState::from_bits("0"), UnitaryMatrix(sx()))
                    .amplitudes()
                    .isApprox(PureState::from_bits("1").amplitudes()));
    Vector plus(2), minus(2);
    plus << 1.0, 1.0;
    minus << 1.0, -1.0;
    const DensityMatrix out = apply_unitary(PureState(plus).projector(), UnitaryMatrix(sz()));
    EXPECT_TRUE(out.matrix().isApprox(PureState(minus).projector().matrix(), 1e-14));
}

TEST(ApplyUnitary, DistributesOverMixtures) {
    std::mt19937_64 rng(7);
    const UnitaryMatrix u(oracle::expm_hermitian(random_hermitian(2, rng)));
    const DensityMatrix a = random_density(2, rng), b = random_density(2, rng);
    const double w = 0.3;
    const DensityMatrix mix(w * a.matrix() + (1 - w) * b.matrix());
    const Matrix lhs = apply_unitary(mix, u).matrix();
    const Matrix rhs = w * apply_unitary(a, u).matrix() + (1 - w) * apply_unitary(b, u).matrix();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ApplyUnitary, PreservesInvariants) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const UnitaryMatrix u(oracle::expm_hermitian(random_hermitian(3, rng)));
        const DensityMatrix rho = apply_unitary(random_density(3, rng), u);
        EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-9);
        EXPECT_LT((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_GT(rho.min_eigenvalue(), -1e-9);
        Vector v = Vector::Random(8);
        EXPECT_NEAR(apply_unitary(PureState(v), u).amplitudes().norm(), 1.0, 1e-9);
    }
}

TEST(MeasureProbabilities, Examples) {
    const ProbDist p0 = measure_probabilities(PureState::from_bits("000"));
    EXPECT_EQ(p0[0], 1.0);
    for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(p0[i], 0.0);
    Vector ghz = Vector::Zero(4);
    ghz(0) = 1.0 / std::sqrt(2.0);
    ghz(3) = Complex(0, -1) / std::sqrt(2.0);
    const ProbDist pg = measure_probabilities(PureState(ghz));
    EXPECT_NEAR(pg[0], 0.5, 1e-15);
    EXPECT_NEAR(pg[1], 0.0, 1e-15);
    EXPECT_NEAR(pg[2], 0.0, 1e-15);
    EXPECT_NEAR(pg[3], 0.5, 1e-15);
    Vector plus(2);
    plus << 1.0, 1.0;
    const ProbDist pp = measure_probabilities(PureState(plus));
    EXPECT_NEAR(pp[0], 0.5, 1e-15);
    EXPECT_NEAR(pp[1], 0.5, 1e-15);
}

TEST(SampleOutcomes, Examples) {
    const auto c = sample_outcomes(ProbDist({1.0, 0.0}), 100, 5);
    EXPECT_EQ(c[0], 100u);
    EXPECT_EQ(c[1], 0u);
    const auto h = sample_outcomes(ProbDist({0.5, 0.5}), 5000, 5);
    const double sigma = std::sqrt(5000 * 0.25);
    for (auto k : h) EXPECT_LT(std::abs(static_cast<double>(k) - 2500.0), 5 * sigma);
    EXPECT_EQ(sample_outcomes(ProbDist({0.2, 0.3, 0.5}), 1000, 9), sample_outcomes(ProbDist({0.2, 0.3, 0.5}), 1000, 9));
}

TEST(StateFidelity, Examples) {
    const DensityMatrix z0 = PureState::from_bits("0").projector();
    const DensityMatrix z1 = PureState::from_bits("1").projector();
    EXPECT_NEAR(state_fidelity(z0, z0), 1.0, 1e-12);
    EXPECT_NEAR(state_fidelity(z0, z1), 0.0, 1e-12);
    EXPECT_NEAR(state_fidelity(z0, DensityMatrix::maximally_mixed(1)), 0.5, 1e-12);
}

TEST(ProcessFidelity, UnitaryCases) {
    std::mt19937_64 rng(3);
    const UnitaryMatrix u(oracle::expm_hermitian(random_hermitian(2, rng)));
    EXPECT_NEAR(process_fidelity(u, u), 1.0, 1e-12);
    const UnitaryMatrix up(std::exp(Complex(0, 0.7)) * u.matrix());
    EXPECT_NEAR(process_fidelity(u, up), 1.0, 1e-12);
}

TEST(ProcessFidelity, IdentityVersusFullPhaseDampMatchesHandChoi) {
    const KrausChannel pd = phase_damp_channel(1.0);
    ProcessMap pmap;
    for (const Mat2& e : pd.kraus_ops) pmap.kraus.push_back(Matrix(e));
    const ProcessMap id = ProcessMap::from_unitary(UnitaryMatrix::identity(1));
    const Matrix c_id = oracle::choi_by_hand([](const Matrix& x) { return x; }, 2);
    const Matrix c_pd = oracle::choi_by_hand(
        [&](const Matrix& x) {
            Matrix out = Matrix::Zero(2, 2);
            for (const Mat2& e : pd.kraus_ops) out += Matrix(e) * x * Matrix(e).adjoint();
            return out;
        },
        2);
    EXPECT_LT((choi_state(pmap).matrix() - c_pd).cwiseAbs().maxCoeff(), 1e-12);
    // c_id is pure, so the fidelity is Tr(c_id c_pd).
    const double expected = (c_id * c_pd).trace().real();
    EXPECT_NEAR(expected, 0.5, 1e-12);
    EXPECT_NEAR(process_fidelity(id, pmap), expected, 1e-9);
}

TEST(ProcessFidelity, UnitaryFormulaMatchesChoiPath) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const UnitaryMatrix a(oracle::expm_hermitian(random_hermitian(2, rng)));
        const UnitaryMatrix b(oracle::expm_hermitian(random_hermitian(2, rng)));
        EXPECT_NEAR(process_fidelity(a, b),
                    process_fidelity(ProcessMap::from_unitary(a), ProcessMap::from_unitary(b)), 1e-9);
    }
}

TEST(PartialTrace, Examples) {
    const int keep0[1] = {0};
    EXPECT_TRUE(partial_trace(PureState::from_bits("00").projector(), keep0)
                    .matrix()
                    .isApprox(PureState::from_bits("0").projector().matrix()));
    Vector ghz = Vector::Zero(4);
    ghz(0) = ghz(3) = 1.0 / std::sqrt(2.0);
    EXPECT_LT((partial_trace(PureState(ghz).projector(), keep0).matrix() - Matrix::Identity(2, 2) / 2.0)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
    std::mt19937_64 rng(1);
    const DensityMatrix rho = random_density(3, rng);
    const int all[3] = {0, 1, 2};
    EXPECT_TRUE(partial_trace(rho, all).matrix().isApprox(rho.matrix()));
}

TEST(Validation, RejectsMalformedInputs) {
    EXPECT_THROW(PureState(Vector::Ones(3)), ValidationError);
    EXPECT_THROW(PureState(Vector::Zero(2)), ValidationError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = 0.3;
    EXPECT_THROW(DensityMatrix{bad}, ValidationError);
    EXPECT_THROW(DensityMatrix(Matrix::Identity(2, 2)), ValidationError);
    EXPECT_THROW(ProbDist({0.5, 0.6}), ValidationError);
    EXPECT_THROW(ProbDist({-0.1, 1.1}), ValidationError);
    EXPECT_THROW(UnitaryMatrix(2.0 * Matrix::Identity(2, 2)), ValidationError);
}

}  // namespace
}  // namespace tiqc
