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

namespace tiqc {
namespace {

DensityMatrix random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return DensityMatrix(rho / rho.trace().real());
}

DensityMatrix plus_state() {
    Vector v(2);
    v << 1.0, 1.0;
    return PureState(v).projector();
}

DensityMatrix ghz2() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0;
    return PureState(v).projector();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(PhaseDamp, ZeroIsIdentity) {
    std::mt19937_64 rng(1);
    const DensityMatrix rho = random_density(1, rng);
    EXPECT_LT(max_abs(apply_channel(rho, phase_damp_channel(0.0), 0).matrix() - rho.matrix()), 1e-15);
}

TEST(PhaseDamp, FullDampingErasesCoherence) {
    const Matrix out = apply_channel(plus_state(), phase_damp_channel(1.0), 0).matrix();
    EXPECT_LT(max_abs(out - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PhaseDamp, HalfDampingScalesCoherence) {
    const Matrix out = apply_channel(plus_state(), phase_damp_channel(0.5), 0).matrix();
    EXPECT_NEAR(out(0, 1).real(), 0.5 * std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
}

TEST(AmpDamp, ZeroIsIdentity) {
    std::mt19937_64 rng(2);
    const DensityMatrix rho = random_density(1, rng);
    for (int target : {0, 1})
        EXPECT_LT(max_abs(apply_channel(rho, amp_damp_channel(0.0, target), 0).matrix() - rho.matrix()), 1e-15);
}

TEST(AmpDamp, FullDampingReinitializes) {
    std::mt19937_64 rng(3);
    for (int target : {0, 1})
        for (int trial = 0; trial < 5; ++trial) {
            const Matrix out = apply_channel(random_density(1, rng), amp_damp_channel(1.0, target), 0).matrix();
            EXPECT_NEAR(out(target, target).real(), 1.0, 1e-12);
        }
}

TEST(AmpDamp, PartialDampingScalesDampedPopulation) {
    const double gamma = 0.36;
    Vector v(2);
    v << 0.6, 0.8;
    const DensityMatrix rho = PureState(v).projector();
    for (int target : {0, 1}) {
        const int other = 1 - target;
        const Matrix out = apply_channel(rho, amp_damp_channel(gamma, target), 0).matrix();
        // Kraus algebra: the damped level keeps (1 - gamma), coherence sqrt(1 - gamma).
        EXPECT_NEAR(out(other, other).real(), (1 - gamma) * std::norm(v(other)), 1e-15);
        EXPECT_NEAR(out(target, target).real(), std::norm(v(target)) + gamma * std::norm(v(other)), 1e-15);
        EXPECT_NEAR(std::abs(out(0, 1)), std::sqrt(1 - gamma) * 0.48, 1e-15);
    }
}

TEST(Kraus, CompletenessForRandomGamma) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double g = u(rng);
        EXPECT_LT(phase_damp_channel(g).completeness_error(), 1e-9);
        EXPECT_LT(amp_damp_channel(g, 0).completeness_error(), 1e-9);
        EXPECT_LT(amp_damp_channel(g, 1).completeness_error(), 1e-9);
    }
}

TEST(Kraus, RejectsGammaOutsideUnitInterval) {
    EXPECT_THROW(phase_damp_channel(-0.1), ValidationError);
    EXPECT_THROW(amp_damp_channel(1.1), ValidationError);
    EXPECT_THROW(amp_damp_channel(0.5, 2), ValidationError);
}

TEST(Kraus, EmbeddedChoiMatchesHandConstruction) {
    const KrausChannel ch = amp_damp_channel(0.3, 1);
    const ProcessMap map = ch.embedded(2, 1);
    const Matrix hand = oracle::choi_by_hand(
        [&](const Matrix& x) {
            Matrix out = Matrix::Zero(4, 4);
            for (const Mat2& e : ch.kraus_ops) {
                const Matrix big = kron(Matrix::Identity(2, 2), Matrix(e));
                out += big * x * big.adjoint();
            }
            return out;
        },
        4);
    EXPECT_LT(max_abs(choi_state(map).matrix() - hand), 1e-12);
}

TEST(ApplyChannel, PreservesTraceAndPositivity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix rho = random_density(3, rng);
        const KrausChannel ch = trial % 2 ? phase_damp_channel(u(rng)) : amp_damp_channel(u(rng), trial % 3 ? 0 : 1);
        const DensityMatrix out = apply_channel(rho, ch, trial % 3);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-9);
        EXPECT_GT(out.min_eigenvalue(), -1e-9);
    }
}

TEST(ApplyChannel, FullPhaseDampOnGhzQubit) {
    const Matrix out = apply_channel(ghz2(), phase_damp_channel(1.0), 0).matrix();
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = expected(3, 3) = 0.5;
    EXPECT_LT(max_abs(out - expected), 1e-15);
}

TEST(ApplyChannel, PhaseDampComposition) {
    std::mt19937_64 rng(6);
    const DensityMatrix rho = random_density(1, rng);
    const DensityMatrix twice = apply_channel(apply_channel(rho, phase_damp_channel(0.5), 0), phase_damp_channel(0.5), 0);
    EXPECT_LT(max_abs(twice.matrix() - apply_channel(rho, phase_damp_channel(0.75), 0).matrix()), 1e-9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double g1 = u(rng), g2 = u(rng), g3 = 1 - (1 - g1) * (1 - g2);
        const DensityMatrix a = apply_channel(apply_channel(rho, phase_damp_channel(g1), 0), phase_damp_channel(g2), 0);
        EXPECT_LT(max_abs(a.matrix() - apply_channel(rho, phase_damp_channel(g3), 0).matrix()), 1e-9);
    }
}

TEST(ApplyChannel, PhaseDampCommutesWithZRotation) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_density(2, rng);
        const UnitaryMatrix z(oracle::op_unitary(op::ZRot{1, 6 * u(rng)}, 2, 0));
        const KrausChannel pd = phase_damp_channel(u(rng));
        const Matrix a = apply_channel(apply_unitary(rho, z), pd, 1).matrix();
        const Matrix b = apply_unitary(apply_channel(rho, pd, 1), z).matrix();
        EXPECT_LT(max_abs(a - b), 1e-9);
    }
}

TEST(Measure, Branches) {
    const auto b0 = measure_branches(PureState::from_bits("0"), 0);
    ASSERT_TRUE(b0[0].has_value());
    EXPECT_FALSE(b0[1].has_value());
    EXPECT_NEAR(b0[0]->probability, 1.0, 1e-15);
    const auto bp = measure_branches(plus_state(), 0);
    EXPECT_NEAR(bp[0]->probability, 0.5, 1e-15);
    EXPECT_NEAR(bp[1]->probability, 0.5, 1e-15);
    const auto bg = measure_branches(ghz2(), 0);
    EXPECT_NEAR(bg[0]->probability, 0.5, 1e-15);
    EXPECT_NEAR(bg[0]->state(0, 0).real(), 1.0, 1e-15);
}

TEST(Measure, SamplingMatchesBranchProbabilities) {
    Vector v(2);
    v << 0.6, 0.8;
    const PureState psi(v);
    int ones = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(s));
        ones += measure_sample(psi, 0, rng).outcome;
    }
    const double sigma = std::sqrt(trials * 0.64 * 0.36);
    EXPECT_LT(std::abs(ones - trials * 0.64), 5 * sigma);
}

TEST(Measure, StrictModeNeedsSpectatorsHidden) {
    EXPECT_THROW(check_spectators(2, 0, 0, Strictness::Strict), ValidationError);
    EXPECT_EQ(check_spectators(2, 0, 0b10, Strictness::Strict), 0u);
    EXPECT_EQ(check_spectators(3, 0, 0b100, Strictness::Permissive), 0b010u);
    EXPECT_THROW(check_spectators(2, 0, 0b01, Strictness::Permissive), ValidationError);
}

TEST(Reset, Examples) {
    const DensityMatrix one = PureState::from_bits("1").projector();
    EXPECT_LT(max_abs(reset_ion(one, 0, 1).matrix() - one.matrix()), 1e-15);
    EXPECT_NEAR(reset_ion(PureState::from_bits("0").projector(), 0, 1)(1, 1).real(), 1.0, 1e-15);
    const Matrix out = reset_ion(ghz2(), 0, 1).matrix();
    const Matrix expected = kron(one.matrix(), Matrix::Identity(2, 2) / 2.0);
    EXPECT_LT(max_abs(out - expected), 1e-15);
    std::mt19937_64 rng(1);
    const PureState r = reset_ion(PureState::from_bits("01"), 1, rng, 0);
    EXPECT_NEAR(std::abs(r[0]), 1.0, 1e-15);
}

}  // namespace
}  // namespace tiqc
