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

#include <chrono>

#include "oracles.hpp"
#include "tiqc/compiler.hpp"
#include "tiqc/synthesis.hpp"

namespace tiqc {
namespace {

Matrix cnot() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

int count_ms(const PulseSequence& s) {
    int k = 0;
    for (const NativeOp& o : s.ops) k += std::holds_alternative<op::MS>(o) ? 1 : 0;
    return k;
}

TEST(Synthesize, IdentityGivesEmptySequence) {
    for (int n : {1, 2, 3}) {
        const auto d = static_cast<Eigen::Index>(1) << n;
        const SynthesisResult r = synthesize(Matrix::Identity(d, d), n, Alphabet{}, OptimizerConfig{});
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.sequence.size(), 0u) << n;
        EXPECT_EQ(r.sequence.n_qubits, n);
    }
}

TEST(Synthesize, CnotReachesTargetWithinBudget) {
    OptimizerConfig cfg;
    cfg.seed = 3;
    const auto t0 = std::chrono::steady_clock::now();
    const SynthesisResult r = synthesize(cnot(), 2, Alphabet{}, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.infidelity, 1e-6);
    EXPECT_LT(secs, 60.0);
    EXPECT_GE(count_ms(r.sequence), 1);
    // The emitted sequence is checked independently of the optimizer's own bookkeeping.
    const Matrix u = oracle::sequence_unitary(r.sequence);
    EXPECT_GT(std::abs((cnot().adjoint() * u).trace()) / 4.0, 1.0 - 1e-6);
    for (const PruneStep& s : r.prune_log) EXPECT_TRUE(s.bound_held) << "round " << s.round;
}

TEST(Synthesize, PruneBoundHoldsOnRandomTargets) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Matrix h = Matrix::Random(4, 4);
        h = (h + h.adjoint()).eval();
        OptimizerConfig cfg;
        cfg.seed = seed;
        cfg.restarts = 2;
        cfg.max_rounds = 10;
        const SynthesisResult r = synthesize(oracle::expm_hermitian(h), 2, Alphabet{}, cfg);
        for (const PruneStep& s : r.prune_log) {
            EXPECT_TRUE(s.bound_held);
            EXPECT_LE(s.infidelity_after - s.infidelity_before, s.bound + 1e-12);
        }
    }
}

TEST(Synthesize, DeterministicForFixedSeed) {
    OptimizerConfig cfg;
    cfg.seed = 11;
    cfg.restarts = 3;
    cfg.workers = 1;
    const SynthesisResult a = synthesize(cnot(), 2, Alphabet{}, cfg);
    cfg.workers = 3;
    const SynthesisResult b = synthesize(cnot(), 2, Alphabet{}, cfg);
    ASSERT_EQ(a.sequence.size(), b.sequence.size());
    EXPECT_EQ(a.infidelity, b.infidelity);
    EXPECT_EQ(a.restart, b.restart);
    EXPECT_TRUE((sequence_unitary(a.sequence).matrix().array() == sequence_unitary(b.sequence).matrix().array()).all());
}

TEST(Synthesize, GhzColumnIsOneMsGate) {
    Matrix target = Matrix::Zero(16, 1);
    target(0, 0) = 1.0 / std::sqrt(2.0);
    target(15, 0) = Complex(0, 1) / std::sqrt(2.0);
    OptimizerConfig cfg;
    cfg.column_only = true;
    cfg.seed = 2;
    const SynthesisResult r = synthesize(target, 4, Alphabet{}, cfg);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(count_ms(r.sequence), 1);
    EXPECT_EQ(r.sequence.size(), 1u);
    EXPECT_LT(synthesis_infidelity(r.sequence, target, true), 1e-6);
}

TEST(Synthesize, RejectsBadInputs) {
    EXPECT_THROW(synthesize(Matrix::Identity(3, 3), 2, Alphabet{}, OptimizerConfig{}), ValidationError);
    EXPECT_THROW(synthesize(2.0 * Matrix::Identity(4, 4), 2, Alphabet{}, OptimizerConfig{}), ValidationError);
    OptimizerConfig bad;
    bad.restarts = 0;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(OptimizerConfig, RoundTripsThroughConfig) {
    OptimizerConfig c;
    c.seed = 42;
    c.restarts = 5;
    c.column_only = true;
    const OptimizerConfig back = OptimizerConfig::from_config(c.to_config());
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.restarts, 5);
    EXPECT_TRUE(back.column_only);
}

}  // namespace
}  // namespace tiqc
