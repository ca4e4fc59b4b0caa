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

#include <array>
#include <random>

#include "frozen.hpp"
#include "oracles.hpp"
#include "tiqc/algorithms.hpp"
#include "tiqc/compiler.hpp"
#include "tiqc/sequence_text.hpp"

namespace tiqc {
namespace {

using namespace frozen;
constexpr double kFrozenTol = frozen::kTolerance;

// Controlled permutation of the two register qubits, control on the first qubit.
Matrix controlled(const std::array<int, 4>& perm) {
    Matrix u = Matrix::Zero(8, 8);
    for (int y = 0; y < 4; ++y) {
        u(y, y) = 1.0;
        u(4 + perm[static_cast<std::size_t>(y)], 4 + y) = 1.0;
    }
    return u;
}

std::array<int, 4> squared(const std::array<int, 4>& p) {
    std::array<int, 4> out{};
    for (std::size_t y = 0; y < 4; ++y) out[y] = p[static_cast<std::size_t>(p[y])];
    return out;
}

Equivalences block_equivalences() {
    Equivalences eq;
    eq.relabel = true;
    eq.bit_flips = true;
    eq.diagonal_phases = true;
    return eq;
}

double oracle_fidelity(const std::string& stem, const Matrix& target, const Equivalences& eq) {
    return verify_unitary(oracle::sequence_unitary(load_corpus(stem)), target, 1e-6, eq).fidelity;
}

TEST(SequenceUnitary, MatchesOracleOnCorpus) {
    for (const std::string& stem : corpus_names()) {
        const PulseSequence seq = load_corpus(stem);
        const Matrix lib = sequence_unitary(seq).matrix();
        EXPECT_LT((lib - oracle::sequence_unitary(seq)).cwiseAbs().maxCoeff(), 1e-9) << stem;
    }
}

TEST(SequenceUnitary, EmptySequenceIsIdentity) {
    PulseSequence s;
    s.n_qubits = 3;
    EXPECT_TRUE(sequence_unitary(s).matrix().isApprox(Matrix::Identity(8, 8)));
}

TEST(SequenceUnitary, CollectiveRotationsAdd) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double phi = u(rng), a = u(rng), b = u(rng);
        PulseSequence two, one;
        two.n_qubits = one.n_qubits = 2;
        two.push(op::Collective{phi, a});
        two.push(op::Collective{phi, b});
        one.push(op::Collective{phi, a + b});
        EXPECT_LT((sequence_unitary(two).matrix() - sequence_unitary(one).matrix()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(SequenceUnitary, RejectsNonCoherentOps) {
    PulseSequence s;
    s.n_qubits = 1;
    s.push(op::PhaseDamp{0, 0.1});
    EXPECT_THROW(sequence_unitary(s), ValidationError);
}

TEST(MsConcatenation, Examples) {
    EXPECT_EQ(ms_concatenation(kPi / 2, kPi / 16), 8);
    EXPECT_EQ(ms_concatenation(kPi / 16, kPi / 16), 1);
    EXPECT_THROW(ms_concatenation(0.3, kPi / 16), ValidationError);
    EXPECT_THROW(ms_concatenation(kPi / 2, 0.0), ValidationError);
}

TEST(Verify, SequenceAgainstItsOwnUnitaryPasses) {
    for (const std::string& stem : corpus_names()) {
        const PulseSequence seq = load_corpus(stem);
        const VerifyReport r = verify_sequence(seq, sequence_unitary(seq).matrix(), 1e-9);
        EXPECT_TRUE(r.passed) << stem;
        EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
    }
}

TEST(Verify, GlobalPhaseIsIgnoredAndFramesReproduceTarget) {
    Matrix h = Matrix::Random(8, 8);
    h = (h + h.adjoint()).eval();
    const Matrix u = oracle::expm_hermitian(h);
    const Matrix target = std::exp(Complex(0, 1.3)) * u;
    EXPECT_NEAR(verify_unitary(u, target, 1e-9).fidelity, 1.0, 1e-12);

    // A permuted, phase-framed copy is recovered under the matching equivalences.
    Equivalences eq;
    eq.io_permutations = true;
    eq.diagonal_phases = true;
    const Matrix p = qubit_permutation_matrix({2, 0, 1});
    Vector ph(8);
    for (int i = 0; i < 8; ++i) ph(i) = std::exp(Complex(0, 0.37 * i * i));
    const Matrix framed = ph.asDiagonal() * p * u;
    const VerifyReport r = verify_unitary(framed, u, 1e-9, eq);
    EXPECT_TRUE(r.passed);
    const Matrix undone = r.frame_out * framed * r.frame_in;
    EXPECT_NEAR(std::abs((u.adjoint() * undone).trace()) / 8.0, 1.0, 1e-9);
    EXPECT_FALSE(verify_unitary(framed, u, 1e-9).passed);
}

TEST(Verify, RejectsMismatchedDimensions) {
    EXPECT_THROW(verify_unitary(Matrix::Identity(4, 4), Matrix::Identity(8, 8), 1e-6), ValidationError);
}

TEST(CorpusRegression, QftIsTheInverseTransform) {
    Equivalences eq;
    eq.io_permutations = true;
    eq.diagonal_phases = true;
    const Matrix f = oracle::dft(8);
    EXPECT_NEAR(oracle_fidelity("a2_qft3", f.adjoint(), eq), kQftInverse, kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a2_qft3", f, eq), kQftForward, kFrozenTol);
    EXPECT_NEAR(coherent_qft_mapping().report.fidelity, kQftInverse, kFrozenTol);
    EXPECT_TRUE(coherent_qft_mapping().inverse);
}

TEST(CorpusRegression, ControlledPermutationBlocks) {
    const Equivalences eq = block_equivalences();
    const std::array<int, 4> pi1{0, 3, 2, 1}, pi2{1, 0, 3, 2}, pi3{0, 3, 1, 2}, pi4{3, 0, 1, 2};
    EXPECT_NEAR(oracle_fidelity("a3_controlled_pi1", controlled(pi1), eq), kPi1, kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a4_controlled_pi2", controlled(pi2), eq), kPi2, kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a5_controlled_pi3", controlled(pi3), eq), kPi3, kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a6_controlled_pi3_squared", controlled(squared(pi3)), eq), kPi3Squared,
                kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a7_controlled_pi4", controlled(pi4), eq), kPi4, kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a8_controlled_pi4_squared", controlled(squared(pi4)), eq), kPi4Squared,
                kFrozenTol);
    EXPECT_NEAR(oracle_fidelity("a8_controlled_pi4_squared_as_printed", controlled(squared(pi4)), eq),
                kPi4SquaredPrinted, kFrozenTol);
}

TEST(CorpusRegression, LibraryAgreesWithFrozenBlocks) {
    const Equivalences eq = block_equivalences();
    const std::array<int, 4> pi1{0, 3, 2, 1}, pi4{3, 0, 1, 2};
    EXPECT_NEAR(verify_sequence(load_corpus("a3_controlled_pi1"), controlled_permutation(pi1), 1e-6, eq).fidelity,
                kPi1, kFrozenTol);
    EXPECT_NEAR(verify_sequence(load_corpus("a7_controlled_pi4"), controlled_permutation(pi4), 1e-6, eq).fidelity,
                kPi4, kFrozenTol);
}

TEST(CorpusRegression, OpenSystemStepPopulations) {
    const Matrix u = oracle::sequence_unitary(load_corpus("a1_open_system_step"));
    for (std::size_t i = 0; i < 8; ++i)
        EXPECT_NEAR(std::norm(u(static_cast<Eigen::Index>(i), 0)), kA1Populations[i], kFrozenTol) << i;
}

TEST(Permutations, MatricesAreUnitaryAndComposable) {
    const Matrix p = qubit_permutation_matrix({1, 2, 0});
    EXPECT_TRUE((p * p.adjoint()).isApprox(Matrix::Identity(8, 8)));
    EXPECT_TRUE((p * p * p).isApprox(Matrix::Identity(8, 8)));
    EXPECT_THROW(qubit_permutation_matrix({0, 0, 1}), ValidationError);
    const Matrix f = bit_flip_matrix(3, 0b101);
    EXPECT_TRUE((f * f).isApprox(Matrix::Identity(8, 8)));
    EXPECT_EQ(std::abs(f(0b101, 0)), 1.0);
}

}  // namespace
}  // namespace tiqc
