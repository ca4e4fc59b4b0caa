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
#include "tiqc/compiler.hpp"
#include "tiqc/gates.hpp"
#include "tiqc/noise.hpp"

namespace tiqc {
namespace {

double phase_free_distance(const Matrix& a, const Matrix& b) { return 1.0 - oracle::overlap(a, b); }

double ket_fidelity(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

Vector run(int n, std::initializer_list<NativeOp> ops, HiddenMask hidden = 0) {
    Vector v = PureState::basis(n, 0).amplitudes();
    for (const NativeOp& op : ops) apply_op_inplace(v, n, op, hidden);
    return v;
}

TEST(ZRot, PiOnOneQubit) {
    const Matrix u = op_unitary(op::ZRot{0, kPi}, 1).matrix();
    EXPECT_NEAR(std::abs(u(0, 0) - std::exp(Complex(0, -kPi / 2))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 1) - std::exp(Complex(0, kPi / 2))), 0.0, 1e-15);
    EXPECT_EQ(std::abs(u(0, 1)), 0.0);
}

TEST(MS, HalfPiMakesTwoQubitGhz) {
    Vector ghz = Vector::Zero(4);
    ghz(0) = 1.0 / std::sqrt(2.0);
    ghz(3) = Complex(0, -1) / std::sqrt(2.0);
    EXPECT_NEAR(ket_fidelity(ghz, run(2, {op::MS{0, kPi / 2}})), 1.0, 1e-12);
}

TEST(MS, HiddenMiddleQubitMatchesEmbeddedTwoQubitGate) {
    const HiddenMask hidden = 0b010;
    const Matrix u = op_unitary(op::MS{0, kPi / 2}, 3, hidden).matrix();
    const Matrix ms2 = oracle::op_unitary(op::MS{0, kPi / 2}, 2, 0);
    // Embed ms2 on qubits {0, 2}: index bits q0 q1 q2, ms2 acts on (q0, q2).
    Matrix expected = Matrix::Zero(8, 8);
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            if (((x >> 1) & 1) != ((y >> 1) & 1)) continue;
            const int a = ((x >> 2) << 1) | (x & 1), b = ((y >> 2) << 1) | (y & 1);
            expected(x, y) = ms2(a, b);
        }
    EXPECT_LT((u - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OpUnitary, MatchesGeneratorOracleForRandomParameters) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 4;
        const HiddenMask hidden = n > 1 ? static_cast<HiddenMask>(trial % (1 << (n - 1))) << 1 : 0;
        const std::vector<NativeOp> ops = {op::ZRot{0, ang(rng)}, op::Collective{ang(rng), ang(rng)},
                                           op::MS{ang(rng), ang(rng)}};
        for (const NativeOp& op : ops) {
            const Matrix u = op_unitary(op, n, hidden).matrix();
            EXPECT_LT((u - oracle::op_unitary(op, n, hidden)).cwiseAbs().maxCoeff(), 1e-9) << op_name(op);
            EXPECT_LT((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff(), 1e-9);
            Vector v = Vector::Random(u.rows());
            Vector w = v;
            apply_op_inplace(w, n, op, hidden);
            EXPECT_LT((w - u * v).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(OpUnitary, HiddenQubitsSeeIdentity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    const HiddenMask hidden = 0b100;
    for (const NativeOp& op : {NativeOp{op::Collective{ang(rng), ang(rng)}}, NativeOp{op::MS{ang(rng), ang(rng)}},
                               NativeOp{op::ZRot{1, ang(rng)}}}) {
        const Matrix u = op_unitary(op, 3, hidden).matrix();
        // Hidden qubit 2 is the last tensor factor: U must be V (x) I.
        for (int x = 0; x < 8; ++x)
            for (int y = 0; y < 8; ++y)
                if ((x & 1) != (y & 1)) {
                    EXPECT_EQ(std::abs(u(x, y)), 0.0);
                }
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) EXPECT_NEAR(std::abs(u(2 * x, 2 * y) - u(2 * x + 1, 2 * y + 1)), 0.0, 1e-12);
    }
}

TEST(MS, PhaseShiftByPiIsExactlyTheSame) {
    for (double phi : {0.0, 0.4, 2.0})
        for (int n : {2, 3})
            EXPECT_TRUE(op_unitary(op::MS{phi, 0.9}, n).matrix().isApprox(op_unitary(op::MS{phi + kPi, 0.9}, n).matrix(),
                                                                         1e-13));
}

TEST(Collective, NegativeAngleEqualsShiftedPhase) {
    for (double phi : {0.0, 0.4, 2.0})
        EXPECT_LT(phase_free_distance(op_unitary(op::Collective{phi, -0.7}, 3).matrix(),
                                      op_unitary(op::Collective{phi + kPi, 0.7}, 3).matrix()),
                  1e-12);
}

TEST(MS, TwoQubitClosedForm) {
    for (double theta : {0.3, kPi / 2, 2.5}) {
        const double phi = 0.6;
        const Matrix sphi = std::cos(phi) * oracle::pauli_on(1, 0, 'X') + std::sin(phi) * oracle::pauli_on(1, 0, 'Y');
        const Matrix pp = kron(sphi, sphi);
        // S^2 = 2 + 2 s(x)s, so MS = e^{-i theta/2} (cos(theta/2) - i sin(theta/2) s(x)s).
        const Matrix closed = std::exp(Complex(0, -theta / 2)) *
                              (std::cos(theta / 2) * Matrix::Identity(4, 4) - Complex(0, 1) * std::sin(theta / 2) * pp);
        EXPECT_LT((op_unitary(op::MS{phi, theta}, 2).matrix() - closed).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Crosstalk, IdentityMatrixIsNominal) {
    const CrosstalkMatrix id = CrosstalkMatrix::identity(3);
    const Matrix a = zrot_with_crosstalk(op::ZRot{1, 0.8}, 3, 0, id).matrix();
    EXPECT_TRUE(a.isApprox(op_unitary(op::ZRot{1, 0.8}, 3).matrix(), 1e-15));
}

TEST(Crosstalk, NeighbourRotatedByMatrixElement) {
    Eigen::MatrixXd eps = Eigen::MatrixXd::Identity(3, 3);
    eps(1, 0) = 22.0 / 121.0;
    const CrosstalkMatrix xt(eps);
    const double theta = 1.3;
    const Matrix u = zrot_with_crosstalk(op::ZRot{1, theta}, 3, 0, xt).matrix();
    const Matrix expected = op_unitary(op::ZRot{0, theta * 22.0 / 121.0}, 3).matrix() *
                            op_unitary(op::ZRot{1, theta}, 3).matrix();
    EXPECT_LT((u - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((u - oracle::op_unitary(op::ZRot{1, theta}, 3, 0, &eps)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Crosstalk, DefaultNeighbourLeakIsThreePercent) {
    const CrosstalkMatrix xt = NoiseParams::table4().crosstalk_for(3);
    EXPECT_EQ(xt(0, 1), 0.03);
    EXPECT_EQ(xt(1, 0), 0.03);
    EXPECT_EQ(xt(0, 2), 0.0);
    EXPECT_EQ(xt(1, 1), 1.0);
    EXPECT_THROW(CrosstalkMatrix(Eigen::MatrixXd::Constant(2, 2, 2.0)), ValidationError);
}

TEST(RewriteNegativeMs, OddRegisterNeedsNoCorrection) {
    PulseSequence seq;
    seq.n_qubits = 3;
    seq.push(op::MS{0, -kPi / 2});
    const PulseSequence out = rewrite_negative_ms(seq);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_LT(phase_free_distance(sequence_unitary(seq).matrix(), sequence_unitary(out).matrix()), 1e-12);
    EXPECT_LT(phase_free_distance(oracle::sequence_unitary(out), oracle::sequence_unitary(seq)), 1e-9);
}

TEST(RewriteNegativeMs, EvenRegisterAppendsPiRotation) {
    PulseSequence seq;
    seq.n_qubits = 2;
    seq.push(op::MS{0, -kPi / 2});
    const PulseSequence out = rewrite_negative_ms(seq);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<op::Collective>(out.ops[1]));
    EXPECT_LT(phase_free_distance(oracle::sequence_unitary(out), oracle::sequence_unitary(seq)), 1e-9);
}

TEST(RewriteNegativeMs, RandomAnglesAndHiding) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> neg(-3 * kPi, -0.01), any(-kPi, kPi);
    for (int n : {2, 3})
        for (int trial = 0; trial < 10; ++trial) {
            PulseSequence seq;
            seq.n_qubits = n;
            seq.push(op::Collective{any(rng), any(rng)});
            seq.push(op::MS{any(rng), neg(rng)});
            seq.push(op::Hide{0});
            seq.push(op::MS{any(rng), neg(rng)});
            seq.push(op::Unhide{0});
            seq.push(op::ZRot{n - 1, any(rng)});
            const PulseSequence out = rewrite_negative_ms(seq);
            for (const NativeOp& op : out.ops)
                if (const auto* m = std::get_if<op::MS>(&op)) {
                    EXPECT_GE(m->theta, 0.0);
                }
            EXPECT_LT(phase_free_distance(sequence_unitary(seq).matrix(), sequence_unitary(out).matrix()), 1e-9);
        }
}

TEST(RewriteNegativeMs, LeavesNonNegativeSequencesAlone) {
    PulseSequence seq;
    seq.n_qubits = 2;
    seq.push(op::MS{0, kPi / 2});
    seq.push(op::ZRot{0, -1.0});
    const PulseSequence out = rewrite_negative_ms(seq);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(std::get<op::ZRot>(out.ops[1]).theta, -1.0);
}

TEST(AcStark, Examples) {
    EXPECT_EQ(ac_stark_shift(0.0, 1e7), 0.0);
    EXPECT_NEAR(ac_stark_shift(2 * kPi * 1e5, 2 * kPi * 2e7), -2 * kPi * 250.0, 1e-9);
    EXPECT_EQ(ac_stark_shift(3.0, 5.0), -ac_stark_shift(3.0, -5.0));
    EXPECT_THROW(ac_stark_shift(1.0, 0.0), ValidationError);
}

TEST(CrudeFidelity, Examples) {
    PulseSequence seq;
    seq.n_qubits = 4;
    EXPECT_EQ(crude_fidelity_estimate(seq, 4), 1.0);
    seq.push(op::Collective{0, 1.0});
    seq.push(op::ZRot{0, 1.0});
    EXPECT_NEAR(crude_fidelity_estimate(seq, 4), 0.990025, 1e-15);
    PulseSequence ms;
    ms.n_qubits = 4;
    ms.push(op::MS{0, kPi / 2});
    EXPECT_NEAR(crude_fidelity_estimate(ms, 4), 0.95, 1e-15);
}

TEST(GhzReference, TwoQubitsAndNorm) {
    const Vector g = ghz_reference(2, 0.0).amplitudes();
    EXPECT_NEAR(std::abs(g(0) - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(3) - Complex(0, -1) / std::sqrt(2.0)), 0.0, 1e-15);
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(ghz_reference(n, 0.3).amplitudes().norm(), 1.0, 1e-15);
}

TEST(GhzReference, ThreeQubitsNeedAnExtraCollectivePulse) {
    const Vector g = ghz_reference(3, 0.0).amplitudes();
    EXPECT_NEAR(ket_fidelity(g, run(3, {op::MS{0, kPi / 2}})), 0.125, 1e-12);
    EXPECT_NEAR(ket_fidelity(g, run(3, {op::MS{0, kPi / 2}, op::Collective{kPi, kPi / 2}})), 1.0, 1e-12);
}

TEST(Validate, RejectsBadSequences) {
    PulseSequence seq;
    seq.n_qubits = 2;
    seq.push(op::ZRot{2, 1.0});
    EXPECT_THROW(seq.validate(), ValidationError);
    PulseSequence hidden;
    hidden.n_qubits = 2;
    hidden.push(op::Hide{0});
    hidden.push(op::ZRot{0, 1.0});
    EXPECT_THROW(hidden.validate(), ValidationError);
    PulseSequence damp;
    damp.n_qubits = 1;
    damp.push(op::PhaseDamp{0, 1.5});
    EXPECT_THROW(damp.validate(), ValidationError);
}

}  // namespace
}  // namespace tiqc
