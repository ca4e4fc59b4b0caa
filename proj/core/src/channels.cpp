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

#include "tiqc/channels.hpp"

#include <cmath>

namespace tiqc {
namespace {

constexpr double kBranchFloor = 1e-15;

void check_gamma(double gamma) {
    require(std::isfinite(gamma) && gamma >= 0.0 && gamma <= 1.0, "gamma outside [0, 1]");
}

Matrix projector_on(int n, int ion, int outcome) {
    Mat2 p = Mat2::Zero();
    p(outcome, outcome) = 1.0;
    return embed_1q(p, n, ion);
}

}  // namespace

double KrausChannel::completeness_error() const {
    Mat2 sum = Mat2::Zero();
    for (const Mat2& e : kraus_ops) sum += e.adjoint() * e;
    return (sum - Mat2::Identity()).cwiseAbs().maxCoeff();
}

ProcessMap KrausChannel::embedded(int n, int ion) const {
    ProcessMap map;
    for (const Mat2& e : kraus_ops) map.kraus.push_back(embed_1q(e, n, ion));
    return map;
}

KrausChannel phase_damp_channel(double gamma) {
    check_gamma(gamma);
    Mat2 e0 = Mat2::Zero(), e1 = Mat2::Zero();
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - gamma);
    e1(1, 1) = std::sqrt(gamma);
    return KrausChannel{{e0, e1}};
}

KrausChannel amp_damp_channel(double gamma, int target) {
    check_gamma(gamma);
    require(target == 0 || target == 1, "damping target must be 0 or 1");
    const int other = 1 - target;
    Mat2 e0 = Mat2::Zero(), e1 = Mat2::Zero();
    e0(target, target) = 1.0;
    e0(other, other) = std::sqrt(1.0 - gamma);
    e1(target, other) = std::sqrt(gamma);
    return KrausChannel{{e0, e1}};
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, int ion) {
    const int n = rho.n_qubits();
    require(ion >= 0 && ion < n, "channel target out of range");
    require(ch.completeness_error() <= kInvariantTol, "Kraus operators are not complete");
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Matrix out = Matrix::Zero(d, d);
    for (const Mat2& e : ch.kraus_ops) {
        const Matrix big = embed_1q(e, n, ion);
        out += big * rho.matrix() * big.adjoint();
    }
    return DensityMatrix::trusted(std::move(out));
}

HiddenMask check_spectators(int n, int ion, HiddenMask hidden, Strictness mode) {
    require(ion >= 0 && ion < n, "measured ion out of range");
    require(!is_hidden(hidden, ion), "cannot measure hidden ion " + std::to_string(ion + 1));
    HiddenMask exposed = 0;
    for (int q = 0; q < n; ++q)
        if (q != ion && !is_hidden(hidden, q)) exposed |= HiddenMask{1} << q;
    if (exposed != 0 && mode == Strictness::Strict)
        throw ValidationError("measuring ion " + std::to_string(ion + 1) +
                              " while other ions are not hidden (strict mode)");
    return mode == Strictness::Strict ? 0 : exposed;
}

std::array<std::optional<MeasureBranch<PureState>>, 2> measure_branches(const PureState& psi, int ion,
                                                                        HiddenMask hidden) {
    const int n = psi.n_qubits();
    require(ion >= 0 && ion < n, "measured ion out of range");
    require(!is_hidden(hidden, ion), "cannot measure hidden ion " + std::to_string(ion + 1));
    std::array<std::optional<MeasureBranch<PureState>>, 2> out;
    for (int b = 0; b < 2; ++b) {
        Vector v = psi.amplitudes();
        for (Eigen::Index x = 0; x < v.size(); ++x)
            if (bit_of(static_cast<std::size_t>(x), n, ion) != b) v(x) = 0.0;
        const double p = v.squaredNorm();
        if (p > kBranchFloor) out[b] = MeasureBranch<PureState>{b, p, PureState(std::move(v))};
    }
    return out;
}

std::array<std::optional<MeasureBranch<DensityMatrix>>, 2> measure_branches(const DensityMatrix& rho, int ion,
                                                                            HiddenMask hidden) {
    const int n = rho.n_qubits();
    require(ion >= 0 && ion < n, "measured ion out of range");
    require(!is_hidden(hidden, ion), "cannot measure hidden ion " + std::to_string(ion + 1));
    std::array<std::optional<MeasureBranch<DensityMatrix>>, 2> out;
    for (int b = 0; b < 2; ++b) {
        const Matrix p = projector_on(n, ion, b);
        Matrix post = p * rho.matrix() * p;
        const double prob = post.trace().real();
        if (prob > kBranchFloor) out[b] = MeasureBranch<DensityMatrix>{b, prob, DensityMatrix::trusted(post / prob)};
    }
    return out;
}

namespace {
template <class State>
MeasureBranch<State> pick(std::array<std::optional<MeasureBranch<State>>, 2> br, std::mt19937_64& rng) {
    if (!br[0]) return std::move(*br[1]);
    if (!br[1]) return std::move(*br[0]);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p0 = br[0]->probability / (br[0]->probability + br[1]->probability);
    return u(rng) < p0 ? std::move(*br[0]) : std::move(*br[1]);
}
}  // namespace

MeasureBranch<PureState> measure_sample(const PureState& psi, int ion, std::mt19937_64& rng, HiddenMask hidden) {
    return pick(measure_branches(psi, ion, hidden), rng);
}

MeasureBranch<DensityMatrix> measure_sample(const DensityMatrix& rho, int ion, std::mt19937_64& rng,
                                            HiddenMask hidden) {
    return pick(measure_branches(rho, ion, hidden), rng);
}

DensityMatrix dephase_qubits(const DensityMatrix& rho, HiddenMask mask) {
    DensityMatrix out = rho;
    const KrausChannel full = phase_damp_channel(1.0);
    for (int q = 0; q < rho.n_qubits(); ++q)
        if (is_hidden(mask, q)) out = apply_channel(out, full, q);
    return out;
}

DensityMatrix reset_ion(const DensityMatrix& rho, int ion, int target) {
    return apply_channel(rho, amp_damp_channel(1.0, target), ion);
}

PureState reset_ion(const PureState& psi, int ion, std::mt19937_64& rng, int target) {
    require(target == 0 || target == 1, "reset target must be 0 or 1");
    MeasureBranch<PureState> b = measure_sample(psi, ion, rng);
    if (b.outcome == target) return b.state;
    Mat2 x;
    x << 0.0, 1.0, 1.0, 0.0;
    return PureState(embed_1q(x, psi.n_qubits(), ion) * b.state.amplitudes());
}

}  // namespace tiqc
