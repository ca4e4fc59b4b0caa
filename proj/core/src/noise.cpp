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

#include "tiqc/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tiqc/characterization.hpp"

namespace tiqc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double gauss(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

void apply_collective_phase(Vector& amp, int n, double phase) {
    if (phase == 0.0) return;
    // diag(e^{i phase}, 1) on every ion: the phase counts the ions in |0>.
    for (Eigen::Index x = 0; x < amp.size(); ++x) {
        int zeros = 0;
        for (int q = 0; q < n; ++q) zeros += bit_of(static_cast<std::size_t>(x), n, q) ? 0 : 1;
        if (zeros) amp(x) *= std::exp(kI * phase * static_cast<double>(zeros));
    }
}

void flip_qubit(Vector& amp, int n, int q) {
    Mat2 x;
    x << 0.0, 1.0, 1.0, 0.0;
    apply_1q_inplace(amp, n, q, x);
}

void normalize(Vector& amp) {
    const double nn = amp.norm();
    require(nn > 0.0, "trajectory state collapsed to zero norm");
    amp /= nn;
}

double scaled(double theta, double eps) { return theta * (1.0 + eps); }

std::uint64_t cached_threshold(const NoiseParams& p) {
    struct Entry {
        std::array<double, 4> key;
        std::uint64_t threshold;
    };
    thread_local std::optional<Entry> last;
    const std::array<double, 4> key = {p.detect_bright_rate, p.detect_dark_rate, p.detect_time, p.tau1};
    if (!last || last->key != key) last = Entry{key, detection_error(p).threshold};
    return last->threshold;
}

}  // namespace

// ------------------------------------------------------------- NoiseSource

std::string to_string(NoiseSource s) {
    switch (s) {
        case NoiseSource::Dephasing: return "dephasing";
        case NoiseSource::Intensity: return "intensity";
        case NoiseSource::Crosstalk: return "crosstalk";
        case NoiseSource::Spectator: return "spectator";
        case NoiseSource::Decay: return "decay";
        case NoiseSource::Prep: return "prep";
        case NoiseSource::Detection: return "detection";
    }
    return "?";
}

NoiseSource parse_noise_source(const std::string& name) {
    for (NoiseSource s : all_noise_sources())
        if (to_string(s) == name) return s;
    throw ValidationError("unknown noise source '" + name + "'");
}

const std::vector<NoiseSource>& all_noise_sources() {
    static const std::vector<NoiseSource> all = {NoiseSource::Dephasing, NoiseSource::Intensity,
                                                 NoiseSource::Crosstalk, NoiseSource::Spectator,
                                                 NoiseSource::Decay,     NoiseSource::Prep,
                                                 NoiseSource::Detection};
    return all;
}

// ------------------------------------------------------------- OpDurations

double OpDurations::of(const NativeOp& op) const {
    return std::visit(overloaded{
                          [&](const op::ZRot& z) { return zrot_per_pi * std::abs(z.theta) / kPi; },
                          [&](const op::ConditionalZRot& z) { return zrot_per_pi * std::abs(z.theta) / kPi; },
                          [&](const op::Collective& r) { return collective_per_pi * std::abs(r.theta) / kPi; },
                          [&](const op::MS& m) { return ms_per_half_pi * std::abs(m.theta) / (kPi / 2.0); },
                          [&](const op::Hide&) { return hide; },
                          [&](const op::Unhide&) { return hide; },
                          [&](const op::PhaseDamp&) { return damp; },
                          [&](const op::AmpDamp&) { return damp; },
                          [&](const op::Measure&) { return measure; },
                          [&](const op::Recool& r) { return r.duration; },
                          [&](const op::Idle& i) { return i.duration; },
                          [&](const op::Frame&) { return 0.0; },
                      },
                      op);
}

// ------------------------------------------------------------- NoiseParams

NoiseParams NoiseParams::noiseless() { return NoiseParams{}; }

NoiseParams NoiseParams::table4() {
    NoiseParams p;
    p.sources = {NoiseSource::Dephasing, NoiseSource::Intensity, NoiseSource::Crosstalk, NoiseSource::Spectator};
    return p;
}

NoiseParams NoiseParams::with_only(std::set<NoiseSource> s) const {
    NoiseParams p = *this;
    p.sources = std::move(s);
    return p;
}

CrosstalkMatrix NoiseParams::crosstalk_for(int n) const {
    if (crosstalk) {
        require(crosstalk->size() == n, "configured crosstalk matrix does not match register size");
        return *crosstalk;
    }
    return CrosstalkMatrix::nearest_neighbor(n, crosstalk_neighbor);
}

void NoiseParams::validate() const {
    auto positive = [](double v, const char* name) {
        require(v > 0.0 && !std::isnan(v), std::string(name) + " must be > 0");
    };
    auto prob = [](double v, const char* name) {
        require(v >= 0.0 && v <= 1.0, std::string(name) + " must lie in [0, 1]");
    };
    auto nonneg = [](double v, const char* name) {
        require(v >= 0.0 && std::isfinite(v), std::string(name) + " must be >= 0");
    };
    positive(tau_coh, "tau_coh");
    positive(tau_corr, "tau_corr");
    positive(tau1, "tau1");
    nonneg(intensity_rel_fluct, "intensity_rel_fluct");
    nonneg(spectator_rel_fluct, "spectator_rel_fluct");
    prob(crosstalk_neighbor, "crosstalk_neighbor");
    prob(pump_fidelity, "pump_fidelity");
    nonneg(detect_bright_rate, "detect_bright_rate");
    nonneg(detect_dark_rate, "detect_dark_rate");
    nonneg(detect_time, "detect_time");
    for (double d : {durations.zrot_per_pi, durations.collective_per_pi, durations.ms_per_half_pi, durations.hide,
                     durations.damp, durations.measure, durations.recool})
        nonneg(d, "op duration");
}

double NoiseParams::detuning_sigma() const {
    const double r = tau_coh / tau_corr;
    // Var(phase over T) = 2 s^2 tc^2 (T/tc - 1 + e^{-T/tc}); setting it to 2
    // at T = tau_coh gives Ramsey contrast exp(-1).
    const double s2 = 1.0 / (tau_corr * tau_corr * (r - 1.0 + std::exp(-r)));
    return std::sqrt(s2);
}

KeyValueConfig NoiseParams::to_config() const {
    KeyValueConfig c;
    c.set("tau_coh", tau_coh);
    c.set("tau_corr", tau_corr);
    c.set("intensity_rel_fluct", intensity_rel_fluct);
    c.set("spectator_rel_fluct", spectator_rel_fluct);
    c.set("crosstalk_neighbor", crosstalk_neighbor);
    if (crosstalk) {
        std::string v;
        const auto& m = crosstalk->matrix();
        for (Eigen::Index i = 0; i < m.size(); ++i) v += (i ? "," : "") + format_double(m(i / m.cols(), i % m.cols()));
        c.set("crosstalk_matrix", v);
    }
    c.set("tau1", tau1);
    c.set("pump_fidelity", pump_fidelity);
    c.set("detect_bright_rate", detect_bright_rate);
    c.set("detect_dark_rate", detect_dark_rate);
    c.set("detect_time", detect_time);
    c.set("duration.zrot_per_pi", durations.zrot_per_pi);
    c.set("duration.collective_per_pi", durations.collective_per_pi);
    c.set("duration.ms_per_half_pi", durations.ms_per_half_pi);
    c.set("duration.hide", durations.hide);
    c.set("duration.damp", durations.damp);
    c.set("duration.measure", durations.measure);
    c.set("duration.recool", durations.recool);
    std::string src;
    for (NoiseSource s : all_noise_sources())
        if (enabled(s)) src += (src.empty() ? "" : ",") + to_string(s);
    c.set("sources", src);
    c.set("measure_mode", measure_mode == Strictness::Strict ? std::string("strict") : std::string("permissive"));
    return c;
}

NoiseParams NoiseParams::from_config(const KeyValueConfig& cfg) {
    static const std::set<std::string> known = {
        "tau_coh", "tau_corr", "intensity_rel_fluct", "spectator_rel_fluct", "crosstalk_neighbor",
        "crosstalk_matrix", "tau1", "pump_fidelity", "detect_bright_rate", "detect_dark_rate", "detect_time",
        "duration.zrot_per_pi", "duration.collective_per_pi", "duration.ms_per_half_pi", "duration.hide",
        "duration.damp", "duration.measure", "duration.recool", "sources", "measure_mode"};
    for (const std::string& k : cfg.keys()) require(known.count(k) != 0, "unknown noise config key '" + k + "'");
    NoiseParams p;
    p.tau_coh = cfg.get_double("tau_coh", p.tau_coh);
    p.tau_corr = cfg.get_double("tau_corr", p.tau_corr);
    p.intensity_rel_fluct = cfg.get_double("intensity_rel_fluct", p.intensity_rel_fluct);
    p.spectator_rel_fluct = cfg.get_double("spectator_rel_fluct", p.spectator_rel_fluct);
    p.crosstalk_neighbor = cfg.get_double("crosstalk_neighbor", p.crosstalk_neighbor);
    if (cfg.has("crosstalk_matrix")) {
        const std::vector<double> v = cfg.get_doubles("crosstalk_matrix");
        const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
        require(n >= 1 && static_cast<std::size_t>(n * n) == v.size(), "crosstalk_matrix must hold n*n values");
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n * n; ++i) m(i / n, i % n) = v[static_cast<std::size_t>(i)];
        p.crosstalk = CrosstalkMatrix(m);
    }
    p.tau1 = cfg.get_double("tau1", p.tau1);
    p.pump_fidelity = cfg.get_double("pump_fidelity", p.pump_fidelity);
    p.detect_bright_rate = cfg.get_double("detect_bright_rate", p.detect_bright_rate);
    p.detect_dark_rate = cfg.get_double("detect_dark_rate", p.detect_dark_rate);
    p.detect_time = cfg.get_double("detect_time", p.detect_time);
    p.durations.zrot_per_pi = cfg.get_double("duration.zrot_per_pi", p.durations.zrot_per_pi);
    p.durations.collective_per_pi = cfg.get_double("duration.collective_per_pi", p.durations.collective_per_pi);
    p.durations.ms_per_half_pi = cfg.get_double("duration.ms_per_half_pi", p.durations.ms_per_half_pi);
    p.durations.hide = cfg.get_double("duration.hide", p.durations.hide);
    p.durations.damp = cfg.get_double("duration.damp", p.durations.damp);
    p.durations.measure = cfg.get_double("duration.measure", p.durations.measure);
    p.durations.recool = cfg.get_double("duration.recool", p.durations.recool);
    for (const std::string& s : cfg.get_list("sources")) p.sources.insert(parse_noise_source(s));
    if (auto m = cfg.get("measure_mode")) {
        require(*m == "strict" || *m == "permissive", "measure_mode must be strict or permissive");
        p.measure_mode = *m == "strict" ? Strictness::Strict : Strictness::Permissive;
    }
    p.validate();
    return p;
}

// -------------------------------------------------------- DephasingProcess

DephasingProcess::DephasingProcess(const NoiseParams& p, std::mt19937_64& rng)
    : tau_c_(p.tau_corr), sigma2_(std::pow(p.detuning_sigma(), 2)), x_(std::sqrt(sigma2_) * gauss(rng)) {}

double DephasingProcess::advance(double duration, std::mt19937_64& rng) {
    require(duration >= 0.0, "negative dephasing interval");
    const double z1 = gauss(rng);
    const double z2 = gauss(rng);
    if (duration == 0.0) return 0.0;
    // Exact conditional law of (x(t+d), int_t^{t+d} x) given x(t).
    const double a = std::exp(-duration / tau_c_);
    const double r = duration / tau_c_;
    const double mean_x = a * x_;
    const double mean_i = tau_c_ * (1.0 - a) * x_;
    const double var_x = sigma2_ * (1.0 - a * a);
    // 2r - 3 + 4a - a^2 cancels badly for small r; use its series there.
    const double poly = r < 1e-3 ? r * r * r * (2.0 / 3.0 - r / 2.0 + 7.0 * r * r / 30.0)
                                 : 2.0 * r - 3.0 + 4.0 * a - a * a;
    const double var_i = sigma2_ * tau_c_ * tau_c_ * std::max(0.0, poly);
    const double cov = sigma2_ * tau_c_ * std::pow(-std::expm1(-r), 2);
    const double l11 = std::sqrt(var_x);
    const double l21 = l11 > 0.0 ? cov / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, var_i - l21 * l21));
    x_ = mean_x + l11 * z1;
    return mean_i + l21 * z1 + l22 * z2;
}

double sample_dephasing_phase(const NoiseParams& p, double duration, std::mt19937_64& rng) {
    DephasingProcess proc(p, rng);
    return proc.advance(duration, rng);
}

PureState sample_decay(const PureState& psi, const NoiseParams& p, double duration, std::mt19937_64& rng) {
    Vector amp = psi.amplitudes();
    const int n = psi.n_qubits();
    const double gamma = std::isinf(p.tau1) ? 0.0 : -std::expm1(-duration / p.tau1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < n; ++q) {
        const double r = u(rng);
        if (gamma == 0.0) continue;
        const std::size_t mask = qubit_mask(n, q);
        double p0 = 0.0;
        for (Eigen::Index x = 0; x < amp.size(); ++x)
            if (!(static_cast<std::size_t>(x) & mask)) p0 += std::norm(amp(x));
        if (r < gamma * p0) {
            // Jump |0> -> |1> on this ion.
            Vector out = Vector::Zero(amp.size());
            for (Eigen::Index x = 0; x < amp.size(); ++x)
                if (!(static_cast<std::size_t>(x) & mask))
                    out(static_cast<Eigen::Index>(static_cast<std::size_t>(x) | mask)) = amp(x);
            amp = std::move(out);
        } else {
            const double k = std::sqrt(1.0 - gamma);
            for (Eigen::Index x = 0; x < amp.size(); ++x)
                if (!(static_cast<std::size_t>(x) & mask)) amp(x) *= k;
        }
        normalize(amp);
    }
    return PureState(std::move(amp));
}

std::uint64_t detection_sample(bool bright, const NoiseParams& p, std::mt19937_64& rng) {
    const double t = p.detect_time;
    std::exponential_distribution<double> jump(std::isinf(p.tau1) ? 1.0 : 1.0 / p.tau1);
    const double tj = jump(rng);
    double mean = 0.0;
    if (bright)
        mean = p.detect_bright_rate * t;
    else if (!std::isinf(p.tau1) && tj < t)
        mean = p.detect_dark_rate * tj + p.detect_bright_rate * (t - tj);
    else
        mean = p.detect_dark_rate * t;
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> pois(mean);
    return pois(rng);
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                     0x7469u};
    return std::mt19937_64(sq);
}

// -------------------------------------------------------------- trajectory

Trajectory run_trajectory(const PulseSequence& seq, const NoiseParams& p, std::uint64_t traj_index,
                          std::uint64_t seed, const std::optional<PureState>& initial) {
    seq.validate();
    p.validate();
    const int n = seq.n_qubits;
    require(n <= 10, "trajectory simulation supports at most 10 ions");
    std::mt19937_64 rng = trajectory_rng(seed, traj_index);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    Vector amp;
    if (initial) {
        require(initial->n_qubits() == n, "initial state size does not match sequence");
        amp = initial->amplitudes();
    } else {
        amp = PureState::basis(n, 0).amplitudes();
    }

    // Per-trajectory draws, always taken in the same order.
    std::vector<double> prep_u(static_cast<std::size_t>(n));
    for (double& u : prep_u) u = uni(rng);
    const double eps_i = gauss(rng) * p.intensity_rel_fluct;
    double eps_s = gauss(rng) * p.spectator_rel_fluct;
    DephasingProcess deph(p, rng);

    const bool use_deph = p.enabled(NoiseSource::Dephasing);
    const bool use_int = p.enabled(NoiseSource::Intensity);
    const bool use_spec = p.enabled(NoiseSource::Spectator);
    const bool use_decay = p.enabled(NoiseSource::Decay);
    const bool use_det = p.enabled(NoiseSource::Detection);
    const std::optional<CrosstalkMatrix> xt =
        p.enabled(NoiseSource::Crosstalk) ? std::optional<CrosstalkMatrix>(p.crosstalk_for(n)) : std::nullopt;
    const double ei = use_int ? eps_i : 0.0;
    auto es = [&] { return use_spec ? eps_s : 0.0; };

    if (p.enabled(NoiseSource::Prep))
        for (int q = 0; q < n; ++q)
            if (prep_u[static_cast<std::size_t>(q)] < 1.0 - p.pump_fidelity) flip_qubit(amp, n, q);

    std::optional<std::uint64_t> threshold;
    if (use_det) threshold = cached_threshold(p);

    std::vector<int> cbits(static_cast<std::size_t>(seq.classical_bits()), -1);
    HiddenMask hidden = 0;

    auto evolve_noise = [&](double duration) {
        const double ph = deph.advance(duration, rng);
        if (use_deph) apply_collective_phase(amp, n, ph);
    };
    auto decay = [&](double duration) {
        if (!use_decay) return;
        amp = sample_decay(PureState(amp), p, duration, rng).amplitudes();
    };

    for (const NativeOp& o : seq.ops) {
        const double d = p.durations.of(o);
        evolve_noise(d / 2.0);
        std::visit(overloaded{
                       [&](const op::ZRot& z) {
                           apply_op_inplace(amp, n, op::ZRot{z.ion, scaled(z.theta, ei)}, hidden, xt ? &*xt : nullptr);
                       },
                       [&](const op::Collective& r) {
                           apply_op_inplace(amp, n, op::Collective{r.phi, scaled(r.theta, ei + es())}, hidden);
                       },
                       [&](const op::MS& m) {
                           apply_op_inplace(amp, n, op::MS{m.phi, scaled(m.theta, ei + es())}, hidden);
                       },
                       [&](const op::Frame& f) { apply_op_inplace(amp, n, f, hidden); },
                       [&](const op::Hide& h) { hidden |= HiddenMask{1} << h.ion; },
                       [&](const op::Unhide& h) { hidden &= ~(HiddenMask{1} << h.ion); },
                       [&](const op::PhaseDamp& pd) {
                           // Unravelled as a random projective kick on |1>.
                           const double r = uni(rng);
                           const std::size_t mask = qubit_mask(n, pd.ion);
                           double p1 = 0.0;
                           for (Eigen::Index x = 0; x < amp.size(); ++x)
                               if (static_cast<std::size_t>(x) & mask) p1 += std::norm(amp(x));
                           const bool jump = r < pd.gamma * p1;
                           for (Eigen::Index x = 0; x < amp.size(); ++x) {
                               const bool one = static_cast<std::size_t>(x) & mask;
                               if (jump && !one) amp(x) = 0.0;
                               if (!jump && one) amp(x) *= std::sqrt(1.0 - pd.gamma);
                           }
                           normalize(amp);
                       },
                       [&](const op::AmpDamp& ad) {
                           const double r = uni(rng);
                           const std::size_t mask = qubit_mask(n, ad.ion);
                           const bool from_one = ad.target == 0;  // population source
                           double ps = 0.0;
                           for (Eigen::Index x = 0; x < amp.size(); ++x)
                               if (static_cast<bool>(static_cast<std::size_t>(x) & mask) == from_one)
                                   ps += std::norm(amp(x));
                           if (r < ad.gamma * ps) {
                               Vector out = Vector::Zero(amp.size());
                               for (Eigen::Index x = 0; x < amp.size(); ++x) {
                                   const auto ux = static_cast<std::size_t>(x);
                                   if (static_cast<bool>(ux & mask) == from_one)
                                       out(static_cast<Eigen::Index>(ux ^ mask)) = amp(x);
                               }
                               amp = std::move(out);
                           } else {
                               for (Eigen::Index x = 0; x < amp.size(); ++x)
                                   if (static_cast<bool>(static_cast<std::size_t>(x) & mask) == from_one)
                                       amp(x) *= std::sqrt(1.0 - ad.gamma);
                           }
                           normalize(amp);
                       },
                       [&](const op::Measure& m) {
                           const HiddenMask exposed = check_spectators(n, m.ion, hidden, p.measure_mode);
                           PureState cur(amp);
                           for (int q = 0; q < n; ++q)
                               if (is_hidden(exposed, q)) cur = measure_sample(cur, q, rng, hidden).state;
                           MeasureBranch<PureState> b = measure_sample(cur, m.ion, rng, hidden);
                           int bit = b.outcome;
                           if (use_det) bit = detection_sample(bit == 1, p, rng) >= *threshold ? 1 : 0;
                           cbits[static_cast<std::size_t>(m.cbit)] = bit;
                           amp = b.state.amplitudes();
                       },
                       [&](const op::ConditionalZRot& c) {
                           const int bit = cbits[static_cast<std::size_t>(c.cbit)];
                           if ((bit == 1) != c.negate)
                               apply_op_inplace(amp, n, op::ZRot{c.ion, scaled(c.theta, ei)}, hidden,
                                                xt ? &*xt : nullptr);
                       },
                       [&](const op::Recool&) { eps_s = gauss(rng) * p.spectator_rel_fluct; },
                       [&](const op::Idle&) {},
                   },
                   o);
        evolve_noise(d / 2.0);
        decay(d);
    }
    return Trajectory{PureState(std::move(amp)), std::move(cbits)};
}

// ---------------------------------------------------------------- simulate

SimResult simulate(const PulseSequence& seq, const NoiseParams& p, std::size_t n_traj, std::uint64_t seed,
                   const SimOptions& opts) {
    require(n_traj >= 1, "n_traj must be at least 1");
    seq.validate();
    p.validate();
    std::vector<std::optional<Trajectory>> results(n_traj);
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_traj));

    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t i = w; i < n_traj; i += workers)
                results[i] = run_trajectory(seq, p, i, seed, opts.initial);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Summation in index order keeps the result independent of scheduling.
    const auto d = static_cast<Eigen::Index>(dim_for(seq.n_qubits));
    Matrix rho = Matrix::Zero(d, d);
    std::vector<std::vector<int>> bits;
    bits.reserve(n_traj);
    for (auto& r : results) {
        const Vector& a = r->state.amplitudes();
        rho.noalias() += a * a.adjoint();
        bits.push_back(std::move(r->cbits));
    }
    rho /= static_cast<double>(n_traj);
    return SimResult{DensityMatrix::trusted(std::move(rho)), std::move(bits), n_traj, seed, seq.name};
}

std::string SimResult::to_json() const {
    nlohmann::json j;
    j["sequence"] = sequence_name;
    j["n_qubits"] = density.n_qubits();
    j["n_traj"] = n_traj;
    j["seed"] = seed;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < density.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < density.dim(); ++c) row.push_back({density(r, c).real(), density(r, c).imag()});
        rows.push_back(row);
    }
    j["density"] = rows;
    j["populations"] = measure_probabilities(density).values();
    j["classical_bits"] = classical_bits;
    return j.dump(2);
}

std::string SimResult::to_csv() const {
    std::ostringstream out;
    out << "# sequence=" << sequence_name << " n_traj=" << n_traj << " seed=" << seed << "\n";
    out << "row,col,real,imag\n";
    for (std::size_t r = 0; r < density.dim(); ++r)
        for (std::size_t c = 0; c < density.dim(); ++c)
            out << r << ',' << c << ',' << format_double(density(r, c).real()) << ','
                << format_double(density(r, c).imag()) << '\n';
    return out.str();
}

// ------------------------------------------------------------------- exact

ExactResult evaluate_exact(const PulseSequence& seq, const DensityMatrix& initial, Strictness mode) {
    seq.validate();
    const int n = seq.n_qubits;
    require(initial.n_qubits() == n, "initial state size does not match sequence");
    struct Branch {
        std::vector<int> bits;
        Matrix rho;  // unnormalized, trace = branch probability
    };
    std::vector<Branch> branches{{std::vector<int>(static_cast<std::size_t>(seq.classical_bits()), -1),
                                  initial.matrix()}};
    HiddenMask hidden = 0;
    auto conj = [](const Matrix& u, Matrix& r) { r = u * r * u.adjoint(); };
    auto channel = [&](const KrausChannel& ch, int ion) {
        std::vector<Matrix> ks;
        for (const Mat2& e : ch.kraus_ops) ks.push_back(embed_1q(e, n, ion));
        for (Branch& b : branches) {
            Matrix out = Matrix::Zero(b.rho.rows(), b.rho.cols());
            for (const Matrix& k : ks) out += k * b.rho * k.adjoint();
            b.rho = std::move(out);
        }
    };
    for (const NativeOp& o : seq.ops) {
        if (is_coherent(o)) {
            const Matrix u = op_unitary(o, n, hidden).matrix();
            for (Branch& b : branches) conj(u, b.rho);
            continue;
        }
        std::visit(overloaded{
                       [&](const op::Hide& h) { hidden |= HiddenMask{1} << h.ion; },
                       [&](const op::Unhide& h) { hidden &= ~(HiddenMask{1} << h.ion); },
                       [&](const op::PhaseDamp& pd) { channel(phase_damp_channel(pd.gamma), pd.ion); },
                       [&](const op::AmpDamp& ad) { channel(amp_damp_channel(ad.gamma, ad.target), ad.ion); },
                       [&](const op::Measure& m) {
                           const HiddenMask exposed = check_spectators(n, m.ion, hidden, mode);
                           for (int q = 0; q < n; ++q)
                               if (is_hidden(exposed, q)) channel(phase_damp_channel(1.0), q);
                           std::vector<Branch> next;
                           for (Branch& b : branches)
                               for (int bit = 0; bit < 2; ++bit) {
                                   Mat2 pr = Mat2::Zero();
                                   pr(bit, bit) = 1.0;
                                   const Matrix big = embed_1q(pr, n, m.ion);
                                   Matrix r = big * b.rho * big.adjoint();
                                   if (r.trace().real() <= 1e-15) continue;
                                   Branch nb{b.bits, std::move(r)};
                                   nb.bits[static_cast<std::size_t>(m.cbit)] = bit;
                                   next.push_back(std::move(nb));
                               }
                           branches = std::move(next);
                       },
                       [&](const op::ConditionalZRot& c) {
                           const Matrix u = op_unitary(op::ZRot{c.ion, c.theta}, n, hidden).matrix();
                           for (Branch& b : branches)
                               if ((b.bits[static_cast<std::size_t>(c.cbit)] == 1) != c.negate) conj(u, b.rho);
                       },
                       [&](const auto&) {},
                   },
                   o);
    }
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Matrix total = Matrix::Zero(d, d);
    std::map<std::vector<int>, double> rec;
    for (const Branch& b : branches) {
        total += b.rho;
        rec[b.bits] += b.rho.trace().real();
    }
    ExactResult out{DensityMatrix::trusted(total / total.trace().real()), {}};
    for (auto& [bits, prob] : rec) out.records.emplace_back(bits, prob);
    return out;
}

ExactResult evaluate_exact(const PulseSequence& seq, Strictness mode) {
    return evaluate_exact(seq, PureState::basis(seq.n_qubits, 0).projector(), mode);
}

// ------------------------------------------------------------------ budget

std::vector<BudgetRow> error_budget(const PulseSequence& seq, const NoiseParams& p,
                                    const std::vector<NoiseSource>& sources, std::size_t n_traj,
                                    std::uint64_t seed, const SimOptions& opts) {
    require(!sources.empty(), "error budget needs at least one noise source");
    const DensityMatrix init = opts.initial ? opts.initial->projector() : PureState::basis(seq.n_qubits, 0).projector();
    const DensityMatrix ideal = evaluate_exact(seq, init, p.measure_mode).density;
    std::vector<BudgetRow> rows;
    for (NoiseSource s : sources) {
        const SimResult r = simulate(seq, p.with_only({s}), n_traj, seed, opts);
        rows.push_back({to_string(s), state_fidelity(ideal, r.density)});
    }
    const SimResult all = simulate(seq, p.with_only({sources.begin(), sources.end()}), n_traj, seed, opts);
    rows.push_back({"all", state_fidelity(ideal, all.density)});
    return rows;
}

}  // namespace tiqc
