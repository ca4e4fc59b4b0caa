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

#include "tiqc/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace tiqc {
namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kRelTol = 1e-8;
constexpr int kMaxZeroEdges = 400;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

enum class Filter { Ramsey, Echo };

// Filter averaged over one period of its oscillation.
double mean_kernel(Filter f, double w) {
    if (f == Filter::Ramsey) return 0.5 / (w * w);
    return 0.375 * 4.0 / (w * w);
}

double kernel(Filter f, double w, double t) {
    if (f == Filter::Ramsey) {
        const double x = w * t / 2.0;
        const double s = sinc(x);
        return t * t / 4.0 * s * s;
    }
    const double y = w * t / 4.0;
    const double s = std::sin(y) * sinc(y);
    return t * t / 4.0 * s * s;
}

ContrastDetail contrast_detail(Filter f, double t, const NoiseSpectrumModel& m) {
    require(std::isfinite(t) && t >= 0.0, "wait time must be finite and non-negative");
    m.validate();
    const double g = kTwoPi * m.gamma;
    const double s = kTwoPi * m.sigma;
    const double c0 = kTwoPi * m.nu0;
    const double c1 = kTwoPi * m.nu1;
    const double c2 = kTwoPi * m.nu2;
    double cutoff = kTwoPi * 5e3;
    if (t > 0.0) cutoff = std::max(cutoff, 10.0 / t);
    cutoff = std::max({cutoff, c0 + 1e3 * g, c1 + 12.0 * s, c2 + 12.0 * s});
    const double tail_factor = f == Filter::Ramsey ? 1.0 : 4.0;
    const double tail_bound =
        tail_factor * m.alpha * m.alpha * std::pow(g, 4) / (5.0 * std::pow(cutoff - c0, 5));
    if (t == 0.0) return ContrastDetail{1.0, 0.0, cutoff, 0.0, 0.0};

    // Panel edges: spectral features plus every zero of the filter.
    std::vector<double> edges = {0.0, cutoff};
    for (double k : {0.5, 1.0, 2.0, 4.0, 10.0, 30.0, 100.0}) edges.push_back(c0 + k * g);
    for (double c : {c1, c2})
        for (double k : {-6.0, -3.0, -1.5, 0.0, 1.5, 3.0, 6.0}) edges.push_back(c + k * s);
    const double period = (f == Filter::Ramsey ? 2.0 : 4.0) * kPi / t;
    double w = period;
    for (int k = 0; k < kMaxZeroEdges && w < cutoff; ++k, w += period) edges.push_back(w);
    // Past the last resolved zero the filter is replaced by its period average.
    const double averaged_from = std::min(w, cutoff);
    for (; w < cutoff; w *= 2.0) edges.push_back(w);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::remove_if(edges.begin(), edges.end(), [&](double e) { return e < 0.0 || e > cutoff; }),
                edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
                edges.end());

    auto integrand = [&](double w) {
        const double a = m.amplitude(w);
        return a * a * (w > averaged_from ? mean_kernel(f, w) : kernel(f, w, t));
    };
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double e = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, edges[i], edges[i + 1], 12,
                                                                              1e-12, &e);
        err += e;
    }
    if (err > kRelTol * std::max(total, 1e-300) && err > 1e-14)
        throw ConvergenceError("contrast quadrature did not converge (error " + std::to_string(err) + ")");
    return ContrastDetail{std::exp(-total), total, cutoff, tail_bound, err};
}

double poisson_pmf(double mean, std::uint64_t k) {
    if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
    return boost::math::pdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(k));
}

std::size_t count_limit(double mean) {
    return static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 40.0));
}

}  // namespace

// --------------------------------------------------------------- spectrum

double NoiseSpectrumModel::amplitude(double w) const {
    const double g = kTwoPi * gamma;
    const double s = kTwoPi * sigma;
    const double d0 = w - kTwoPi * nu0;
    const double d1 = (w - kTwoPi * nu1) / s;
    const double d2 = (w - kTwoPi * nu2) / s;
    return alpha * (g * g / (g * g + d0 * d0) + a1 * std::exp(-d1 * d1) + a2 * std::exp(-d2 * d2));
}

void NoiseSpectrumModel::validate() const {
    require(alpha >= 0.0 && std::isfinite(alpha), "spectrum alpha must be >= 0");
    require(gamma > 0.0 && std::isfinite(gamma), "spectrum gamma must be > 0");
    require(sigma > 0.0 && std::isfinite(sigma), "spectrum sigma must be > 0");
    require(a1 >= 0.0 && a2 >= 0.0, "spectrum peak weights must be >= 0");
    require(nu1 >= 0.0 && nu2 >= 0.0 && nu0 >= 0.0, "spectrum centres must be >= 0");
}

KeyValueConfig NoiseSpectrumModel::to_config() const {
    KeyValueConfig c;
    c.set("spectrum.alpha", alpha);
    c.set("spectrum.gamma_hz", gamma);
    c.set("spectrum.a1", a1);
    c.set("spectrum.a2", a2);
    c.set("spectrum.sigma_hz", sigma);
    c.set("spectrum.nu1_hz", nu1);
    c.set("spectrum.nu2_hz", nu2);
    c.set("spectrum.nu0_hz", nu0);
    return c;
}

NoiseSpectrumModel NoiseSpectrumModel::from_config(const KeyValueConfig& cfg) {
    NoiseSpectrumModel m;
    m.alpha = cfg.get_double("spectrum.alpha", m.alpha);
    m.gamma = cfg.get_double("spectrum.gamma_hz", m.gamma);
    m.a1 = cfg.get_double("spectrum.a1", m.a1);
    m.a2 = cfg.get_double("spectrum.a2", m.a2);
    m.sigma = cfg.get_double("spectrum.sigma_hz", m.sigma);
    m.nu1 = cfg.get_double("spectrum.nu1_hz", m.nu1);
    m.nu2 = cfg.get_double("spectrum.nu2_hz", m.nu2);
    m.nu0 = cfg.get_double("spectrum.nu0_hz", m.nu0);
    m.validate();
    return m;
}

ContrastDetail ramsey_contrast_detail(double t, const NoiseSpectrumModel& m) {
    return contrast_detail(Filter::Ramsey, t, m);
}

double ramsey_contrast(double t, const NoiseSpectrumModel& m) { return ramsey_contrast_detail(t, m).contrast; }

ContrastDetail echo_contrast_detail(double t, const NoiseSpectrumModel& m) {
    return contrast_detail(Filter::Echo, t, m);
}

double echo_contrast(double t, const NoiseSpectrumModel& m) { return echo_contrast_detail(t, m).contrast; }

// ---------------------------------------------------------------- dataset

RamseyDataset::RamseyDataset(std::vector<RamseyPoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const RamseyPoint& p = points_[i];
        const std::string where = "dataset point " + std::to_string(i + 1);
        require(std::isfinite(p.time) && p.time >= 0.0, where + ": time must be >= 0");
        require(i == 0 || p.time > points_[i - 1].time, where + ": times must be strictly increasing");
        require(p.contrast >= 0.0 && p.contrast <= 1.0, where + ": contrast outside [0, 1]");
        require(p.uncertainty > 0.0 && std::isfinite(p.uncertainty), where + ": uncertainty must be > 0");
    }
}

RamseyDataset RamseyDataset::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<RamseyPoint> pts;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<std::string> fields;
        for (std::string f; ls >> f;) fields.push_back(f);
        if (fields.empty()) continue;
        const std::string where = "dataset line " + std::to_string(lineno);
        require(fields.size() == 3, where + ": expected time, value, uncertainty");
        pts.push_back({parse_double(fields[0], where), parse_double(fields[1], where), parse_double(fields[2], where)});
    }
    return RamseyDataset(std::move(pts));
}

RamseyDataset RamseyDataset::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open dataset " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RamseyDataset::to_text() const {
    std::string out = "# time_s, contrast, uncertainty\n";
    for (const RamseyPoint& p : points_)
        out += format_double(p.time) + ", " + format_double(p.contrast) + ", " + format_double(p.uncertainty) + "\n";
    return out;
}

// ------------------------------------------------------------ fit_spectrum

namespace {

// Fit ranges in log space.  A Lorentzian wider than 100 kHz is flat over the
// whole filter band, so larger widths only cost quadrature time.
constexpr double kLogAlpha[2] = {-60.0, 30.0};
constexpr double kLogGamma[2] = {-6.907755278982137, 11.512925464970229};  // 1e-3 .. 1e5 Hz
constexpr double kLogWeight[2] = {-40.0, 5.0};

NoiseSpectrumModel with_log_params(NoiseSpectrumModel m, const Eigen::VectorXd& x) {
    auto ex = [](double v, const double (&r)[2]) { return std::exp(std::clamp(v, r[0], r[1])); };
    m.alpha = ex(x(0), kLogAlpha);
    m.gamma = ex(x(1), kLogGamma);
    m.a1 = ex(x(2), kLogWeight);
    m.a2 = ex(x(3), kLogWeight);
    return m;
}

struct SpectrumResiduals : Eigen::DenseFunctor<double> {
    const RamseyDataset* data;
    NoiseSpectrumModel base;

    SpectrumResiduals(const RamseyDataset& d, const NoiseSpectrumModel& b)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(d.size())), data(&d), base(b) {}

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        const NoiseSpectrumModel m = with_log_params(base, x);
        for (std::size_t i = 0; i < data->size(); ++i) {
            const RamseyPoint& p = data->points()[i];
            fvec(static_cast<Eigen::Index>(i)) = (ramsey_contrast(p.time, m) - p.contrast) / p.uncertainty;
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        Eigen::VectorXd f0(values()), f1(values()), f2(values());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double h = 1e-6;
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            (*this)(xp, f1);
            (*this)(xm, f2);
            jac.col(j) = (f1 - f2) / (2.0 * h);
        }
        return 0;
    }
};

}  // namespace

SpectrumFit fit_spectrum(const RamseyDataset& data, const NoiseSpectrumModel& init, int max_iterations) {
    require(data.size() >= 8, "spectrum fit needs at least 8 points");
    init.validate();
    Eigen::VectorXd x(4);
    auto lg = [](double v) { return std::log(std::max(v, 1e-12)); };
    x << lg(init.alpha), lg(init.gamma), lg(init.a1), lg(init.a2);

    SpectrumResiduals functor(data, init);
    Eigen::LevenbergMarquardt<SpectrumResiduals> lm(functor);
    lm.setMaxfev(max_iterations * 10);
    lm.setXtol(1e-12);
    lm.setFtol(1e-14);
    lm.setGtol(1e-12);
    const Eigen::LevenbergMarquardtSpace::Status status = lm.minimize(x);

    SpectrumFit out;
    out.model = with_log_params(init, x);
    Eigen::VectorXd f(static_cast<Eigen::Index>(data.size()));
    functor(x, f);
    out.residuals.assign(f.data(), f.data() + f.size());
    out.chi2 = f.squaredNorm();
    out.iterations = static_cast<int>(lm.iterations());
    out.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                    status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
    if (!out.converged)
        throw ConvergenceError("spectrum fit stopped after " + std::to_string(out.iterations) +
                               " iterations; best chi2 " + format_double(out.chi2) +
                               " at alpha=" + format_double(out.model.alpha) +
                               " gamma=" + format_double(out.model.gamma) + " a1=" + format_double(out.model.a1) +
                               " a2=" + format_double(out.model.a2));
    return out;
}

// ------------------------------------------------------------ thermometry

ThermalDistribution::ThermalDistribution(double nbar) : nbar_(nbar) {
    require(std::isfinite(nbar) && nbar >= 0.0, "nbar must be >= 0");
}

double ThermalDistribution::weight(std::size_t n) const {
    if (nbar_ == 0.0) return n == 0 ? 1.0 : 0.0;
    const double r = nbar_ / (nbar_ + 1.0);
    return std::pow(r, static_cast<double>(n)) / (nbar_ + 1.0);
}

double ThermalDistribution::tail(std::size_t n_max) const {
    if (nbar_ == 0.0) return 0.0;
    return std::pow(nbar_ / (nbar_ + 1.0), static_cast<double>(n_max + 1));
}

std::size_t ThermalDistribution::cutoff(double tol) const {
    require(tol > 0.0 && tol < 1.0, "tail tolerance must lie in (0, 1)");
    if (nbar_ == 0.0) return 0;
    const double r = nbar_ / (nbar_ + 1.0);
    auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(tol) / std::log(r) - 1.0)));
    while (tail(n) >= tol) ++n;
    while (n > 0 && tail(n - 1) < tol) --n;
    return n;
}

double sideband_rabi(double t, double nbar, double eta_omega0, std::size_t n_max) {
    const ThermalDistribution th(nbar);
    require(th.tail(n_max) < 1e-6, "sideband sum truncated with thermal tail >= 1e-6");
    // Truncated weights are renormalized; the neglected mass is below 1e-6.
    double p = 0.0, w_sum = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double w = th.weight(n);
        const double s = std::sin(eta_omega0 / 2.0 * std::sqrt(static_cast<double>(n + 1)) * t);
        p += w * s * s;
        w_sum += w;
    }
    return p / w_sum;
}

double sideband_rabi(double t, double nbar, double eta_omega0) {
    return sideband_rabi(t, nbar, eta_omega0, ThermalDistribution(nbar).cutoff(1e-6));
}

NbarFit fit_nbar(std::span<const std::pair<double, double>> data, double eta_omega0, double nbar_max) {
    require(!data.empty(), "thermometry fit needs data");
    require(nbar_max > 0.0, "nbar_max must be > 0");
    auto cost = [&](double nbar) {
        double s = 0.0;
        for (const auto& [t, p] : data) {
            const double r = sideband_rabi(t, nbar, eta_omega0) - p;
            s += r * r;
        }
        return s;
    };
    const int steps = 500;
    const double h = nbar_max / steps;
    int best = 0;
    double best_cost = cost(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double c = cost(i * h);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    const double lo = std::max(0.0, (best - 1) * h);
    const double hi = std::min(nbar_max, (best + 1) * h);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(cost, lo, hi, 40, iters);
    if (r.second <= best_cost) return NbarFit{r.first, r.second};
    return NbarFit{best * h, best_cost};
}

// ---------------------------------------------------- intensity analysis

IntensityAnalysis intensity_fluctuation_analysis(const std::vector<IntensityRun>& runs) {
    require(!runs.empty(), "intensity analysis needs at least one run");
    IntensityAnalysis out{};
    double snn = 0.0, sne = 0.0;
    std::vector<double> ns;
    for (const IntensityRun& r : runs) {
        require(r.n_rotations >= 1, "rotation count must be >= 1");
        require(r.probabilities.size() >= 2, "each run needs at least two repetitions");
        require(r.shots >= 1, "each run needs a shot count");
        double mean = 0.0;
        for (double p : r.probabilities) mean += p;
        mean /= static_cast<double>(r.probabilities.size());
        double var = 0.0;
        for (double p : r.probabilities) var += (p - mean) * (p - mean);
        var /= static_cast<double>(r.probabilities.size() - 1);
        const double proj = projection_noise(std::clamp(mean, 0.0, 1.0), r.shots);
        double ex2 = var - proj * proj;
        if (ex2 < 0.0) {
            out.warnings.push_back("N=" + std::to_string(r.n_rotations) +
                                   ": spread below projection noise; excess clamped to 0");
            ex2 = 0.0;
        }
        const double ex = std::sqrt(ex2);
        out.excess.push_back(ex);
        const double n = r.n_rotations;
        ns.push_back(n);
        snn += n * n;
        sne += n * ex;
    }
    out.slope = sne / snn;
    if (runs.size() > 1) {
        double rss = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) rss += std::pow(out.excess[i] - out.slope * ns[i], 2);
        out.slope_error = std::sqrt(rss / static_cast<double>(ns.size() - 1) / snn);
    }
    out.rel_fluct = out.slope / kPi;
    out.rel_fluct_error = out.slope_error / kPi;
    return out;
}

double projection_noise(double p, std::uint64_t shots) {
    require(p >= 0.0 && p <= 1.0, "probability outside [0, 1]");
    require(shots >= 1, "shots must be >= 1");
    return std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

double dfs_coherence(double t, int n_excited, double tau1) {
    require(t >= 0.0 && n_excited >= 0 && tau1 > 0.0, "invalid DFS coherence arguments");
    if (std::isinf(tau1)) return 1.0;
    return std::exp(-static_cast<double>(n_excited) * t / tau1);
}

// -------------------------------------------------------------- detection

std::vector<double> bright_count_pmf(const NoiseParams& p) {
    const double mean = p.detect_bright_rate * p.detect_time;
    const std::size_t kmax = count_limit(std::max(mean, p.detect_dark_rate * p.detect_time));
    std::vector<double> pmf(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) pmf[k] = poisson_pmf(mean, k);
    return pmf;
}

std::vector<double> dark_count_pmf(const NoiseParams& p) {
    const double t = p.detect_time;
    const double rd = p.detect_dark_rate, rb = p.detect_bright_rate;
    const std::size_t kmax = count_limit(std::max(rb, rd) * t);
    std::vector<double> pmf(kmax + 1);
    const bool decays = !std::isinf(p.tau1) && t > 0.0;
    const double survive = decays ? std::exp(-t / p.tau1) : 1.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        double v = survive * poisson_pmf(rd * t, k);
        if (decays) {
            // Decay at time s within the window: dark rate before, bright after.
            auto f = [&](double s) { return std::exp(-s / p.tau1) / p.tau1 * poisson_pmf(rd * s + rb * (t - s), k); };
            v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, t, 10, 1e-12);
        }
        pmf[k] = v;
    }
    return pmf;
}

DetectionError detection_error(const NoiseParams& p) {
    p.validate();
    NoiseParams pure = p;
    pure.tau1 = std::numeric_limits<double>::infinity();
    const std::vector<double> bright = bright_count_pmf(p);
    const std::vector<double> dark = dark_count_pmf(p);
    const std::vector<double> dark0 = dark_count_pmf(pure);
    const std::size_t kmax = std::max({bright.size(), dark.size(), dark0.size()});
    auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; };

    // Scan thresholds: error(th) = (P_dark(k >= th) + P_bright(k < th)) / 2.
    double dark_above = 0.0, dark0_above = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) {
        dark_above += at(dark, k);
        dark0_above += at(dark0, k);
    }
    double bright_below = 0.0;
    DetectionError best{0, 0.5 * (dark_above + bright_below), 0.5 * dark0_above, 0.0};
    for (std::size_t th = 1; th <= kmax; ++th) {
        dark_above -= at(dark, th - 1);
        dark0_above -= at(dark0, th - 1);
        bright_below += at(bright, th - 1);
        const double e = 0.5 * (std::max(0.0, dark_above) + bright_below);
        if (e < best.error) best = DetectionError{th, e, 0.5 * (std::max(0.0, dark0_above) + bright_below), 0.0};
    }
    best.decay_error = best.error - best.overlap_error;
    return best;
}

std::vector<double> pmt_register_histogram(int n_ions, int n_bright, const NoiseParams& p) {
    require(n_ions >= 1 && n_bright >= 0 && n_bright <= n_ions, "invalid bright-ion count");
    const double mean = (n_bright * p.detect_bright_rate + n_ions * p.detect_dark_rate) * p.detect_time;
    const double top = (n_ions * p.detect_bright_rate + n_ions * p.detect_dark_rate) * p.detect_time;
    const std::size_t kmax = count_limit(top);
    std::vector<double> pmf(kmax + 1);
    for (std::size_t k = 0; k <= kmax; ++k) pmf[k] = poisson_pmf(mean, k);
    return pmf;
}

PmtClassifier::PmtClassifier(int n_ions, const NoiseParams& p) {
    require(n_ions >= 1, "classifier needs at least one ion");
    require(p.detect_bright_rate > 0.0 && p.detect_time > 0.0, "classifier needs a positive bright signal");
    for (int m = 0; m < n_ions; ++m) {
        const double lo = (m * p.detect_bright_rate + n_ions * p.detect_dark_rate) * p.detect_time;
        const double hi = ((m + 1) * p.detect_bright_rate + n_ions * p.detect_dark_rate) * p.detect_time;
        // Poisson likelihood ratio crosses 1 at k = (hi - lo) / ln(hi / lo).
        const double k = lo > 0.0 ? (hi - lo) / std::log(hi / lo) : 0.0;
        thresholds_.push_back(static_cast<std::uint64_t>(std::floor(k)) + 1);
    }
}

int PmtClassifier::classify(std::uint64_t counts) const {
    int m = 0;
    while (m < static_cast<int>(thresholds_.size()) && counts >= thresholds_[static_cast<std::size_t>(m)]) ++m;
    return m;
}

}  // namespace tiqc
