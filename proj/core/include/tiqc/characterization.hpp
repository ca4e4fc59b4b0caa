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

// Analytic noise models and estimators: Ramsey and echo contrast from a
// laser phase-noise spectrum, sideband thermometry, intensity-fluctuation
// extraction, projection noise, DFS coherence and photon-count detection.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tiqc/config.hpp"
#include "tiqc/noise.hpp"

namespace tiqc {

// --------------------------------------------------------------- spectrum

/// A(w) = alpha (g^2 / (g^2 + (w - w0)^2) + a1 G(w; w1) + a2 G(w; w2)),
/// G(w; c) = exp(-(w - c)^2 / s^2).
///
/// Frequencies are given in Hz and converted to angular frequency
/// (w = 2 pi nu) before use; alpha is used as given.
struct NoiseSpectrumModel {
    double alpha = 89.0;
    double gamma = 3.0;  // Hz
    double a1 = 0.22;
    double a2 = 0.02;
    double sigma = 10.0;  // Hz
    double nu1 = 300.0;   // Hz
    double nu2 = 100.0;   // Hz
    double nu0 = 0.0;     // Hz, Lorentzian centre

    /// Spectral amplitude at angular frequency w (rad/s).
    double amplitude(double w) const;
    void validate() const;

    KeyValueConfig to_config() const;
    static NoiseSpectrumModel from_config(const KeyValueConfig& cfg);
};

struct ContrastDetail {
    double contrast;
    double exponent;
    /// Upper integration limit (rad/s): max(10 / T, 2 pi 5 kHz).
    double cutoff;
    /// Bound on the neglected part of the exponent beyond the cutoff.
    double tail_bound;
    /// Summed quadrature error estimate of the exponent.
    double quad_error;
};

/// C(T) = exp(-int_0^inf A(w)^2 / w^2 sin^2(w T / 2) dw).
double ramsey_contrast(double t, const NoiseSpectrumModel& m);
ContrastDetail ramsey_contrast_detail(double t, const NoiseSpectrumModel& m);

/// Single spin echo: kernel 4 sin^4(w T / 4) / w^2 in place of
/// sin^2(w T / 2) / w^2.
double echo_contrast(double t, const NoiseSpectrumModel& m);
ContrastDetail echo_contrast_detail(double t, const NoiseSpectrumModel& m);

struct RamseyPoint {
    double time;
    double contrast;
    double uncertainty;
};

class RamseyDataset {
   public:
    /// Times must be non-negative and strictly increasing; contrasts in
    /// [0, 1]; uncertainties positive.
    explicit RamseyDataset(std::vector<RamseyPoint> points);

    /// Delimited text: `time, value, uncertainty` per line, `#` comments.
    static RamseyDataset parse(const std::string& text);
    static RamseyDataset load(const std::filesystem::path& path);
    std::string to_text() const;

    const std::vector<RamseyPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

   private:
    std::vector<RamseyPoint> points_;
};

struct SpectrumFit {
    NoiseSpectrumModel model;
    std::vector<double> residuals;  // (model - data) / uncertainty
    double chi2;
    int iterations;
    bool converged;
};

/// Weighted least squares over (alpha, gamma, a1, a2) in log space.
/// Throws ConvergenceError carrying the best-so-far fit in its message if
/// the iteration budget is exhausted.
SpectrumFit fit_spectrum(const RamseyDataset& data, const NoiseSpectrumModel& init, int max_iterations = 200);

// ------------------------------------------------------------ thermometry

class ThermalDistribution {
   public:
    explicit ThermalDistribution(double nbar);

    double nbar() const { return nbar_; }
    /// c_n = nbar^n / (nbar + 1)^(n + 1).
    double weight(std::size_t n) const;
    /// Sum of c_n for n > n_max.
    double tail(std::size_t n_max) const;
    /// Smallest n_max with tail(n_max) < tol.
    std::size_t cutoff(double tol = 1e-6) const;

   private:
    double nbar_;
};

/// p(t) = sum_n c_n sin^2(eta_omega0 / 2 sqrt(n + 1) t), truncated at the
/// smallest n_max with thermal tail below 1e-6.
double sideband_rabi(double t, double nbar, double eta_omega0);
/// Explicit truncation; throws if the tail at n_max is 1e-6 or larger.
double sideband_rabi(double t, double nbar, double eta_omega0, std::size_t n_max);

struct NbarFit {
    double nbar;
    double sum_sq;
};

/// 1-D least squares over nbar in [0, nbar_max]: grid scan, then Brent.
NbarFit fit_nbar(std::span<const std::pair<double, double>> data, double eta_omega0, double nbar_max = 5.0);

// ---------------------------------------------------- intensity analysis

struct IntensityRun {
    int n_rotations;
    /// Measured excitation probability of each repetition.
    std::vector<double> probabilities;
    /// Shots behind each probability.
    std::uint64_t shots;
};

struct IntensityAnalysis {
    /// Fitted slope of excess fluctuation against N, through the origin.
    double slope;
    double slope_error;
    /// slope / pi.
    double rel_fluct;
    double rel_fluct_error;
    std::vector<double> excess;
    std::vector<std::string> warnings;
};

/// dp^2 = dp_proj^2 + dp_excess^2 per N, then dp_excess = slope * N and
/// dI/I = slope / pi.
IntensityAnalysis intensity_fluctuation_analysis(const std::vector<IntensityRun>& runs);

/// sqrt(p (1 - p) / shots).
double projection_noise(double p, std::uint64_t shots);

/// exp(-n t / tau1).
double dfs_coherence(double t, int n_excited, double tau1);

// -------------------------------------------------------------- detection

/// Count distributions for one detection window, truncated where the
/// remaining mass is below 1e-15.  A dark ion (D) may decay during the
/// window and then scatters at the bright rate.
std::vector<double> bright_count_pmf(const NoiseParams& p);
std::vector<double> dark_count_pmf(const NoiseParams& p);

struct DetectionError {
    /// Counts >= threshold are read as bright (S = |1>).
    std::uint64_t threshold;
    /// Mean of the two misclassification probabilities.
    double error;
    /// Error of the same threshold with decay switched off.
    double overlap_error;
    /// error - overlap_error.
    double decay_error;
};

DetectionError detection_error(const NoiseParams& p);

/// Poisson count distribution for `n_bright` of `n_ions` bright ions with
/// mean (n_bright rate_b + n_ions rate_d) t.
std::vector<double> pmt_register_histogram(int n_ions, int n_bright, const NoiseParams& p);

/// Maximum-likelihood bright-ion counter with thresholds between adjacent
/// count modes.
class PmtClassifier {
   public:
    PmtClassifier(int n_ions, const NoiseParams& p);
    int classify(std::uint64_t counts) const;
    /// thresholds()[k] is the smallest count read as k + 1 bright ions.
    const std::vector<std::uint64_t>& thresholds() const { return thresholds_; }

   private:
    std::vector<std::uint64_t> thresholds_;
};

}  // namespace tiqc
