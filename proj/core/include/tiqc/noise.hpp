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

// Monte-Carlo trajectory engine for pulse sequences.
//
// Each trajectory is a pure state driven by one realization of the enabled
// noise sources.  Randomness for trajectory i comes from a private
// mt19937_64 seeded with (seed, i), so results do not depend on how
// trajectories are distributed over worker threads.
//
// Per op of duration d the engine applies: half the collective dephasing
// phase accumulated over d, the (noisy) op itself, the other half, then
// spontaneous decay over d.
//
// Noise sources
//   dephasing  collective detuning, Ornstein-Uhlenbeck in time with
//              correlation time tau_corr; amplitude set so a Ramsey
//              experiment loses contrast to 1/e after tau_coh
//   intensity  one Gaussian relative error per trajectory scaling the angle
//              of every laser-driven op (R, MS, Sz, conditional Sz)
//   spectator  a second per-trajectory relative error on R and MS only,
//              redrawn after each recooling
//   crosstalk  addressed Sz rotations leak onto other ions per the
//              crosstalk matrix
//   decay      D -> S quantum jumps with lifetime tau1
//   prep       each ion flipped with probability 1 - pump_fidelity at start
//   detection  measurement outcomes read through photon-count statistics

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tiqc/channels.hpp"
#include "tiqc/config.hpp"
#include "tiqc/gates.hpp"

namespace tiqc {

enum class NoiseSource { Dephasing, Intensity, Crosstalk, Spectator, Decay, Prep, Detection };

std::string to_string(NoiseSource s);
NoiseSource parse_noise_source(const std::string& name);
const std::vector<NoiseSource>& all_noise_sources();

/// Op durations in seconds.  Rotations scale with |theta|.
struct OpDurations {
    double zrot_per_pi = 20e-6;
    double collective_per_pi = 20e-6;
    double ms_per_half_pi = 375e-6;
    double hide = 40e-6;
    double damp = 50e-6;
    double measure = 150e-6;
    double recool = 800e-6;

    double of(const NativeOp& op) const;
};

struct NoiseParams {
    double tau_coh = 15e-3;
    double tau_corr = 333e-6;
    double intensity_rel_fluct = 0.02;
    double spectator_rel_fluct = 0.02;
    double crosstalk_neighbor = 0.03;
    /// Overrides the nearest-neighbour matrix when set.
    std::optional<CrosstalkMatrix> crosstalk;
    double tau1 = 1.168;
    double pump_fidelity = 0.991;
    double detect_bright_rate = 50e3;
    double detect_dark_rate = 1e3;
    double detect_time = 5e-3;
    OpDurations durations;
    std::set<NoiseSource> sources;
    Strictness measure_mode = Strictness::Strict;

    static NoiseParams noiseless();
    /// Dephasing, intensity, crosstalk and spectator noise enabled.
    static NoiseParams table4();
    static NoiseParams from_config(const KeyValueConfig& cfg);

    KeyValueConfig to_config() const;
    bool enabled(NoiseSource s) const { return sources.count(s) != 0; }
    NoiseParams with_only(std::set<NoiseSource> s) const;
    CrosstalkMatrix crosstalk_for(int n) const;
    void validate() const;

    /// Stationary standard deviation of the detuning process in rad/s.
    double detuning_sigma() const;
};

/// Ornstein-Uhlenbeck detuning x(t) and its integral, advanced by exact
/// Gaussian transitions.
class DephasingProcess {
   public:
    DephasingProcess(const NoiseParams& p, std::mt19937_64& rng);
    /// Returns the phase integral of x over the next `duration` seconds.
    double advance(double duration, std::mt19937_64& rng);
    double detuning() const { return x_; }

   private:
    double tau_c_;
    double sigma2_;
    double x_;
};

/// Phase accumulated over `duration` by a freshly started stationary process.
double sample_dephasing_phase(const NoiseParams& p, double duration, std::mt19937_64& rng);

/// One quantum-jump step of decay D -> S on every ion over `duration`.
PureState sample_decay(const PureState& psi, const NoiseParams& p, double duration, std::mt19937_64& rng);

/// Photon counts for one detection window.
std::uint64_t detection_sample(bool bright, const NoiseParams& p, std::mt19937_64& rng);

struct Trajectory {
    PureState state;
    std::vector<int> cbits;
};

Trajectory run_trajectory(const PulseSequence& seq, const NoiseParams& p, std::uint64_t traj_index,
                          std::uint64_t seed, const std::optional<PureState>& initial = std::nullopt);

struct SimOptions {
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
    std::optional<PureState> initial;
};

struct SimResult {
    DensityMatrix density;
    std::vector<std::vector<int>> classical_bits;
    std::size_t n_traj;
    std::uint64_t seed;
    std::string sequence_name;

    std::string to_json() const;
    std::string to_csv() const;
};

SimResult simulate(const PulseSequence& seq, const NoiseParams& p, std::size_t n_traj, std::uint64_t seed,
                   const SimOptions& opts = {});

/// Noiseless density-matrix evaluation with exact branching over classical
/// measurement records.
struct ExactResult {
    DensityMatrix density;
    /// Probability of each classical record (bit vectors, -1 = never written).
    std::vector<std::pair<std::vector<int>, double>> records;
};

ExactResult evaluate_exact(const PulseSequence& seq, const DensityMatrix& initial,
                           Strictness mode = Strictness::Strict);
ExactResult evaluate_exact(const PulseSequence& seq, Strictness mode = Strictness::Strict);

struct BudgetRow {
    std::string label;
    double fidelity;
};

/// One simulation per listed source alone plus one with all of them, each
/// compared with the noiseless result.  Rows are in input order, "all" last.
std::vector<BudgetRow> error_budget(const PulseSequence& seq, const NoiseParams& p,
                                    const std::vector<NoiseSource>& sources, std::size_t n_traj,
                                    std::uint64_t seed, const SimOptions& opts = {});

/// Per-trajectory generator used by every stochastic entry point.
std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace tiqc
