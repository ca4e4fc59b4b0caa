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

// Benchmark algorithms and their classical figures of merit.
//
// Readout order: the Kitaev QFT and order finding measure their output
// bits one at a time; measurement s (s = 0, 1, 2 in time) is bit s of the
// outcome, so the first measurement is the least significant bit.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tiqc/compiler.hpp"
#include "tiqc/noise.hpp"

namespace tiqc {

/// (sum_i sqrt(p_i q_i))^2.
double sso(const ProbDist& p, const ProbDist& q);
/// 1 - (1/2) sum_i |p_i - q_i|.
double distinguishability(const ProbDist& p, const ProbDist& q);

/// Entries w^{jk} / sqrt(2^n), w = exp(2 pi i / 2^n).
UnitaryMatrix qft_ideal(int n);

struct BenchmarkReport {
    std::string algorithm;
    std::string input_label;
    ProbDist ideal = ProbDist::uniform(1);
    ProbDist measured = ProbDist::uniform(1);
    double sso = 0.0;
    double distinguishability = 0.0;
    /// 0 when `measured` is the exact outcome distribution.
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Experimental comparison values, in percent.
    std::optional<double> reference_sso;
    std::optional<double> reference_distinguishability;
    std::vector<std::string> notes;

    std::string to_json() const;
};

/// A labelled benchmark input with its experimental comparison values.
struct LabelledInput {
    std::string label;
    std::string period;
    PureState state;
    double reference_sso;
    double reference_distinguishability;
};

/// Inputs of the coherent three-qubit QFT benchmark.
const std::vector<LabelledInput>& coherent_qft_inputs();
/// Product-state inputs of the Kitaev QFT benchmark.
const std::vector<LabelledInput>& kitaev_qft_inputs();

struct RunOptions {
    /// Noise model; noiseless when empty.
    std::optional<NoiseParams> noise;
    /// Outcome samples; 0 reports the exact distribution where available.
    std::uint64_t shots = 10000;
    std::uint64_t seed = 1;
    /// Trajectories for the density-matrix average (coherent QFT only).
    std::size_t trajectories = 200;
    unsigned workers = 0;
};

/// How the coherent QFT sequence maps onto the ideal transform: the input
/// register is prepared as frame_in^dag-rotated so that the outputs read
/// out directly.  Computed once from the corpus sequence.
struct QftMapping {
    VerifyReport report;
    bool inverse;
};
const QftMapping& coherent_qft_mapping();

BenchmarkReport run_coherent_qft(const PureState& input, const RunOptions& opts = {},
                                 const std::string& label = "");

/// Pulse sequence of the one-qubit Kitaev QFT for a product input given
/// by its three single-qubit factors (qubit 0 first).
PulseSequence kitaev_qft_sequence(const std::array<Vector, 3>& factors);
/// Throws ValidationError for an entangled input.
std::array<Vector, 3> product_factors(const PureState& input);
BenchmarkReport run_kitaev_qft(const PureState& input, const RunOptions& opts = {}, const std::string& label = "");

struct PermutationSpec {
    std::string name;
    std::array<int, 4> mapping;
    /// Corpus sequences tried for the controlled pi and pi^2 blocks.
    std::vector<std::string> block_candidates;
    /// Experimental input and comparison values.
    int reference_input;
    double reference_sso;
    double reference_distinguishability;

    std::array<int, 4> power(int k) const;
    /// Smallest k >= 1 with pi^k(y) = y.
    int order_on(int y) const;
};

const std::vector<PermutationSpec>& permutation_specs();
const PermutationSpec& permutation_spec(const std::string& name);

/// Controlled permutation on three qubits: control qubit 0, register
/// y = 2 b_1 + b_2.
Matrix controlled_permutation(const std::array<int, 4>& mapping);

/// A controlled pi^k block: a corpus sequence wrapped in exact frames when
/// one verifies, else an ideal frame.
struct ControlledBlock {
    std::vector<NativeOp> ops;
    std::string source;  // corpus stem or "ideal"
    double fidelity = 0.0;
};
ControlledBlock controlled_block(const PermutationSpec& spec, int power);

PulseSequence order_finding_sequence(const PermutationSpec& spec, std::vector<std::string>* notes = nullptr);
/// Three-bit phase estimation of pi on |y>, by eigen-decomposition of the
/// cycle containing y.
ProbDist order_finding_ideal(const PermutationSpec& spec, int y);
BenchmarkReport run_order_finding(const PermutationSpec& spec, int y, const RunOptions& opts = {});

struct SuiteConfig {
    bool coherent_qft = false;
    bool kitaev_qft = false;
    bool order_finding = false;
    RunOptions run;

    /// Keys: suites (list of coherent_qft, kitaev_qft, order_finding),
    /// noise (none or table4), shots, seed, trajectories.
    static SuiteConfig from_config(const KeyValueConfig& cfg);
};

std::vector<BenchmarkReport> benchmark_suite(const SuiteConfig& cfg);
/// One JSON file per report plus summary.csv; returns the paths written.
std::vector<std::filesystem::path> write_reports(const std::vector<BenchmarkReport>& reports,
                                                 const std::filesystem::path& dir);

}  // namespace tiqc
