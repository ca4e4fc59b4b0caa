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

// Numerical sequence synthesis.
//
// Each restart draws a random sequence of native ops, then repeats:
// optimize all angles (cyclic coordinate descent with a Brent line search,
// finished by a Levenberg-Marquardt polish), drop ops whose angle fell
// below the prune threshold, and insert a batch of fresh ops when progress
// stalls.  Restarts are independent and may run concurrently; the winner
// is the lowest infidelity, ties going to the lower restart index.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiqc/config.hpp"
#include "tiqc/gates.hpp"

namespace tiqc {

/// Op kinds the optimizer may place.
struct Alphabet {
    bool zrot = true;
    std::vector<double> collective_phases = {0.0, kPi / 2};
    std::vector<double> ms_phases = {0.0};
};

struct OptimizerConfig {
    int initial_length = 12;
    double prune_threshold = 1e-3;
    int max_rounds = 30;
    int reinsert_batch = 3;
    double target_infidelity = 1e-9;
    std::uint64_t seed = 1;
    bool crosstalk_aware = false;
    /// Used when crosstalk_aware is set; nearest-neighbour 3% otherwise.
    std::optional<CrosstalkMatrix> crosstalk;
    int restarts = 8;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
    /// Match only U|0...0> against the first target column.
    bool column_only = false;

    void validate() const;
    KeyValueConfig to_config() const;
    static OptimizerConfig from_config(const KeyValueConfig& cfg);
};

/// One threshold prune.  The removed ops change the infidelity by at most
/// bound = sum |theta_k| ||H_k||, with H_k the generator of op k.
struct PruneStep {
    int round;
    int removed;
    double bound;
    double infidelity_before;
    double infidelity_after;
    bool bound_held;
};

struct SynthesisResult {
    PulseSequence sequence;
    double infidelity;
    bool converged;
    int rounds;
    int restart;
    std::vector<PruneStep> prune_log;
};

/// 1 - |Tr(target^dag U)| / d, or 1 - |<t|U|0>| with column_only.
double synthesis_infidelity(const PulseSequence& seq, const Matrix& target, bool column_only,
                            const CrosstalkMatrix* crosstalk = nullptr);

/// Never throws on non-convergence; check `converged`.
SynthesisResult synthesize(const Matrix& target, int n, const Alphabet& alphabet, const OptimizerConfig& cfg);

}  // namespace tiqc
