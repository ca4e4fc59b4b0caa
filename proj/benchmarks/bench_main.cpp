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

#include <benchmark/benchmark.h>

#include "tiqc/algorithms.hpp"
#include "tiqc/characterization.hpp"
#include "tiqc/compiler.hpp"
#include "tiqc/noise.hpp"
#include "tiqc/sequence_text.hpp"
#include "tiqc/synthesis.hpp"

namespace {

using namespace tiqc;

void BM_SequenceUnitary(benchmark::State& state) {
    const PulseSequence seq = load_corpus("a2_qft3");
    for (auto _ : state) benchmark::DoNotOptimize(sequence_unitary(seq));
}
BENCHMARK(BM_SequenceUnitary);

void BM_Trajectory(benchmark::State& state) {
    const PulseSequence seq = load_corpus("a2_qft3");
    const NoiseParams p = NoiseParams::table4();
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(seq, p, i++, 1));
}
BENCHMARK(BM_Trajectory);

void BM_Simulate(benchmark::State& state) {
    const PulseSequence seq = load_corpus("a1_open_system_step");
    const NoiseParams p = NoiseParams::table4();
    SimOptions so;
    so.workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate(seq, p, 100, 1, so));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RamseyContrast(benchmark::State& state) {
    const NoiseSpectrumModel m;
    const double t = static_cast<double>(state.range(0)) * 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(ramsey_contrast(t, m));
}
BENCHMARK(BM_RamseyContrast)->Arg(1)->Arg(10);

void BM_EchoContrast(benchmark::State& state) {
    const NoiseSpectrumModel m;
    for (auto _ : state) benchmark::DoNotOptimize(echo_contrast(5e-3, m));
}
BENCHMARK(BM_EchoContrast);

void BM_DetectionError(benchmark::State& state) {
    const NoiseParams p = NoiseParams::noiseless();
    for (auto _ : state) benchmark::DoNotOptimize(detection_error(p));
}
BENCHMARK(BM_DetectionError);

void BM_SynthesizeCnot(benchmark::State& state) {
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    OptimizerConfig cfg;
    cfg.restarts = 2;
    for (auto _ : state) benchmark::DoNotOptimize(synthesize(cnot, 2, Alphabet{}, cfg));
}
BENCHMARK(BM_SynthesizeCnot)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_KitaevExact(benchmark::State& state) {
    RunOptions o;
    o.shots = 0;
    const PureState in = kitaev_qft_inputs()[1].state;
    for (auto _ : state) benchmark::DoNotOptimize(run_kitaev_qft(in, o));
}
BENCHMARK(BM_KitaevExact);

void BM_VerifyQft(benchmark::State& state) {
    const PulseSequence seq = load_corpus("a2_qft3");
    Equivalences eq;
    eq.io_permutations = true;
    eq.diagonal_phases = true;
    const Matrix f = qft_ideal(3).matrix().adjoint();
    for (auto _ : state) benchmark::DoNotOptimize(verify_sequence(seq, f, 1e-6, eq));
}
BENCHMARK(BM_VerifyQft)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
