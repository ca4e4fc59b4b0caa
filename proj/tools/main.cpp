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

// tiqc command-line tool.
//
// Exit codes: 0 success, 2 invalid input, 3 non-convergence.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "tiqc/algorithms.hpp"
#include "tiqc/characterization.hpp"
#include "tiqc/compiler.hpp"
#include "tiqc/noise.hpp"
#include "tiqc/sequence_text.hpp"
#include "tiqc/synthesis.hpp"

namespace {

using namespace tiqc;

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trajectories;
    std::optional<std::uint64_t> shots;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--trajectories", c.trajectories, "Monte-Carlo trajectories");
    cmd->add_option("--shots", c.shots, "Measurement shots");
    cmd->add_option("--out", c.out, "Output file or directory (stdout when omitted)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write '" + path + "'");
    out << text;
}

// A sequence file, or corpus:<stem> for a built-in sequence.
PulseSequence load_sequence(const std::string& spec) {
    if (spec.rfind("corpus:", 0) == 0) return load_corpus(spec.substr(7));
    return parse_sequence(read_file(spec));
}

// none, table4, or a key = value file.
NoiseParams load_noise(const std::string& spec) {
    if (spec.empty() || spec == "none") return NoiseParams::noiseless();
    if (spec == "table4") return NoiseParams::table4();
    return NoiseParams::from_config(KeyValueConfig::load(spec));
}

Matrix named_target(const std::string& name, int n) {
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    if (name == "identity") return Matrix::Identity(d, d);
    if (name == "qft") return qft_ideal(n).matrix();
    if (name == "cnot") {
        require(n == 2, "cnot needs qubits = 2");
        Matrix m = Matrix::Zero(4, 4);
        m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
        return m;
    }
    if (name == "ghz") {
        // Any unitary whose first column is the GHZ state; use with column_only.
        const Vector ghz = ghz_reference(n, 0.0).amplitudes();
        Eigen::HouseholderQR<Matrix> qr(ghz);
        Matrix q = qr.householderQ();
        q.col(0) *= ghz.dot(q.col(0)) / std::abs(ghz.dot(q.col(0)));
        return q;
    }
    throw ValidationError("unknown target '" + name + "'");
}

// Target file: qubits, target (identity, cnot, qft, ghz or matrix), matrix
// (row-major re im pairs), zrot, collective_phases, ms_phases, plus any
// optimizer keys.
int cmd_synthesize(const std::string& spec_path, const Common& c) {
    const KeyValueConfig spec = KeyValueConfig::load(spec_path);
    KeyValueConfig opt_cfg;
    Alphabet alphabet;
    for (const std::string& k : spec.keys()) {
        if (k == "qubits" || k == "target" || k == "matrix") continue;
        if (k == "zrot") alphabet.zrot = spec.get_bool(k, true);
        else if (k == "collective_phases") alphabet.collective_phases = spec.get_doubles(k);
        else if (k == "ms_phases") alphabet.ms_phases = spec.get_doubles(k);
        else opt_cfg.set(k, *spec.get(k));
    }
    OptimizerConfig cfg = OptimizerConfig::from_config(opt_cfg);
    if (c.seed) cfg.seed = *c.seed;
    const int n = static_cast<int>(spec.get_int("qubits", 0));
    require(n >= 1, "target file needs qubits >= 1");
    const std::string target_name = spec.get("target").value_or("matrix");
    Matrix target;
    if (target_name == "matrix") {
        const std::vector<double> v = spec.get_doubles("matrix");
        const auto d = static_cast<Eigen::Index>(dim_for(n));
        require(v.size() == static_cast<std::size_t>(2 * d * d), "matrix needs 2 * 4^qubits numbers");
        target.resize(d, d);
        for (Eigen::Index i = 0; i < d * d; ++i) target(i / d, i % d) = Complex(v[2 * i], v[2 * i + 1]);
        UnitaryMatrix check(target);
    } else {
        target = named_target(target_name, n);
    }

    const SynthesisResult r = synthesize(target, n, alphabet, cfg);
    if (c.format == "json") {
        nlohmann::json j;
        j["infidelity"] = r.infidelity;
        j["converged"] = r.converged;
        j["rounds"] = r.rounds;
        j["restart"] = r.restart;
        j["sequence"] = emit_sequence(r.sequence);
        nlohmann::json log = nlohmann::json::array();
        for (const PruneStep& s : r.prune_log)
            log.push_back({{"round", s.round},
                           {"removed", s.removed},
                           {"bound", s.bound},
                           {"infidelity_before", s.infidelity_before},
                           {"infidelity_after", s.infidelity_after},
                           {"bound_held", s.bound_held}});
        j["prune_log"] = log;
        write_output(c.out, j.dump(2) + "\n");
    } else {
        write_output(c.out, emit_sequence(r.sequence));
    }
    if (!r.converged) {
        std::cerr << "tiqc: synthesis stopped at infidelity " << format_double(r.infidelity) << "\n";
        return kExitConvergence;
    }
    return 0;
}

int cmd_simulate(const std::string& seq_path, const std::string& noise, const Common& c) {
    const PulseSequence seq = load_sequence(seq_path);
    const NoiseParams p = load_noise(noise);
    const SimResult r = simulate(seq, p, c.trajectories.value_or(200), c.seed.value_or(1));
    write_output(c.out, c.format == "json" ? r.to_json() + "\n" : r.to_csv());
    return 0;
}

int cmd_budget(const std::string& seq_path, const std::string& noise, const std::vector<std::string>& names,
               const Common& c) {
    const PulseSequence seq = load_sequence(seq_path);
    const NoiseParams p = load_noise(noise.empty() ? "table4" : noise);
    std::vector<NoiseSource> sources;
    if (names.empty())
        sources.assign(p.sources.begin(), p.sources.end());
    else
        for (const std::string& s : names) sources.push_back(parse_noise_source(s));
    require(!sources.empty(), "no noise sources to budget");
    const std::vector<BudgetRow> rows = error_budget(seq, p, sources, c.trajectories.value_or(15), c.seed.value_or(1));
    if (c.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const BudgetRow& r : rows) j.push_back({{"source", r.label}, {"fidelity", r.fidelity}});
        write_output(c.out, j.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << "source,fidelity\n";
        for (const BudgetRow& r : rows) s << r.label << ',' << format_double(r.fidelity) << '\n';
        write_output(c.out, s.str());
    }
    return 0;
}

// Datasets by kind:
//   ramsey     time, contrast, uncertainty per line
//   nbar       time, excitation per line; needs --eta-omega
//   intensity  N followed by the probabilities of each repetition; needs --shots
int cmd_characterize(const std::string& path, const std::string& kind, std::optional<double> eta_omega,
                     const Common& c) {
    nlohmann::json j;
    j["kind"] = kind;
    if (kind == "ramsey") {
        const SpectrumFit fit = fit_spectrum(RamseyDataset::load(path), NoiseSpectrumModel{});
        j["alpha"] = fit.model.alpha;
        j["gamma_hz"] = fit.model.gamma;
        j["a1"] = fit.model.a1;
        j["a2"] = fit.model.a2;
        j["chi2"] = fit.chi2;
        j["iterations"] = fit.iterations;
        j["converged"] = fit.converged;
        if (!fit.converged) throw ConvergenceError("spectrum fit did not converge");
    } else {
        std::istringstream in(read_file(path));
        std::string line;
        std::vector<std::vector<double>> rows;
        while (std::getline(in, line)) {
            if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
            for (char& ch : line)
                if (ch == ',') ch = ' ';
            std::istringstream ls(line);
            std::vector<double> row;
            std::string tok;
            while (ls >> tok) row.push_back(parse_double(tok, "dataset value"));
            if (!row.empty()) rows.push_back(std::move(row));
        }
        if (kind == "nbar") {
            require(eta_omega.has_value(), "nbar fits need --eta-omega");
            std::vector<std::pair<double, double>> data;
            for (const auto& r : rows) {
                require(r.size() == 2, "nbar rows are: time, excitation");
                data.emplace_back(r[0], r[1]);
            }
            const NbarFit fit = fit_nbar(data, *eta_omega);
            j["nbar"] = fit.nbar;
            j["sum_sq"] = fit.sum_sq;
        } else if (kind == "intensity") {
            require(c.shots.has_value(), "intensity analysis needs --shots");
            std::vector<IntensityRun> runs;
            for (const auto& r : rows) {
                require(r.size() >= 3, "intensity rows are: N, p1, p2, ...");
                runs.push_back({static_cast<int>(r[0]), std::vector<double>(r.begin() + 1, r.end()), *c.shots});
            }
            const IntensityAnalysis a = intensity_fluctuation_analysis(runs);
            j["slope"] = a.slope;
            j["slope_error"] = a.slope_error;
            j["rel_fluct"] = a.rel_fluct;
            j["rel_fluct_error"] = a.rel_fluct_error;
            j["warnings"] = a.warnings;
        } else {
            throw ValidationError("unknown dataset kind '" + kind + "'");
        }
    }
    if (c.format == "json") {
        write_output(c.out, j.dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << "key,value\n";
        for (const auto& [k, v] : j.items())
            if (!v.is_array()) s << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        write_output(c.out, s.str());
    }
    return 0;
}

int cmd_benchmark(const std::string& cfg_path, const Common& c) {
    SuiteConfig cfg = SuiteConfig::from_config(KeyValueConfig::load(cfg_path));
    if (c.seed) cfg.run.seed = *c.seed;
    if (c.shots) cfg.run.shots = *c.shots;
    if (c.trajectories) cfg.run.trajectories = *c.trajectories;
    require(!c.out.empty(), "benchmark needs --out DIR");
    const std::vector<BenchmarkReport> reports = benchmark_suite(cfg);
    for (const auto& p : write_reports(reports, c.out)) std::cout << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tiqc: trapped-ion quantum processor emulator and compiler"};
    app.require_subcommand(1);

    Common c;
    std::string input, noise, kind = "ramsey";
    std::vector<std::string> sources;
    std::optional<double> eta_omega;

    auto* sim = app.add_subcommand("simulate", "Run a pulse sequence through the noise engine");
    sim->add_option("sequence", input, "Sequence file or corpus:<name>")->required();
    sim->add_option("--noise", noise, "none, table4 or a noise config file");
    add_common(sim, c);

    auto* syn = app.add_subcommand("synthesize", "Synthesize a pulse sequence for a target");
    syn->add_option("target", input, "Synthesis target file")->required();
    add_common(syn, c);
    syn->get_option("--format")->description("json report or csv (bare sequence text)");

    auto* chr = app.add_subcommand("characterize", "Fit model parameters to a dataset");
    chr->add_option("dataset", input, "Dataset file")->required();
    chr->add_option("--kind", kind, "Dataset kind")->check(CLI::IsMember({"ramsey", "nbar", "intensity"}));
    chr->add_option("--eta-omega", eta_omega, "Sideband Rabi frequency eta * Omega0 (rad/s)");
    add_common(chr, c);

    auto* bench = app.add_subcommand("benchmark", "Run benchmark algorithms and write reports");
    bench->add_option("config", input, "Suite config file")->required();
    add_common(bench, c);

    auto* bud = app.add_subcommand("budget", "Per-source error budget of a sequence");
    bud->add_option("sequence", input, "Sequence file or corpus:<name>")->required();
    bud->add_option("--noise", noise, "none, table4 or a noise config file (default table4)");
    bud->add_option("--sources", sources, "Sources to budget (default: all enabled)");
    add_common(bud, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "tiqc: " << e.what() << "\nRun with --help for more information.\n";
        return kExitValidation;
    }

    try {
        if (*sim) return cmd_simulate(input, noise, c);
        if (*syn) return cmd_synthesize(input, c);
        if (*chr) return cmd_characterize(input, kind, eta_omega, c);
        if (*bench) return cmd_benchmark(input, c);
        if (*bud) return cmd_budget(input, noise, sources, c);
    } catch (const ValidationError& e) {
        std::cerr << "tiqc: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ConvergenceError& e) {
        std::cerr << "tiqc: " << e.what() << "\n";
        return kExitConvergence;
    }
    return 0;
}
