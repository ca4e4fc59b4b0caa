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

#include "tiqc/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tiqc/sequence_text.hpp"

namespace tiqc {
namespace {

PureState ket_sum(std::initializer_list<const char*> kets) {
    Vector v = Vector::Zero(8);
    for (const char* k : kets) v += PureState::from_bits(k).amplitudes();
    return PureState(v);
}

ProbDist clean_dist(std::vector<double> p) {
    double s = 0.0;
    for (double& x : p) {
        x = std::max(0.0, x);
        s += x;
    }
    for (double& x : p) x /= s;
    return ProbDist(std::move(p));
}

ProbDist diag_dist(const Matrix& rho) {
    std::vector<double> p(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) p[static_cast<std::size_t>(i)] = rho(i, i).real();
    return clean_dist(std::move(p));
}

ProbDist amp_dist(const Vector& v) {
    std::vector<double> p(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(v(i));
    return clean_dist(std::move(p));
}

// Outcome k from classical bits, bit s = measurement s.
std::size_t outcome_of(const std::vector<int>& bits) {
    std::size_t k = 0;
    for (std::size_t s = 0; s < bits.size(); ++s) {
        require(bits[s] == 0 || bits[s] == 1, "classical bit never written");
        if (bits[s]) k |= std::size_t{1} << s;
    }
    return k;
}

BenchmarkReport finish(BenchmarkReport r) {
    r.sso = sso(r.ideal, r.measured);
    r.distinguishability = distinguishability(r.ideal, r.measured);
    return r;
}

ProbDist exact_outcomes(const PulseSequence& seq, const DensityMatrix& initial) {
    const ExactResult ex = evaluate_exact(seq, initial);
    std::vector<double> p(8, 0.0);
    for (const auto& [bits, prob] : ex.records) p[outcome_of(bits)] += prob;
    return clean_dist(std::move(p));
}

ProbDist sampled_outcomes(const SimResult& sim, std::size_t size) {
    std::vector<std::uint64_t> counts(size, 0);
    for (const auto& bits : sim.classical_bits) ++counts[outcome_of(bits)];
    return ProbDist::from_counts(counts);
}

void add_hadamard(PulseSequence& seq, int ion) {
    // Sz(pi) then R_{pi/2}(pi/2) is a Hadamard up to global phase.
    seq.push(op::ZRot{ion, kPi});
    seq.push(op::Collective{kPi / 2, kPi / 2});
}

}  // namespace

double sso(const ProbDist& p, const ProbDist& q) {
    require(p.size() == q.size(), "distributions differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::sqrt(p[i] * q[i]);
    return std::clamp(s * s, 0.0, 1.0);
}

double distinguishability(const ProbDist& p, const ProbDist& q) {
    require(p.size() == q.size(), "distributions differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return std::clamp(1.0 - 0.5 * s, 0.0, 1.0);
}

UnitaryMatrix qft_ideal(int n) {
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Matrix f(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k)
            f(j, k) = std::polar(norm, 2.0 * kPi * static_cast<double>((j * k) % d) / static_cast<double>(d));
    return UnitaryMatrix(std::move(f));
}

std::string BenchmarkReport::to_json() const {
    nlohmann::json j;
    j["algorithm"] = algorithm;
    j["input"] = input_label;
    j["ideal"] = ideal.values();
    j["measured"] = measured.values();
    j["sso"] = sso;
    j["distinguishability"] = distinguishability;
    j["shots"] = shots;
    j["seed"] = seed;
    j["reference_sso_percent"] = reference_sso ? nlohmann::json(*reference_sso) : nlohmann::json(nullptr);
    j["reference_distinguishability_percent"] =
        reference_distinguishability ? nlohmann::json(*reference_distinguishability) : nlohmann::json(nullptr);
    j["notes"] = notes;
    return j.dump(2);
}

const std::vector<LabelledInput>& coherent_qft_inputs() {
    static const std::vector<LabelledInput> inputs = {
        {"(|000>+|001>+|010>+|011>+|100>+|101>+|110>+|111>)/sqrt(8)", "1",
         ket_sum({"000", "001", "010", "011", "100", "101", "110", "111"}), 77.1, 77.1},
        {"(|110>+|100>+|010>+|000>)/2", "2", ket_sum({"110", "100", "010", "000"}), 78.0, 73.3},
        {"(|110>+|100>+|011>+|000>)/2", "3", ket_sum({"110", "100", "011", "000"}), 90.4, 86.4},
        {"(|011>+|000>)/sqrt(2)", "4", ket_sum({"011", "000"}), 94.8, 87.4},
        {"|000>", "8", ket_sum({"000"}), 97.3, 88.1},
    };
    return inputs;
}

const std::vector<LabelledInput>& kitaev_qft_inputs() {
    static const std::vector<LabelledInput> inputs = {
        {"(|000>+|100>+|010>+|110>)/2", "2", ket_sum({"000", "100", "010", "110"}), 99.5, 94.5},
        {"(|100>+|000>)/sqrt(2)", "4", ket_sum({"100", "000"}), 99.6, 96.4},
        {"|000>", "8", ket_sum({"000"}), 99.7, 95.6},
    };
    return inputs;
}

// ------------------------------------------------------------ coherent QFT

const QftMapping& coherent_qft_mapping() {
    static const QftMapping mapping = [] {
        const PulseSequence seq = load_corpus("a2_qft3");
        Equivalences eq;
        eq.io_permutations = true;
        eq.diagonal_phases = true;
        const Matrix f = qft_ideal(3).matrix();
        VerifyReport fwd = verify_sequence(seq, f, 1e-6, eq);
        VerifyReport inv = verify_sequence(seq, f.adjoint(), 1e-6, eq);
        if (inv.fidelity > fwd.fidelity) return QftMapping{std::move(inv), true};
        return QftMapping{std::move(fwd), false};
    }();
    return mapping;
}

BenchmarkReport run_coherent_qft(const PureState& input, const RunOptions& opts, const std::string& label) {
    require(input.n_qubits() == 3, "the coherent QFT runs on three qubits");
    const QftMapping& map = coherent_qft_mapping();
    const PulseSequence seq = load_corpus("a2_qft3");
    const Vector prepared = map.report.frame_in * input.amplitudes();

    BenchmarkReport r;
    r.algorithm = "coherent_qft";
    r.input_label = label;
    r.ideal = amp_dist(qft_ideal(3).matrix() * input.amplitudes());
    r.seed = opts.seed;
    if (map.inverse)
        r.notes.push_back("sequence realizes the inverse transform; its output distribution matches the forward "
                          "transform for real inputs");
    r.notes.push_back("sequence fidelity under io permutations and phase frames: " +
                      format_double(map.report.fidelity));

    ProbDist exact = ProbDist::uniform(8);
    if (opts.noise) {
        SimOptions so;
        so.workers = opts.workers;
        so.initial = PureState(prepared);
        const SimResult sim = simulate(seq, *opts.noise, opts.trajectories, opts.seed, so);
        const Matrix& fo = map.report.frame_out;
        exact = diag_dist(fo * sim.density.matrix() * fo.adjoint());
        r.notes.push_back("trajectories: " + std::to_string(opts.trajectories));
    } else {
        const Vector out = sequence_unitary(seq).matrix() * prepared;
        exact = amp_dist(map.report.frame_out * out);
    }
    if (opts.shots > 0) {
        const std::vector<std::uint64_t> counts = sample_outcomes(exact, opts.shots, opts.seed);
        r.measured = ProbDist::from_counts(counts);
        r.shots = opts.shots;
    } else {
        r.measured = exact;
    }
    return finish(std::move(r));
}

// -------------------------------------------------------------- Kitaev QFT

std::array<Vector, 3> product_factors(const PureState& input) {
    require(input.n_qubits() == 3, "the Kitaev QFT takes a three-qubit input");
    const DensityMatrix rho = input.projector();
    std::array<Vector, 3> out;
    for (int q = 0; q < 3; ++q) {
        const int keep[1] = {q};
        const DensityMatrix r = partial_trace(rho, keep);
        require(r.purity() > 1.0 - 1e-9, "input is entangled; the Kitaev QFT needs a product state");
        Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix());
        out[static_cast<std::size_t>(q)] = es.eigenvectors().col(1);
    }
    return out;
}

PulseSequence kitaev_qft_sequence(const std::array<Vector, 3>& factors) {
    PulseSequence seq;
    seq.n_qubits = 1;
    seq.name = "kitaev_qft3";
    for (int s = 0; s < 3; ++s) {
        const Vector& f = factors[static_cast<std::size_t>(s)];
        require(f.size() == 2, "factors must be single-qubit states");
        const double theta = 2.0 * std::atan2(std::abs(f(1)), std::abs(f(0)));
        const double phi = std::arg(f(1)) - std::arg(f(0));
        seq.push(op::Collective{kPi / 2, theta}, "prepare input qubit " + std::to_string(s + 1));
        seq.push(op::ZRot{0, phi});
        for (int j = 0; j < s; ++j) seq.push(op::ConditionalZRot{0, 2.0 * kPi / std::pow(2.0, s - j + 1), j});
        add_hadamard(seq, 0);
        seq.push(op::Measure{0, s});
        seq.push(op::AmpDamp{0, 1.0, 0}, "reset");
    }
    return seq;
}

BenchmarkReport run_kitaev_qft(const PureState& input, const RunOptions& opts, const std::string& label) {
    const std::array<Vector, 3> factors = product_factors(input);
    const PulseSequence seq = kitaev_qft_sequence(factors);
    require(opts.shots >= 1 || !opts.noise, "a noisy Kitaev QFT needs at least one shot");
    BenchmarkReport r;
    r.algorithm = "kitaev_qft";
    r.input_label = label;
    r.ideal = amp_dist(qft_ideal(3).matrix() * input.amplitudes());
    r.seed = opts.seed;
    if (opts.shots == 0) {
        r.measured = exact_outcomes(seq, PureState::basis(1, 0).projector());
    } else {
        SimOptions so;
        so.workers = opts.workers;
        const NoiseParams p = opts.noise ? *opts.noise : NoiseParams::noiseless();
        r.measured = sampled_outcomes(simulate(seq, p, opts.shots, opts.seed, so), 8);
        r.shots = opts.shots;
    }
    r.notes.push_back("measurement s is outcome bit s (first measurement least significant)");
    return finish(std::move(r));
}

// ----------------------------------------------------------- order finding

std::array<int, 4> PermutationSpec::power(int k) const {
    require(k >= 0, "permutation power must be >= 0");
    std::array<int, 4> out = {0, 1, 2, 3};
    for (int i = 0; i < k; ++i)
        for (int& y : out) y = mapping[static_cast<std::size_t>(y)];
    return out;
}

int PermutationSpec::order_on(int y) const {
    require(y >= 0 && y < 4, "register value outside 0..3");
    int k = 1;
    for (int z = mapping[static_cast<std::size_t>(y)]; z != y; z = mapping[static_cast<std::size_t>(z)]) ++k;
    return k;
}

const std::vector<PermutationSpec>& permutation_specs() {
    static const std::vector<PermutationSpec> specs = [] {
        const std::vector<std::string> all = {"a3_controlled_pi1", "a4_controlled_pi2", "a5_controlled_pi3",
                                              "a6_controlled_pi3_squared", "a7_controlled_pi4",
                                              "a8_controlled_pi4_squared"};
        auto order = [&](std::vector<std::string> first) {
            for (const std::string& s : all)
                if (std::find(first.begin(), first.end(), s) == first.end()) first.push_back(s);
            return first;
        };
        return std::vector<PermutationSpec>{
            {"pi1", {0, 3, 2, 1}, order({"a3_controlled_pi1"}), 0, 75.3, 75.3},
            {"pi2", {1, 0, 3, 2}, order({"a4_controlled_pi2"}), 0, 86.4, 86.5},
            {"pi3", {0, 3, 1, 2}, order({"a5_controlled_pi3", "a6_controlled_pi3_squared"}), 1, 85.9, 70.3},
            {"pi4", {3, 0, 1, 2}, order({"a7_controlled_pi4", "a8_controlled_pi4_squared"}), 0, 91.6, 90.7},
        };
    }();
    return specs;
}

const PermutationSpec& permutation_spec(const std::string& name) {
    for (const PermutationSpec& s : permutation_specs())
        if (s.name == name) return s;
    throw ValidationError("unknown permutation '" + name + "'");
}

Matrix controlled_permutation(const std::array<int, 4>& mapping) {
    Matrix u = Matrix::Zero(8, 8);
    for (int y = 0; y < 4; ++y) {
        u(y, y) = 1.0;
        u(4 + mapping[static_cast<std::size_t>(y)], 4 + y) = 1.0;
    }
    UnitaryMatrix check(u);
    return u;
}

ControlledBlock controlled_block(const PermutationSpec& spec, int power) {
    const std::array<int, 4> perm = spec.power(power);
    if (perm == std::array<int, 4>{0, 1, 2, 3}) return ControlledBlock{{}, "identity", 1.0};

    static std::mutex mu;
    static std::map<std::pair<std::array<int, 4>, std::string>, VerifyReport> cache;
    const Matrix target = controlled_permutation(perm);
    Equivalences eq;
    eq.relabel = true;
    eq.bit_flips = true;
    eq.diagonal_phases = true;
    double best_fid = 0.0;
    for (const std::string& stem : spec.block_candidates) {
        VerifyReport rep;
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = cache.find({perm, stem});
            if (it == cache.end())
                it = cache.emplace(std::make_pair(perm, stem), verify_sequence(load_corpus(stem), target, 1e-6, eq))
                         .first;
            rep = it->second;
        }
        best_fid = std::max(best_fid, rep.fidelity);
        if (!rep.passed) continue;
        ControlledBlock b;
        b.source = stem;
        b.fidelity = rep.fidelity;
        b.ops.push_back(op::Frame{"frame_in " + stem, rep.frame_in});
        for (const NativeOp& o : load_corpus(stem).ops) b.ops.push_back(o);
        b.ops.push_back(op::Frame{"frame_out " + stem, rep.frame_out});
        return b;
    }
    return ControlledBlock{{op::Frame{"ideal controlled " + spec.name + "^" + std::to_string(power), target}},
                           "ideal",
                           best_fid};
}

PulseSequence order_finding_sequence(const PermutationSpec& spec, std::vector<std::string>* notes) {
    PulseSequence seq;
    seq.n_qubits = 3;
    seq.name = "order_finding_" + spec.name;
    auto hide_register = [&] {
        seq.push(op::Hide{1});
        seq.push(op::Hide{2});
    };
    auto unhide_register = [&] {
        seq.push(op::Unhide{1});
        seq.push(op::Unhide{2});
    };
    for (int s = 0; s < 3; ++s) {
        const int power = 1 << (2 - s);
        hide_register();
        add_hadamard(seq, 0);
        unhide_register();
        const ControlledBlock block = controlled_block(spec, power);
        for (const NativeOp& o : block.ops) seq.push(o);
        if (notes && block.source != "identity") {
            std::string msg = "controlled " + spec.name + "^" + std::to_string(power) + ": ";
            if (block.source == "ideal")
                msg += "no corpus sequence verifies (best fidelity " + format_double(block.fidelity) +
                       "); ideal block used";
            else
                msg += block.source + " with exact frames (fidelity " + format_double(block.fidelity) + ")";
            notes->push_back(msg);
        }
        for (int j = 0; j < s; ++j) seq.push(op::ConditionalZRot{0, -2.0 * kPi / std::pow(2.0, s - j + 1), j});
        hide_register();
        add_hadamard(seq, 0);
        seq.push(op::Measure{0, s});
        seq.push(op::AmpDamp{0, 1.0, 0}, "reset");
        unhide_register();
        seq.push(op::Recool{800e-6});
    }
    return seq;
}

ProbDist order_finding_ideal(const PermutationSpec& spec, int y) {
    const int r = spec.order_on(y);
    std::vector<double> p(8, 0.0);
    for (int j = 0; j < r; ++j) {
        const double phase = static_cast<double>(j) / r;
        for (int k = 0; k < 8; ++k) {
            Complex s = 0.0;
            for (int t = 0; t < 8; ++t) s += std::polar(1.0, 2.0 * kPi * t * (phase - k / 8.0));
            p[static_cast<std::size_t>(k)] += std::norm(s / 8.0) / r;
        }
    }
    return clean_dist(std::move(p));
}

BenchmarkReport run_order_finding(const PermutationSpec& spec, int y, const RunOptions& opts) {
    require(y >= 0 && y < 4, "register input outside 0..3");
    require(opts.shots >= 1 || !opts.noise, "noisy order finding needs at least one shot");
    BenchmarkReport r;
    r.algorithm = "order_finding";
    r.input_label = spec.name + "(|" + std::to_string(y) + ">)";
    const PulseSequence seq = order_finding_sequence(spec, &r.notes);
    const PureState initial = PureState::basis(3, static_cast<std::size_t>(y));
    r.ideal = order_finding_ideal(spec, y);
    r.seed = opts.seed;
    if (opts.shots == 0) {
        r.measured = exact_outcomes(seq, initial.projector());
    } else {
        SimOptions so;
        so.workers = opts.workers;
        so.initial = initial;
        const NoiseParams p = opts.noise ? *opts.noise : NoiseParams::noiseless();
        r.measured = sampled_outcomes(simulate(seq, p, opts.shots, opts.seed, so), 8);
        r.shots = opts.shots;
    }
    r.notes.push_back("order of " + spec.name + " on |" + std::to_string(y) + ">: " + std::to_string(spec.order_on(y)));
    return finish(std::move(r));
}

// ------------------------------------------------------------------- suite

SuiteConfig SuiteConfig::from_config(const KeyValueConfig& cfg) {
    static const std::vector<std::string> known = {"suites", "noise", "shots", "seed", "trajectories", "workers"};
    for (const std::string& k : cfg.keys())
        require(std::find(known.begin(), known.end(), k) != known.end(), "unknown benchmark key '" + k + "'");
    SuiteConfig s;
    if (cfg.has("suites"))
        for (const std::string& name : cfg.get_list("suites")) {
            if (name == "coherent_qft") s.coherent_qft = true;
            else if (name == "kitaev_qft") s.kitaev_qft = true;
            else if (name == "order_finding") s.order_finding = true;
            else throw ValidationError("unknown benchmark suite '" + name + "'");
        }
    const std::string noise = cfg.get("noise").value_or("none");
    if (noise == "table4") s.run.noise = NoiseParams::table4();
    else require(noise == "none", "noise must be none or table4");
    s.run.shots = static_cast<std::uint64_t>(cfg.get_int("shots", static_cast<long long>(s.run.shots)));
    s.run.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(s.run.seed)));
    s.run.trajectories = static_cast<std::size_t>(cfg.get_int("trajectories", static_cast<long long>(s.run.trajectories)));
    s.run.workers = static_cast<unsigned>(cfg.get_int("workers", 0));
    return s;
}

std::vector<BenchmarkReport> benchmark_suite(const SuiteConfig& cfg) {
    std::vector<BenchmarkReport> out;
    auto with_refs = [](BenchmarkReport r, double s, double d, const std::string& period) {
        r.reference_sso = s;
        r.reference_distinguishability = d;
        r.notes.push_back("period label: " + period);
        return r;
    };
    if (cfg.coherent_qft)
        for (const LabelledInput& in : coherent_qft_inputs())
            out.push_back(with_refs(run_coherent_qft(in.state, cfg.run, in.label), in.reference_sso,
                                    in.reference_distinguishability, in.period));
    if (cfg.kitaev_qft)
        for (const LabelledInput& in : kitaev_qft_inputs())
            out.push_back(with_refs(run_kitaev_qft(in.state, cfg.run, in.label), in.reference_sso,
                                    in.reference_distinguishability, in.period));
    if (cfg.order_finding)
        for (const PermutationSpec& spec : permutation_specs()) {
            BenchmarkReport r = run_order_finding(spec, spec.reference_input, cfg.run);
            r.reference_sso = spec.reference_sso;
            r.reference_distinguishability = spec.reference_distinguishability;
            out.push_back(std::move(r));
        }
    return out;
}

std::vector<std::filesystem::path> write_reports(const std::vector<BenchmarkReport>& reports,
                                                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    std::ostringstream csv;
    csv << "index,algorithm,input,sso,distinguishability,reference_sso,reference_distinguishability,shots,seed\n";
    auto quote = [](const std::string& s) { return "\"" + s + "\""; };
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const BenchmarkReport& r = reports[i];
        char idx[16];
        std::snprintf(idx, sizeof idx, "%03zu", i);
        const std::filesystem::path p = dir / (std::string(idx) + "_" + r.algorithm + ".json");
        std::ofstream(p) << r.to_json() << "\n";
        paths.push_back(p);
        csv << i << ',' << r.algorithm << ',' << quote(r.input_label) << ',' << format_double(r.sso) << ','
            << format_double(r.distinguishability) << ','
            << (r.reference_sso ? format_double(*r.reference_sso) : "") << ','
            << (r.reference_distinguishability ? format_double(*r.reference_distinguishability) : "") << ','
            << r.shots << ',' << r.seed << '\n';
    }
    const std::filesystem::path summary = dir / "summary.csv";
    std::ofstream(summary) << csv.str();
    paths.push_back(summary);
    return paths;
}

}  // namespace tiqc
