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

#include "tiqc/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "tiqc/compiler.hpp"

namespace tiqc {
namespace {

// Generator H of exp(-i theta H) with its eigendecomposition.
struct Template {
    NativeOp prototype;  // theta ignored
    Matrix h;
    Matrix v;
    RealVector lambda;
    double norm;
};

Template make_template(NativeOp proto, int n, const CrosstalkMatrix* xt) {
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    Matrix h = Matrix::Zero(d, d);
    Mat2 sz;
    sz << 1.0, 0.0, 0.0, -1.0;
    if (const auto* z = std::get_if<op::ZRot>(&proto)) {
        for (int j = 0; j < n; ++j) {
            const double e = xt ? (*xt)(z->ion, j) : (j == z->ion ? 1.0 : 0.0);
            if (e != 0.0) h += e * embed_1q(sz, n, j) / 2.0;
        }
    } else {
        const double phi = std::holds_alternative<op::MS>(proto) ? std::get<op::MS>(proto).phi
                                                                  : std::get<op::Collective>(proto).phi;
        Mat2 s;
        s << 0.0, std::exp(-kI * phi), std::exp(kI * phi), 0.0;
        Matrix big = Matrix::Zero(d, d);
        for (int j = 0; j < n; ++j) big += embed_1q(s, n, j);
        h = std::holds_alternative<op::MS>(proto) ? Matrix(big * big / 4.0) : Matrix(big / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    return Template{std::move(proto), h, es.eigenvectors(), es.eigenvalues(), norm};
}

NativeOp with_theta(const NativeOp& proto, double theta) {
    NativeOp op = proto;
    std::visit(
        [&](auto& o) {
            if constexpr (requires { o.theta; }) o.theta = theta;
        },
        op);
    return op;
}

struct Gate {
    int tmpl;
    double theta;
};

class Problem {
   public:
    Problem(const Matrix& target, int n, const Alphabet& alphabet, const OptimizerConfig& cfg)
        : n_(n), d_(static_cast<Eigen::Index>(dim_for(n))), column_(cfg.column_only), target_(target) {
        const CrosstalkMatrix* xt = nullptr;
        if (cfg.crosstalk_aware) {
            xt_ = cfg.crosstalk ? *cfg.crosstalk : CrosstalkMatrix::nearest_neighbor(n, 0.03);
            xt = &*xt_;
        }
        if (alphabet.zrot)
            for (int q = 0; q < n; ++q) templates_.push_back(make_template(op::ZRot{q, 0.0}, n, xt));
        for (double p : alphabet.collective_phases) templates_.push_back(make_template(op::Collective{p, 0.0}, n, xt));
        for (double p : alphabet.ms_phases) templates_.push_back(make_template(op::MS{p, 0.0}, n, xt));
        require(!templates_.empty(), "synthesis alphabet is empty");
        tcol_ = target.col(0);
    }

    int n_templates() const { return static_cast<int>(templates_.size()); }
    const Template& tmpl(int k) const { return templates_[static_cast<std::size_t>(k)]; }
    Eigen::Index dim() const { return d_; }

    Matrix gate(const Gate& g) const {
        const Template& t = tmpl(g.tmpl);
        Vector ph(t.lambda.size());
        for (Eigen::Index j = 0; j < ph.size(); ++j) ph(j) = std::exp(-kI * g.theta * t.lambda(j));
        return t.v * ph.asDiagonal() * t.v.adjoint();
    }

    // Working representation: with column_ the "unitary" is a d x 1 state.
    Matrix start() const { return column_ ? Matrix(Matrix::Identity(d_, d_).col(0)) : Matrix(Matrix::Identity(d_, d_)); }

    Complex overlap(const Matrix& u) const {
        return column_ ? (tcol_.adjoint() * u.col(0))(0, 0) : (target_.adjoint() * u).trace();
    }
    double norm_factor() const { return column_ ? 1.0 : static_cast<double>(d_); }

    double infidelity(const std::vector<Gate>& gates) const {
        Matrix u = start();
        for (const Gate& g : gates) u = gate(g) * u;
        return std::max(0.0, 1.0 - std::abs(overlap(u)) / norm_factor());
    }

    // One coordinate-descent sweep; returns the infidelity afterwards.
    double sweep(std::vector<Gate>& gates) const {
        const std::size_t m = gates.size();
        if (m == 0) return infidelity(gates);
        std::vector<Matrix> suffix(m + 1);
        suffix[m] = Matrix::Identity(d_, d_);
        for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] * gate(gates[k]);
        Matrix prefix = start();
        for (std::size_t k = 0; k < m; ++k) {
            const Template& t = tmpl(gates[k].tmpl);
            // overlap(theta) = sum_j c_j exp(-i theta lambda_j)
            Vector c;
            if (column_) {
                const Matrix left = tcol_.adjoint() * suffix[k + 1] * t.v;  // 1 x d
                const Matrix right = t.v.adjoint() * prefix;                // d x 1
                c = left.transpose().cwiseProduct(right);
            } else {
                const Matrix m2 = t.v.adjoint() * prefix * target_.adjoint() * suffix[k + 1] * t.v;
                c = m2.diagonal();
            }
            auto cost = [&](double th) {
                Complex s = 0.0;
                for (Eigen::Index j = 0; j < c.size(); ++j) s += c(j) * std::exp(-kI * th * t.lambda(j));
                return -std::abs(s);
            };
            const double th0 = gates[k].theta;
            double best_th = th0, best_c = cost(th0);
            const int grid = 48;
            for (int i = 0; i < grid; ++i) {
                const double th = th0 - kPi + 2.0 * kPi * (i + 0.5) / grid;
                const double cv = cost(th);
                if (cv < best_c) {
                    best_c = cv;
                    best_th = th;
                }
            }
            const double h = 2.0 * kPi / grid;
            std::uintmax_t iters = 100;
            const auto r = boost::math::tools::brent_find_minima(cost, best_th - h, best_th + h, 52, iters);
            if (r.second < best_c) {
                best_th = r.first;
                best_c = r.second;
            }
            if (best_c <= cost(th0)) gates[k].theta = best_th;
            prefix = gate(gates[k]) * prefix;
        }
        return std::max(0.0, 1.0 - std::abs(overlap(prefix)) / norm_factor());
    }

    // Levenberg-Marquardt on vec(U - e^{i chi} T) over all angles and chi.
    struct Residuals : Eigen::DenseFunctor<double> {
        const Problem* p;
        std::vector<Gate> gates;
        Residuals(const Problem* prob, const std::vector<Gate>& g, int values)
            : Eigen::DenseFunctor<double>(static_cast<int>(g.size()) + 1, values), p(prob), gates(g) {}

        void load(const Eigen::VectorXd& x) {
            for (std::size_t k = 0; k < gates.size(); ++k) gates[k].theta = x(static_cast<Eigen::Index>(k));
        }
        Vector target_vec() const {
            const Matrix& t = p->column_ ? Matrix(p->tcol_) : p->target_;
            return Eigen::Map<const Vector>(t.data(), t.size());
        }
        int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) {
            load(x);
            Matrix u = p->start();
            for (const Gate& g : gates) u = p->gate(g) * u;
            const double chi = x(x.size() - 1);
            const Vector diff = (Eigen::Map<const Vector>(u.data(), u.size()) - std::exp(kI * chi) * target_vec()) /
                                std::sqrt(2.0 * p->norm_factor());
            f.head(diff.size()) = diff.real();
            f.tail(diff.size()) = diff.imag();
            return 0;
        }
        int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) {
            load(x);
            const std::size_t m = gates.size();
            std::vector<Matrix> g(m), suffix(m + 1);
            for (std::size_t k = 0; k < m; ++k) g[k] = p->gate(gates[k]);
            suffix[m] = Matrix::Identity(p->d_, p->d_);
            for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] * g[k];
            Matrix prefix = p->start();
            const double scale = 1.0 / std::sqrt(2.0 * p->norm_factor());
            const auto half = jac.rows() / 2;
            for (std::size_t k = 0; k < m; ++k) {
                const Matrix dk = suffix[k + 1] * (-kI * p->tmpl(gates[k].tmpl).h) * g[k] * prefix;
                const Vector col = Eigen::Map<const Vector>(dk.data(), dk.size()) * scale;
                jac.col(static_cast<Eigen::Index>(k)).head(half) = col.real();
                jac.col(static_cast<Eigen::Index>(k)).tail(half) = col.imag();
                prefix = g[k] * prefix;
            }
            const double chi = x(x.size() - 1);
            const Vector dchi = -kI * std::exp(kI * chi) * target_vec() * scale;
            jac.col(static_cast<Eigen::Index>(m)).head(half) = dchi.real();
            jac.col(static_cast<Eigen::Index>(m)).tail(half) = dchi.imag();
            return 0;
        }
    };

    void polish(std::vector<Gate>& gates) const {
        if (gates.empty()) return;
        Matrix u = start();
        for (const Gate& g : gates) u = gate(g) * u;
        const Eigen::Index size = column_ ? d_ : d_ * d_;
        Residuals fn(this, gates, static_cast<int>(2 * size));
        Eigen::VectorXd x(static_cast<Eigen::Index>(gates.size()) + 1);
        for (std::size_t k = 0; k < gates.size(); ++k) x(static_cast<Eigen::Index>(k)) = gates[k].theta;
        x(x.size() - 1) = std::arg(overlap(u));
        const double before = infidelity(gates);
        Eigen::LevenbergMarquardt<Residuals> lm(fn);
        lm.setMaxfev(400);
        lm.setXtol(1e-15);
        lm.setFtol(1e-18);
        lm.minimize(x);
        std::vector<Gate> trial = gates;
        for (std::size_t k = 0; k < trial.size(); ++k) trial[k].theta = x(static_cast<Eigen::Index>(k));
        if (infidelity(trial) <= before) gates = std::move(trial);
    }

    double optimize(std::vector<Gate>& gates) const {
        double f = infidelity(gates);
        for (int s = 0; s < 200; ++s) {
            const double g = sweep(gates);
            const bool small = f - g < 1e-10 * std::max(1.0, f) || g < 1e-13;
            f = g;
            if (small) break;
        }
        polish(gates);
        for (Gate& g : gates) g.theta = std::remainder(g.theta, 2.0 * kPi);
        return infidelity(gates);
    }

    PulseSequence to_sequence(const std::vector<Gate>& gates) const {
        PulseSequence seq;
        seq.n_qubits = n_;
        for (const Gate& g : gates) seq.push(with_theta(tmpl(g.tmpl).prototype, g.theta));
        return seq;
    }

   private:
    int n_;
    Eigen::Index d_;
    bool column_;
    Matrix target_;
    Vector tcol_;
    std::optional<CrosstalkMatrix> xt_;
    std::vector<Template> templates_;
};

struct RestartOutcome {
    std::vector<Gate> gates;
    double infidelity;
    bool converged;
    int rounds;
    std::vector<PruneStep> log;
};

Gate random_gate(const Problem& p, std::mt19937_64& rng, double spread) {
    std::uniform_int_distribution<int> pick(0, p.n_templates() - 1);
    std::uniform_real_distribution<double> angle(-spread, spread);
    const int t = pick(rng);
    return Gate{t, angle(rng)};
}

// Removes ops with |theta| below the threshold and logs the bound check.
void threshold_prune(const Problem& p, std::vector<Gate>& gates, double thr, int round, std::vector<PruneStep>& log,
                     double& inf) {
    double bound = 0.0;
    int removed = 0;
    std::vector<Gate> kept;
    for (const Gate& g : gates) {
        if (std::abs(g.theta) < thr) {
            bound += std::abs(g.theta) * p.tmpl(g.tmpl).norm;
            ++removed;
        } else {
            kept.push_back(g);
        }
    }
    if (removed == 0) return;
    const double after = p.infidelity(kept);
    log.push_back(PruneStep{round, removed, bound, inf, after, after - inf <= bound + 1e-12});
    gates = std::move(kept);
    inf = after;
}

RestartOutcome run_restart(const Problem& p, const OptimizerConfig& cfg, int restart) {
    std::seed_seq ss{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                     static_cast<std::uint32_t>(restart), 0x73796eu};
    std::mt19937_64 rng(ss);
    RestartOutcome out;
    for (int i = 0; i < cfg.initial_length; ++i) out.gates.push_back(random_gate(p, rng, kPi));
    double inf = p.infidelity(out.gates);
    double last_inf = inf;
    out.rounds = 0;
    for (int round = 1; round <= cfg.max_rounds; ++round) {
        out.rounds = round;
        inf = p.optimize(out.gates);
        threshold_prune(p, out.gates, cfg.prune_threshold, round, out.log, inf);
        if (inf <= cfg.target_infidelity) break;
        if (round > 1 && inf > 0.5 * last_inf) {
            std::uniform_int_distribution<std::size_t> where(0, out.gates.size());
            for (int i = 0; i < cfg.reinsert_batch; ++i) {
                const std::size_t at = where(rng);
                out.gates.insert(out.gates.begin() + static_cast<std::ptrdiff_t>(std::min(at, out.gates.size())),
                                 random_gate(p, rng, 0.1));
            }
            inf = p.infidelity(out.gates);
        }
        last_inf = inf;
    }
    if (inf <= cfg.target_infidelity) {
        // Greedy removal of ops whose job the rest can take over.
        for (std::size_t k = out.gates.size(); k-- > 0;) {
            if (k >= out.gates.size()) continue;
            std::vector<Gate> trial = out.gates;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
            double t_inf = p.optimize(trial);
            std::vector<PruneStep> t_log;
            threshold_prune(p, trial, cfg.prune_threshold, out.rounds, t_log, t_inf);
            if (t_inf <= cfg.target_infidelity) {
                out.gates = std::move(trial);
                out.log.insert(out.log.end(), t_log.begin(), t_log.end());
                inf = t_inf;
                k = std::min(k, out.gates.size());
            }
        }
    }
    out.infidelity = inf;
    out.converged = inf <= cfg.target_infidelity;
    return out;
}

}  // namespace

void OptimizerConfig::validate() const {
    require(initial_length >= 0, "initial_length must be >= 0");
    require(prune_threshold > 0.0, "prune_threshold must be > 0");
    require(max_rounds >= 1, "max_rounds must be >= 1");
    require(reinsert_batch >= 1, "reinsert_batch must be >= 1");
    require(target_infidelity > 0.0 && target_infidelity < 1.0, "target_infidelity must lie in (0, 1)");
    require(restarts >= 1, "restarts must be >= 1");
}

KeyValueConfig OptimizerConfig::to_config() const {
    KeyValueConfig c;
    c.set("initial_length", static_cast<double>(initial_length));
    c.set("prune_threshold", prune_threshold);
    c.set("max_rounds", static_cast<double>(max_rounds));
    c.set("reinsert_batch", static_cast<double>(reinsert_batch));
    c.set("target_infidelity", target_infidelity);
    c.set("seed", std::to_string(seed));
    c.set("crosstalk_aware", std::string(crosstalk_aware ? "true" : "false"));
    c.set("restarts", static_cast<double>(restarts));
    c.set("column_only", std::string(column_only ? "true" : "false"));
    return c;
}

OptimizerConfig OptimizerConfig::from_config(const KeyValueConfig& cfg) {
    static const std::vector<std::string> known = {"initial_length", "prune_threshold", "max_rounds",
                                                   "reinsert_batch", "target_infidelity", "seed",
                                                   "crosstalk_aware", "restarts", "column_only", "workers"};
    for (const std::string& k : cfg.keys())
        require(std::find(known.begin(), known.end(), k) != known.end(), "unknown optimizer key '" + k + "'");
    OptimizerConfig o;
    o.initial_length = cfg.get_int("initial_length", o.initial_length);
    o.prune_threshold = cfg.get_double("prune_threshold", o.prune_threshold);
    o.max_rounds = cfg.get_int("max_rounds", o.max_rounds);
    o.reinsert_batch = cfg.get_int("reinsert_batch", o.reinsert_batch);
    o.target_infidelity = cfg.get_double("target_infidelity", o.target_infidelity);
    o.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(o.seed)));
    o.crosstalk_aware = cfg.get_bool("crosstalk_aware", o.crosstalk_aware);
    o.restarts = cfg.get_int("restarts", o.restarts);
    o.column_only = cfg.get_bool("column_only", o.column_only);
    o.workers = static_cast<unsigned>(cfg.get_int("workers", 0));
    o.validate();
    return o;
}

double synthesis_infidelity(const PulseSequence& seq, const Matrix& target, bool column_only,
                            const CrosstalkMatrix* crosstalk) {
    const Matrix u = sequence_unitary(seq, crosstalk).matrix();
    require(u.rows() == target.rows(), "target dimension does not match the register");
    if (column_only) return std::max(0.0, 1.0 - std::abs(target.col(0).dot(u.col(0))));
    return std::max(0.0, 1.0 - std::abs((target.adjoint() * u).trace()) / static_cast<double>(u.rows()));
}

SynthesisResult synthesize(const Matrix& target, int n, const Alphabet& alphabet, const OptimizerConfig& cfg) {
    cfg.validate();
    require(n >= 1 && n <= 4, "synthesis supports 1 to 4 qubits");
    const auto d = static_cast<Eigen::Index>(dim_for(n));
    require(target.rows() == d && (target.cols() == d || (cfg.column_only && target.cols() >= 1)),
            "target dimension does not match the register");
    if (!cfg.column_only) UnitaryMatrix check(target);
    else require(std::abs(target.col(0).norm() - 1.0) < 1e-9, "target column must be normalized");

    const Problem problem(target, n, alphabet, cfg);
    std::vector<RestartOutcome> results(static_cast<std::size_t>(cfg.restarts));
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.restarts));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int r; (r = next.fetch_add(1)) < cfg.restarts;)
            results[static_cast<std::size_t>(r)] = run_restart(problem, cfg, r);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].infidelity < results[best].infidelity) best = r;
    const RestartOutcome& win = results[best];
    SynthesisResult out;
    out.sequence = problem.to_sequence(win.gates);
    out.sequence.name = "synthesized";
    out.infidelity = win.infidelity;
    out.converged = win.converged;
    out.rounds = win.rounds;
    out.restart = static_cast<int>(best);
    out.prune_log = win.log;
    return out;
}

}  // namespace tiqc
