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

#include "tiqc/sequence_text.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <utility>

#include "tiqc/config.hpp"

namespace tiqc {

namespace detail {
// Defined in the generated corpus_data.cpp.
const std::vector<std::pair<const char*, const char*>>& corpus_entries();
}  // namespace detail

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Returns an error message, or nothing with `out` set.
std::optional<std::string> try_parse_angle(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return "empty angle";
    double sign = 1.0;
    if (s.front() == '-' || s.front() == '+') {
        if (s.front() == '-') sign = -1.0;
        s.remove_prefix(1);
    }
    double num = 1.0;
    bool have_num = false;
    std::size_t i = 0;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.' || s[i] == 'e' ||
                            ((s[i] == '-' || s[i] == '+') && i > 0 && s[i - 1] == 'e')))
        ++i;
    if (i > 0) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + i, num);
        if (ec != std::errc() || p != s.data() + i) return "malformed number '" + std::string(s.substr(0, i)) + "'";
        have_num = true;
        s.remove_prefix(i);
    }
    s = trim(s);
    bool have_pi = false;
    if (!s.empty() && s.front() == '*') {
        s.remove_prefix(1);
        s = trim(s);
    }
    if (s.starts_with("pi")) {
        have_pi = true;
        s.remove_prefix(2);
    }
    if (!have_num && !have_pi) return "expected a number or 'pi'";
    s = trim(s);
    double den = 1.0;
    if (!s.empty()) {
        if (s.front() != '/') return "unexpected '" + std::string(s) + "' in angle";
        s = trim(s.substr(1));
        long long d = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec != std::errc() || p != s.data() + s.size() || d <= 0) return "denominator must be a positive integer";
        den = static_cast<double>(d);
    }
    const double v = sign * ((have_pi ? num * kPi : num) / den);
    if (!std::isfinite(v)) return "angle is not finite";
    out = v;
    return std::nullopt;
}

std::string shortest(double x) { return format_double(x); }

struct Arg {
    std::string_view text;
    int column;
};

class LineParser {
   public:
    LineParser(int line, std::vector<Arg> args, int op_column, std::string_view op)
        : line_(line), args_(std::move(args)), op_column_(op_column), op_(op) {}

    [[noreturn]] void fail(int column, const std::string& msg) const { throw ParseError(line_, column, msg); }

    void arity(std::size_t lo, std::size_t hi) const {
        if (args_.size() < lo || args_.size() > hi) {
            const std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi);
            fail(op_column_, std::string(op_) + " takes " + want + " arguments, got " + std::to_string(args_.size()));
        }
    }
    std::size_t count() const { return args_.size(); }

    int integer(std::size_t k, const char* what) const {
        const std::string_view s = trim(args_[k].text);
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size())
            fail(args_[k].column, std::string("expected integer ") + what + ", got '" + std::string(s) + "'");
        return v;
    }
    int ion(std::size_t k) const {
        const int v = integer(k, "ion");
        if (v < 1) fail(args_[k].column, "ion indices start at 1");
        return v - 1;
    }
    double angle(std::size_t k) const {
        double v = 0.0;
        if (auto err = try_parse_angle(args_[k].text, v)) fail(args_[k].column, *err);
        return v;
    }
    double real(std::size_t k, const char* what) const {
        const std::string_view s = trim(args_[k].text);
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
            fail(args_[k].column, std::string("expected number ") + what + ", got '" + std::string(s) + "'");
        return v;
    }
    std::string_view word(std::size_t k) const { return trim(args_[k].text); }
    int column(std::size_t k) const { return args_[k].column; }

   private:
    int line_;
    std::vector<Arg> args_;
    int op_column_;
    std::string_view op_;
};

NativeOp parse_op(const LineParser& a, std::string_view name, int column) {
    if (name == "R") {
        a.arity(2, 2);
        return op::Collective{a.angle(0), a.angle(1)};
    }
    if (name == "Sz") {
        a.arity(2, 2);
        return op::ZRot{a.ion(0), a.angle(1)};
    }
    if (name == "MS") {
        a.arity(2, 2);
        return op::MS{a.angle(0), a.angle(1)};
    }
    if (name == "HIDE") {
        a.arity(1, 1);
        return op::Hide{a.ion(0)};
    }
    if (name == "UNHIDE") {
        a.arity(1, 1);
        return op::Unhide{a.ion(0)};
    }
    if (name == "PD") {
        a.arity(2, 2);
        return op::PhaseDamp{a.ion(0), a.real(1, "gamma")};
    }
    if (name == "AD") {
        a.arity(2, 3);
        op::AmpDamp d{a.ion(0), a.real(1, "gamma")};
        if (a.count() == 3) d.target = a.integer(2, "target");
        return d;
    }
    if (name == "MEAS") {
        a.arity(2, 2);
        return op::Measure{a.ion(0), a.integer(1, "cbit")};
    }
    if (name == "CZROT") {
        a.arity(3, 4);
        op::ConditionalZRot c{a.ion(0), a.angle(1), a.integer(2, "cbit")};
        if (a.count() == 4) {
            if (a.word(3) != "neg") a.fail(a.column(3), "expected 'neg'");
            c.negate = true;
        }
        return c;
    }
    if (name == "RECOOL") {
        a.arity(1, 1);
        return op::Recool{a.real(0, "duration") / 1e6};
    }
    if (name == "IDLE") {
        a.arity(1, 1);
        return op::Idle{a.real(0, "duration") / 1e6};
    }
    a.fail(column, "unknown op '" + std::string(name) + "'");
}

std::string format_duration(double seconds) {
    double us = seconds * 1e6;
    for (double cand : {us, std::nextafter(us, 0.0), std::nextafter(us, 1e300)}) {
        const std::string s = shortest(cand);
        if (parse_double(s, "duration") / 1e6 == seconds) return s;
    }
    throw ValidationError("duration " + shortest(seconds) + " s has no exact microsecond spelling");
}

std::string emit_op(const NativeOp& op) {
    auto ion = [](int i) { return std::to_string(i + 1); };
    return std::visit(
        overloaded{
            [](const op::Collective& o) { return "R(" + format_angle(o.phi) + ", " + format_angle(o.theta) + ")"; },
            [&](const op::ZRot& o) { return "Sz(" + ion(o.ion) + ", " + format_angle(o.theta) + ")"; },
            [](const op::MS& o) { return "MS(" + format_angle(o.phi) + ", " + format_angle(o.theta) + ")"; },
            [&](const op::Hide& o) { return "HIDE(" + ion(o.ion) + ")"; },
            [&](const op::Unhide& o) { return "UNHIDE(" + ion(o.ion) + ")"; },
            [&](const op::PhaseDamp& o) { return "PD(" + ion(o.ion) + ", " + shortest(o.gamma) + ")"; },
            [&](const op::AmpDamp& o) {
                std::string s = "AD(" + ion(o.ion) + ", " + shortest(o.gamma);
                if (o.target != 0) s += ", " + std::to_string(o.target);
                return s + ")";
            },
            [&](const op::Measure& o) { return "MEAS(" + ion(o.ion) + ", " + std::to_string(o.cbit) + ")"; },
            [&](const op::ConditionalZRot& o) {
                return "CZROT(" + ion(o.ion) + ", " + format_angle(o.theta) + ", " + std::to_string(o.cbit) +
                       (o.negate ? ", neg)" : ")");
            },
            [](const op::Recool& o) { return "RECOOL(" + format_duration(o.duration) + ")"; },
            [](const op::Idle& o) { return "IDLE(" + format_duration(o.duration) + ")"; },
            [](const op::Frame& o) -> std::string {
                throw ValidationError("frame op '" + o.label + "' has no text form");
            },
        },
        op);
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& message)
    : ValidationError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

double parse_angle(std::string_view text) {
    double v = 0.0;
    if (auto err = try_parse_angle(text, v)) throw ValidationError("angle '" + std::string(text) + "': " + *err);
    return v;
}

std::string format_angle(double theta) {
    require(std::isfinite(theta), "cannot format a non-finite angle");
    if (theta == 0.0) return "0";
    auto round_trips = [&](const std::string& s) {
        double v = 0.0;
        return !try_parse_angle(s, v) && v == theta;
    };
    const double turns = theta / kPi;
    for (long long q = 1; q <= 64; ++q) {
        const double pr = std::round(turns * static_cast<double>(q));
        if (std::abs(pr) > 1e6) break;
        auto p = static_cast<long long>(pr);
        if (p == 0) continue;
        long long g = std::gcd(std::llabs(p), q);
        if (g != 1) continue;
        std::string s = p < 0 ? "-" : "";
        if (std::llabs(p) != 1) s += std::to_string(std::llabs(p));
        s += "pi";
        if (q != 1) s += "/" + std::to_string(q);
        if (round_trips(s)) return s;
    }
    std::string best;
    double t = turns;
    for (int k = 0; k < 3; ++k) t = std::nextafter(t, -1e300);
    for (int k = 0; k < 7; ++k, t = std::nextafter(t, 1e300)) {
        const std::string dec = shortest(t) + "pi";
        if (round_trips(dec) && (best.empty() || dec.size() < best.size())) best = dec;
    }
    const std::string rad = shortest(theta);
    if (!best.empty() && best.size() <= rad.size() + 2) return best;
    return rad;
}

PulseSequence parse_sequence(std::string_view text, int default_qubits) {
    PulseSequence seq;
    std::optional<int> qubits;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        const std::size_t line_start = pos;
        pos = end + 1;
        ++line_no;
        auto col = [&](std::string_view sub) { return static_cast<int>(sub.data() - text.data() - line_start) + 1; };

        const std::string_view raw = trim(line);
        if (!raw.empty() && raw.front() == '@') {
            // Header values are free text; '#' has no special meaning here.
            const std::size_t sp = raw.find_first_of(" \t");
            const std::string_view key = raw.substr(0, sp);
            const std::string_view value = sp == std::string_view::npos ? std::string_view{} : trim(raw.substr(sp));
            const std::string full_value(value);
            if (key == "@qubits") {
                int n = 0;
                auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
                if (value.empty() || ec != std::errc() || p != value.data() + value.size() || n < 1 ||
                    n > kMaxQubits)
                    throw ParseError(line_no, col(value.empty() ? key : value), "invalid qubit count");
                if (qubits) throw ParseError(line_no, col(key), "duplicate @qubits header");
                if (!seq.ops.empty()) throw ParseError(line_no, col(key), "@qubits must precede all ops");
                qubits = n;
            } else if (key == "@name") {
                seq.name = full_value;
            } else if (key == "@source") {
                seq.source = full_value;
            } else if (key == "@note") {
                seq.notes.push_back(full_value);
            } else {
                throw ParseError(line_no, col(key), "unknown header '" + std::string(key) + "'");
            }
            continue;
        }

        std::string annotation;
        if (auto h = line.find('#'); h != std::string_view::npos) {
            annotation = std::string(trim(line.substr(h + 1)));
            line = line.substr(0, h);
        }
        const std::string_view body = trim(line);
        if (body.empty()) {
            if (end == text.size()) break;
            continue;
        }

        const std::size_t open = body.find('(');
        if (open == std::string_view::npos) throw ParseError(line_no, col(body), "expected '(' after op name");
        const std::string_view name = trim(body.substr(0, open));
        if (body.back() != ')') throw ParseError(line_no, col(body.substr(body.size() - 1)), "expected ')'");
        std::string_view inner = body.substr(open + 1, body.size() - open - 2);
        std::vector<Arg> args;
        if (!trim(inner).empty()) {
            std::size_t a = 0;
            while (true) {
                const std::size_t c = inner.find(',', a);
                const std::string_view piece = inner.substr(a, c == std::string_view::npos ? inner.npos : c - a);
                const std::string_view t = trim(piece);
                if (t.empty()) throw ParseError(line_no, col(piece), "empty argument");
                args.push_back({t, col(t)});
                if (c == std::string_view::npos) break;
                a = c + 1;
            }
        }
        LineParser lp(line_no, std::move(args), col(name), name);
        if (!qubits) {
            if (default_qubits <= 0) throw ParseError(line_no, col(body), "missing @qubits header before first op");
            qubits = default_qubits;
        }
        NativeOp op = parse_op(lp, name, col(name));
        std::visit(
            [&](const auto& o) {
                if constexpr (requires { o.ion; }) {
                    if (o.ion >= *qubits)
                        throw ParseError(line_no, lp.column(0),
                                         "ion " + std::to_string(o.ion + 1) + " outside a " +
                                             std::to_string(*qubits) + "-ion register");
                }
            },
            op);
        seq.ops.push_back(std::move(op));
        seq.annotations.push_back(annotation);
        if (end == text.size()) break;
    }
    if (!qubits) {
        if (default_qubits <= 0) throw ParseError(line_no, 1, "missing @qubits header");
        qubits = default_qubits;
    }
    seq.n_qubits = *qubits;
    seq.validate();
    return seq;
}

std::string emit_sequence(const PulseSequence& seq) {
    std::string out;
    if (!seq.name.empty()) out += "@name " + seq.name + "\n";
    if (!seq.source.empty()) out += "@source " + seq.source + "\n";
    out += "@qubits " + std::to_string(seq.n_qubits) + "\n";
    for (const std::string& n : seq.notes) out += "@note " + n + "\n";
    for (std::size_t i = 0; i < seq.ops.size(); ++i) {
        out += emit_op(seq.ops[i]);
        if (i < seq.annotations.size() && !seq.annotations[i].empty()) out += "  # " + seq.annotations[i];
        out += "\n";
    }
    return out;
}

std::vector<std::string> corpus_names() {
    std::vector<std::string> out;
    for (const auto& [stem, text] : detail::corpus_entries()) out.emplace_back(stem);
    return out;
}

std::string corpus_text(const std::string& stem) {
    for (const auto& [s, text] : detail::corpus_entries())
        if (stem == s) return text;
    throw ValidationError("no corpus sequence named '" + stem + "'");
}

PulseSequence load_corpus(const std::string& stem) { return parse_sequence(corpus_text(stem)); }

}  // namespace tiqc
