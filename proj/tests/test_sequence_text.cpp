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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tiqc/noise.hpp"
#include "tiqc/sequence_text.hpp"

namespace tiqc {
namespace {

TEST(ParseSequence, SingleOps) {
    const PulseSequence ms = parse_sequence("@qubits 2\nMS(pi/2, pi/8)\n");
    ASSERT_EQ(ms.size(), 1u);
    const auto& m = std::get<op::MS>(ms.ops[0]);
    EXPECT_EQ(m.phi, kPi / 2);
    EXPECT_EQ(m.theta, kPi / 8);

    const PulseSequence z = parse_sequence("@qubits 3\nSz(2, pi)\n");
    const auto& r = std::get<op::ZRot>(z.ops[0]);
    EXPECT_EQ(r.ion, 1);
    EXPECT_EQ(r.theta, kPi);
}

TEST(ParseSequence, NonCoherentOps) {
    const PulseSequence s = parse_sequence(
        "@qubits 2\nHIDE(2)\nMEAS(1, 0)\nUNHIDE(2)\nCZROT(1, -pi/2, 0, neg)\nAD(1, 0.25, 1)\nPD(2, 0.5)\n"
        "RECOOL(800)\nIDLE(12.5)\n");
    ASSERT_EQ(s.size(), 8u);
    EXPECT_TRUE(std::get<op::ConditionalZRot>(s.ops[3]).negate);
    EXPECT_EQ(std::get<op::AmpDamp>(s.ops[4]).target, 1);
    EXPECT_DOUBLE_EQ(std::get<op::Recool>(s.ops[6]).duration, 800e-6);
    EXPECT_EQ(parse_sequence(emit_sequence(s)).size(), 8u);
    EXPECT_EQ(emit_sequence(parse_sequence(emit_sequence(s))), emit_sequence(s));
}

TEST(ParseSequence, AngleSpellings) {
    EXPECT_EQ(parse_angle("pi"), kPi);
    EXPECT_EQ(parse_angle("-3pi/4"), -3 * kPi / 4);
    EXPECT_EQ(parse_angle("1.75pi"), 1.75 * kPi);
    EXPECT_EQ(parse_angle("0.25"), 0.25);
    EXPECT_THROW(parse_angle("pi/0"), ValidationError);
    EXPECT_THROW(parse_angle("tau"), ValidationError);
}

TEST(ParseSequence, FormatAngleRoundTrips) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng);
        EXPECT_EQ(parse_angle(format_angle(t)), t);
    }
    EXPECT_EQ(format_angle(kPi / 2), "pi/2");
    EXPECT_EQ(format_angle(-7 * kPi / 4), "-7pi/4");
}

TEST(ParseSequence, CorpusRoundTripsVerbatim) {
    const auto names = corpus_names();
    EXPECT_EQ(names.size(), 9u);
    for (const std::string& stem : names) {
        const std::string text = corpus_text(stem);
        EXPECT_EQ(emit_sequence(parse_sequence(text)), text) << stem;
        EXPECT_EQ(load_corpus(stem).name, stem);
    }
}

struct BadCase {
    const char* text;
    int line;
    int column;
};

TEST(ParseError, ReportsLineAndColumn) {
    const BadCase cases[] = {
        {"@qubits 2\nMS(pi/2 pi/8)\n", 2, 1},
        {"@qubits 2\nR(pi, pi)\nFOO(1)\n", 3, 1},
        {"@qubits 2\n  Sz(3, pi)\n", 2, 6},
        {"@qubits 2\nSz(0, pi)\n", 2, 4},
        {"@qubits 2\nSz(1, pi\n", 2, 8},
        {"MS(0, pi/2)\n", 1, 1},
        {"@qubits 2\n@colour red\n", 2, 1},
        {"@qubits 2\nR(pi, banana)\n", 2, 7},
    };
    for (const BadCase& c : cases) {
        try {
            parse_sequence(c.text);
            ADD_FAILURE() << "accepted: " << c.text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), c.line) << c.text << " : " << e.what();
            EXPECT_EQ(e.column(), c.column) << c.text << " : " << e.what();
        }
    }
}

TEST(ParseSequence, ParsedSequencesAlwaysExecute) {
    // Random well-formed coherent programs: anything the parser accepts runs.
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> kind(0, 4), ion(1, 3);
    std::uniform_int_distribution<int> num(-8, 8), den(1, 8);
    for (int trial = 0; trial < 50; ++trial) {
        std::string text = "@qubits 3\n";
        std::vector<int> hidden;
        for (int k = 0; k < 12; ++k) {
            const std::string a = std::to_string(num(rng)) + "pi/" + std::to_string(den(rng));
            switch (kind(rng)) {
                case 0: text += "R(" + a + ", pi/2)\n"; break;
                case 1: text += "MS(" + a + ", pi/4)\n"; break;
                case 2: {
                    const int i = ion(rng);
                    if (std::find(hidden.begin(), hidden.end(), i) == hidden.end())
                        text += "Sz(" + std::to_string(i) + ", " + a + ")\n";
                    break;
                }
                case 3:
                    if (hidden.size() < 2) {
                        const int i = ion(rng);
                        if (std::find(hidden.begin(), hidden.end(), i) == hidden.end()) {
                            hidden.push_back(i);
                            text += "HIDE(" + std::to_string(i) + ")\n";
                        }
                    }
                    break;
                default:
                    if (!hidden.empty()) {
                        text += "UNHIDE(" + std::to_string(hidden.back()) + ")\n";
                        hidden.pop_back();
                    }
            }
        }
        const PulseSequence seq = parse_sequence(text);
        const Trajectory r = run_trajectory(seq, NoiseParams::noiseless(), 0, static_cast<std::uint64_t>(trial));
        EXPECT_NEAR(r.state.amplitudes().norm(), 1.0, 1e-9);
    }
}

}  // namespace
}  // namespace tiqc
