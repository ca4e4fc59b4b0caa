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

// Line-oriented text form of a PulseSequence.
//
//   @qubits 3
//   @name qft3
//   @source Table A2
//   @note free text
//   R(pi, pi/2)
//   Sz(2, pi)          # trailing comments are kept as annotations
//   MS(pi/2, 3pi/16)
//
// Ops: R(phi,theta) Sz(ion,theta) MS(phi,theta) HIDE(ion) UNHIDE(ion)
// PD(ion,gamma) AD(ion,gamma[,target]) MEAS(ion,cbit)
// CZROT(ion,theta,cbit[,neg]) RECOOL(us) IDLE(us).
//
// Ions are 1-based, classical bits 0-based.  Angles are
// [-][number][pi][/integer], e.g. `3pi/16`, `-pi/2`, `1.75pi`, `0.25`.
// Durations are in microseconds.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tiqc/gates.hpp"

namespace tiqc {

class ParseError : public ValidationError {
   public:
    ParseError(int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }

   private:
    int line_;
    int column_;
};

/// `default_qubits` is used when the text has no `@qubits` header; 0 means
/// the header is required.
PulseSequence parse_sequence(std::string_view text, int default_qubits = 0);

/// Canonical text.  parse_sequence(emit_sequence(s)) reproduces s bit for
/// bit.  Frame ops have no text form and are rejected.
std::string emit_sequence(const PulseSequence& seq);

double parse_angle(std::string_view text);
/// Shortest spelling that parses back to exactly `theta`: a reduced
/// fraction of pi with denominator up to 64, then a decimal multiple of
/// pi, then plain radians.
std::string format_angle(double theta);

/// Sequences compiled into the library, by file stem.
std::vector<std::string> corpus_names();
std::string corpus_text(const std::string& stem);
PulseSequence load_corpus(const std::string& stem);

}  // namespace tiqc
