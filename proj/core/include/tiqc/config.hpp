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

// Flat `key = value` configuration files.  `#` starts a comment; keys are
// unique; values are kept as text until a typed getter reads them.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tiqc {

class KeyValueConfig {
   public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma- or whitespace-separated doubles.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;

    void set(const std::string& key, std::string value);
    void set(const std::string& key, double value);

    /// All keys in sorted order.
    std::vector<std::string> keys() const;
    std::string to_string() const;
    void save(const std::filesystem::path& path) const;

   private:
    std::map<std::string, std::string> values_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Strict full-string double parse; throws ValidationError with `what`.
double parse_double(std::string_view text, const std::string& what);

}  // namespace tiqc
