// Copyright 2026 The mdiqrng Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDIQRNG_CONFIG_HPP
#define MDIQRNG_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mdiqrng {

struct ConfigKey {
    const char *name;  // "section.key"
    const char *default_value;
    const char *help;
};

/// Every recognized key, in a fixed order. INI files use [section] / key = value.
std::span<const ConfigKey> config_keys();
const ConfigKey *find_config_key(std::string_view name);

/// Pipeline settings. Unset keys read as their registered defaults; an empty
/// default means "not given".
class Config {
   public:
    /// Unknown keys are rejected with Error(invalid_argument).
    void set(std::string_view key, std::string value);
    bool is_set(std::string_view key) const;
    std::string get(std::string_view key) const;

    double get_double(std::string_view key) const;
    uint64_t get_u64(std::string_view key) const;
    bool get_bool(std::string_view key) const;

    /// Parses an INI file; values override those already present.
    void load_file(const std::string &path);

    /// Re-checks every constraint owned by the downstream modules.
    void validate() const;

    const std::map<std::string, std::string, std::less<>> &values() const {
        return values_;
    }

   private:
    std::map<std::string, std::string, std::less<>> values_;
};

/// Parses decimal integers or simple exponent forms such as 1e8 and 2^34.
uint64_t parse_count(std::string_view text, std::string_view what);
double parse_real(std::string_view text, std::string_view what);

}  // namespace mdiqrng

#endif
