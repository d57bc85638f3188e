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

#include "mdiqrng/config.hpp"

#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mdiqrng/certifier.hpp"
#include "mdiqrng/error.hpp"
#include "mdiqrng/extractor.hpp"
#include "mdiqrng/protocol.hpp"

namespace mdiqrng {

namespace {

constexpr ConfigKey kKeys[] = {
    {"protocol.trials", "10000000", "trials per round N"},
    {"protocol.test_trials", "262144", "test trials per round"},
    {"protocol.position_bits", "24", "seed bits drawn per test position"},
    {"protocol.rounds", "1", "rounds; values above 1 are accepted only with tally injection"},
    {"protocol.schedule_seed", "", "64-bit seed expanded into the schedule seed stream"},
    {"protocol.schedule_seed_file", "", "file of raw schedule seed bits (takes precedence)"},
    {"protocol.schedule_seed_hex", "", "hex string of schedule seed bits (takes precedence over the integer)"},
    {"device.kind", "honest", "honest | adversarial"},
    {"device.mu", "0.06", "mean photon number, shared with the certifier"},
    {"device.eta", "0.265", "detection efficiency"},
    {"device.dark", "1.5e-4", "dark count probability per gate and time bin"},
    {"device.error", "0", "symmetric flip probability"},
    {"device.povms", "", "adversarial POVMs 'a0,nx,ny,nz;...' applied cyclically"},
    {"simulation.rng_seed", "", "64-bit seed of the device simulation"},
    {"simulation.chunk_size", "1048576", "trials per simulation chunk"},
    {"run.threads", "1", "worker threads for parallel stages"},
    {"certify.epsilon_theta", "1e-10", "failure probability per deviation bound"},
    {"certify.functional", "shannon", "shannon | min-entropy"},
    {"certify.clock_hz", "25e6", "pulse clock used for the rate report"},
    {"certify.oracle_density", "0", "brute-force cross-check grid points per axis, 0 disables"},
    {"certify.mu_scan", "false", "also report the intensity maximizing the expected honest bound"},
    {"certify.mu_min", "0.01", "lower end of the intensity scan"},
    {"certify.mu_max", "0.5", "upper end of the intensity scan"},
    {"inject.counts", "", "'trials:ones' for Z0,Z1,X+,Y+ separated by commas; bypasses simulation"},
    {"inject.generation_turns", "", "generation trials accompanying the injected tally (default rounds*N minus tests)"},
    {"extract.epsilon", "0x1p-100", "extractor security parameter"},
    {"extract.block_bits", "1048576", "raw bits per Toeplitz block"},
    {"extract.seed_mode", "reuse", "reuse | per-block"},
    {"extract.seed", "", "64-bit seed expanded into Toeplitz seed bits"},
    {"extract.seed_file", "", "file of raw Toeplitz seed bits (takes precedence)"},
    {"extract.seed_hex", "", "hex string of Toeplitz seed bits (takes precedence over the integer)"},
    {"test.subsequence_bits", "10000", "bits per battery sub-sequence"},
    {"test.block_len", "128", "block_frequency block length"},
    {"paths.records", "records.mdqr", "trial record file"},
    {"paths.certificate", "certificate.json", "certificate report"},
    {"paths.output", "output.bin", "extracted bits"},
    {"paths.raw_bits", "", "optional dump of raw generation bits"},
    {"paths.report", "", "pipeline report (stdout when empty)"},
};

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::span<const ConfigKey> config_keys() {
    return kKeys;
}

const ConfigKey *find_config_key(std::string_view name) {
    for (const auto &k : kKeys) {
        if (name == k.name) return &k;
    }
    return nullptr;
}

uint64_t parse_count(std::string_view text, std::string_view what) {
    std::string t = trim(text);
    auto bad = [&] { fail(ErrorCode::invalid_argument, std::string(what) + ": not a nonnegative integer: '" + t + "'"); };
    if (t.empty()) bad();
    if (auto caret = t.find('^'); caret != std::string::npos) {
        uint64_t base = parse_count(t.substr(0, caret), what);
        uint64_t exp = parse_count(t.substr(caret + 1), what);
        uint64_t v = 1;
        for (uint64_t i = 0; i < exp; i++) {
            if (base && v > UINT64_MAX / base) bad();
            v *= base;
        }
        return v;
    }
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && ptr == t.data() + t.size()) return v;
    double d = parse_real(t, what);
    if (!(d >= 0) || d >= 0x1p64 || d != std::floor(d)) bad();
    return static_cast<uint64_t>(d);
}

double parse_real(std::string_view text, std::string_view what) {
    std::string t = trim(text);
    try {
        size_t used = 0;
        double d = std::stod(t, &used);
        if (used == t.size() && std::isfinite(d)) return d;
    } catch (const std::exception &) {
    }
    fail(ErrorCode::invalid_argument, std::string(what) + ": not a finite number: '" + t + "'");
}

void Config::set(std::string_view key, std::string value) {
    if (!find_config_key(key)) {
        fail(ErrorCode::invalid_argument, "unknown configuration key '" + std::string(key) + "'");
    }
    values_[std::string(key)] = trim(value);
}

bool Config::is_set(std::string_view key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return !it->second.empty();
    const ConfigKey *k = find_config_key(key);
    return k && *k->default_value;
}

std::string Config::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const ConfigKey *k = find_config_key(key);
    if (!k) {
        fail(ErrorCode::invalid_argument, "unknown configuration key '" + std::string(key) + "'");
    }
    return k->default_value;
}

double Config::get_double(std::string_view key) const {
    return parse_real(get(key), key);
}

uint64_t Config::get_u64(std::string_view key) const {
    return parse_count(get(key), key);
}

bool Config::get_bool(std::string_view key) const {
    std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
    fail(ErrorCode::invalid_argument, std::string(key) + ": not a boolean: '" + v + "'");
}

void Config::load_file(const std::string &path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        fail(e.line() == 0 ? ErrorCode::io : ErrorCode::format, std::string("config: ") + e.what());
    }
    for (const auto &[section, body] : tree) {
        if (!body.data().empty()) {
            fail(ErrorCode::format, "config: key '" + section + "' outside any section");
        }
        for (const auto &[key, value] : body) {
            std::string full = section + "." + key;
            std::string text = value.get_value<std::string>();
            if (auto hash = text.find(" #"); hash != std::string::npos) text = text.substr(0, hash);
            if (auto semi = text.find(" ;"); semi != std::string::npos) text = text.substr(0, semi);
            set(full, text);
        }
    }
}

void Config::validate() const {
    for (const auto &k : kKeys) {
        (void)get(k.name);
    }
    uint64_t trials = get_u64("protocol.trials");
    uint64_t tests = get_u64("protocol.test_trials");
    uint64_t bits = get_u64("protocol.position_bits");
    uint64_t rounds = get_u64("protocol.rounds");
    if (trials == 0) fail(ErrorCode::invalid_argument, "protocol.trials must be positive");
    if (tests > trials) fail(ErrorCode::invalid_argument, "protocol.test_trials exceeds protocol.trials");
    if (bits == 0 || bits > 63) fail(ErrorCode::invalid_argument, "protocol.position_bits must lie in [1, 63]");
    if ((uint64_t{1} << bits) < trials) {
        fail(ErrorCode::invalid_argument, "protocol.position_bits cannot address every trial");
    }
    if (rounds == 0) fail(ErrorCode::invalid_argument, "protocol.rounds must be positive");

    std::string kind = get("device.kind");
    if (kind != "honest" && kind != "adversarial") {
        fail(ErrorCode::invalid_argument, "device.kind must be honest or adversarial");
    }
    SourceModel model{get_double("device.mu"), get_double("device.eta"), get_double("device.dark"),
                      get_double("device.error")};
    model.validate();
    if (get_u64("simulation.chunk_size") == 0) {
        fail(ErrorCode::invalid_argument, "simulation.chunk_size must be positive");
    }
    if (get_u64("run.threads") == 0) fail(ErrorCode::invalid_argument, "run.threads must be positive");

    double eps = get_double("certify.epsilon_theta");
    if (!(eps > 0 && eps < 1)) fail(ErrorCode::invalid_argument, "certify.epsilon_theta must lie in (0, 1)");
    parse_functional(get("certify.functional"));
    if (!(get_double("certify.clock_hz") > 0)) fail(ErrorCode::invalid_argument, "certify.clock_hz must be positive");
    uint64_t density = get_u64("certify.oracle_density");
    if (density != 0 && (density < 10 || density > 4096)) {
        fail(ErrorCode::invalid_argument, "certify.oracle_density must be 0 or in [10, 4096]");
    }
    get_bool("certify.mu_scan");
    double lo = get_double("certify.mu_min"), hi = get_double("certify.mu_max");
    if (!(lo > 0 && lo < hi && hi <= 1)) {
        fail(ErrorCode::invalid_argument, "certify.mu_min and certify.mu_max must satisfy 0 < min < max <= 1");
    }
    if (is_set("inject.generation_turns")) get_u64("inject.generation_turns");

    double eps_ext = get_double("extract.epsilon");
    if (!(eps_ext > 0 && eps_ext < 1)) fail(ErrorCode::invalid_argument, "extract.epsilon must lie in (0, 1)");
    if (get_u64("extract.block_bits") == 0) fail(ErrorCode::invalid_argument, "extract.block_bits must be positive");
    parse_seed_mode(get("extract.seed_mode"));
    if (is_set("protocol.schedule_seed")) get_u64("protocol.schedule_seed");
    if (is_set("simulation.rng_seed")) get_u64("simulation.rng_seed");
    if (is_set("extract.seed")) get_u64("extract.seed");
    uint64_t sub = get_u64("test.subsequence_bits");
    if (sub < 128) fail(ErrorCode::invalid_argument, "test.subsequence_bits must be at least 128");
    uint64_t block = get_u64("test.block_len");
    if (block == 0 || block > sub) fail(ErrorCode::invalid_argument, "test.block_len must lie in [1, subsequence_bits]");
}

}  // namespace mdiqrng
