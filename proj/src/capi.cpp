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

#include "mdiqrng/mdiqrng.h"

#include <cstring>
#include <string>

#include "mdiqrng/certifier.hpp"
#include "mdiqrng/config.hpp"
#include "mdiqrng/error.hpp"
#include "mdiqrng/extractor.hpp"
#include "mdiqrng/finite_size.hpp"
#include "mdiqrng/pipeline.hpp"

struct mdq_config {
    mdiqrng::Config config;
};

struct mdq_report {
    std::string json;
    bool success = false;
};

namespace {

thread_local std::string last_error;

mdq_status set_error(mdq_status status, const std::string &message) {
    last_error = message;
    return status;
}

template <typename F>
mdq_status guarded(F &&body) {
    try {
        body();
        last_error.clear();
        return MDQ_OK;
    } catch (const mdiqrng::Error &e) {
        return set_error(static_cast<mdq_status>(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(MDQ_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return set_error(MDQ_INTERNAL, e.what());
    }
}

mdq_status null_argument(const char *what) {
    return set_error(MDQ_INVALID_ARGUMENT, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char *mdq_version(void) {
    return "1.0.0";
}

const char *mdq_status_name(int status) {
    if (status < 0 || status > MDQ_INTERNAL) return "unknown";
    return mdiqrng::error_code_name(static_cast<mdiqrng::ErrorCode>(status));
}

const char *mdq_last_error(void) {
    return last_error.c_str();
}

size_t mdq_config_key_count(void) {
    return mdiqrng::config_keys().size();
}

const char *mdq_config_key_name(size_t index) {
    auto keys = mdiqrng::config_keys();
    return index < keys.size() ? keys[index].name : nullptr;
}

const char *mdq_config_key_default(size_t index) {
    auto keys = mdiqrng::config_keys();
    return index < keys.size() ? keys[index].default_value : nullptr;
}

const char *mdq_config_key_help(size_t index) {
    auto keys = mdiqrng::config_keys();
    return index < keys.size() ? keys[index].help : nullptr;
}

mdq_status mdq_config_new(mdq_config **out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = new mdq_config; });
}

void mdq_config_free(mdq_config *config) {
    delete config;
}

mdq_status mdq_config_load(mdq_config *config, const char *path) {
    if (!config) return null_argument("config");
    if (!path) return null_argument("path");
    return guarded([&] { config->config.load_file(path); });
}

mdq_status mdq_config_set(mdq_config *config, const char *key, const char *value) {
    if (!config) return null_argument("config");
    if (!key) return null_argument("key");
    if (!value) return null_argument("value");
    return guarded([&] { config->config.set(key, value); });
}

mdq_status mdq_config_get(const mdq_config *config, const char *key, char *buf, size_t cap, size_t *needed) {
    if (!config) return null_argument("config");
    if (!key) return null_argument("key");
    return guarded([&] {
        std::string v = config->config.get(key);
        if (needed) *needed = v.size() + 1;
        if (buf && cap > v.size()) {
            std::memcpy(buf, v.c_str(), v.size() + 1);
        } else if (buf || !needed) {
            mdiqrng::fail(mdiqrng::ErrorCode::invalid_argument, "buffer too small for value of " + std::string(key));
        }
    });
}

mdq_status mdq_config_validate(const mdq_config *config) {
    if (!config) return null_argument("config");
    return guarded([&] { config->config.validate(); });
}

mdq_status mdq_run(const mdq_config *config, const char *command, const char *bits_path, mdq_report **out) {
    if (!config) return null_argument("config");
    if (!command) return null_argument("command");
    if (!out) return null_argument("out");
    *out = nullptr;
    std::string cmd = command;
    if (cmd != "simulate" && cmd != "certify" && cmd != "extract" && cmd != "test" && cmd != "pipeline") {
        return set_error(MDQ_INVALID_ARGUMENT, "unknown command '" + cmd + "'");
    }
    mdiqrng::Json report;
    mdq_status status = guarded([&] {
        if (cmd == "simulate") report = mdiqrng::cmd_simulate(config->config);
        if (cmd == "certify") report = mdiqrng::cmd_certify(config->config);
        if (cmd == "extract") report = mdiqrng::cmd_extract(config->config);
        if (cmd == "test") report = mdiqrng::cmd_test(config->config, bits_path ? bits_path : "");
        if (cmd == "pipeline") report = mdiqrng::cmd_pipeline(config->config);
        if (!report.contains("schema_version")) report["schema_version"] = mdiqrng::kReportSchemaVersion;
    });
    if (status != MDQ_OK) {
        report = mdiqrng::Json{{"schema_version", mdiqrng::kReportSchemaVersion},
                               {"stage", cmd},
                               {"error", mdiqrng::Json{{"code", static_cast<int>(status)},
                                                       {"name", mdq_status_name(status)},
                                                       {"message", last_error}}}};
    } else if (report.contains("error")) {
        status = static_cast<mdq_status>(report["error"]["code"].get<int>());
        last_error = report["error"]["message"].get<std::string>();
    } else if (!mdiqrng::report_succeeded(report)) {
        status = set_error(MDQ_TEST_FAILED, cmd + " completed without passing");
    }
    auto *r = new (std::nothrow) mdq_report;
    if (!r) return set_error(MDQ_INTERNAL, "out of memory");
    r->json = report.dump(2) + "\n";
    r->success = status == MDQ_OK;
    *out = r;
    return status;
}

const char *mdq_report_json(const mdq_report *report) {
    return report ? report->json.c_str() : "";
}

int mdq_report_success(const mdq_report *report) {
    return report && report->success ? 1 : 0;
}

void mdq_report_free(mdq_report *report) {
    delete report;
}

mdq_status mdq_solve_theta(double epsilon, double p, uint64_t n_i, uint64_t n_0, double *theta) {
    if (!theta) return null_argument("theta");
    return guarded([&] { *theta = mdiqrng::solve_theta(epsilon, p, n_i, n_0); });
}

mdq_status mdq_output_length(double n_raw, double rate, double eps_ext, uint64_t *m) {
    if (!m) return null_argument("m");
    return guarded([&] { *m = mdiqrng::output_length(n_raw, rate, eps_ext); });
}

mdq_status mdq_certify_counts(const uint64_t trials[4], const uint64_t ones[4], uint64_t generation_turns,
                              double epsilon_theta, double mu, mdq_functional functional, double *rate) {
    if (!trials || !ones) return null_argument("counts");
    if (!rate) return null_argument("rate");
    if (functional != MDQ_MIN_ENTROPY && functional != MDQ_SHANNON) {
        return set_error(MDQ_INVALID_ARGUMENT, "unknown entropy functional");
    }
    return guarded([&] {
        std::array<mdiqrng::StateCount, 4> c{};
        for (size_t i = 0; i < 4; i++) c[i] = {trials[i], ones[i]};
        auto t = mdiqrng::TestTally::from_counts(c, generation_turns);
        auto f = functional == MDQ_SHANNON ? mdiqrng::EntropyFunctional::ShannonBinary
                                           : mdiqrng::EntropyFunctional::MinEntropy;
        *rate = mdiqrng::coherent_bound(t, mdiqrng::fluctuations(t, epsilon_theta), mu, f).R;
    });
}

mdq_status mdq_toeplitz_extract(const uint8_t *raw, size_t n, const uint8_t *seed, size_t m, uint8_t *out) {
    if (!raw || !seed || !out) return null_argument("buffer");
    return guarded([&] {
        if (n == 0 || m == 0) mdiqrng::fail(mdiqrng::ErrorCode::invalid_argument, "n and m must be positive");
        mdiqrng::ToeplitzSpec spec{n, m, mdiqrng::BitVector::from_bytes({seed, (m + n - 1 + 7) / 8}, m + n - 1)};
        auto bits = mdiqrng::extract(mdiqrng::BitVector::from_bytes({raw, (n + 7) / 8}, n), spec);
        auto bytes = bits.to_bytes();
        std::memcpy(out, bytes.data(), bytes.size());
    });
}

}  // extern "C"
