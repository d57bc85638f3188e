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

#ifndef MDIQRNG_PIPELINE_HPP
#define MDIQRNG_PIPELINE_HPP

#include <memory>
#include <string>

#include "json.hpp"
#include "mdiqrng/certifier.hpp"
#include "mdiqrng/config.hpp"
#include "mdiqrng/protocol.hpp"
#include "mdiqrng/seed.hpp"

namespace mdiqrng {

using Json = nlohmann::json;

constexpr int kReportSchemaVersion = 1;

/// Each stage validates the configuration, performs its work, and returns its
/// report fragment. Failures throw Error with the stage's error code.
Json cmd_simulate(const Config &config);
/// Certifies paths.records, or the injected counts when inject.counts is set.
/// Writes the certificate to paths.certificate.
Json cmd_certify(const Config &config);
/// Hashes the generation bits of paths.records with the certified rate.
Json cmd_extract(const Config &config);
/// Runs the battery on the named bit file (paths.output when empty).
Json cmd_test(const Config &config, const std::string &bits_path = "");
/// All stages in order with end-to-end seed and gain accounting. Injection
/// mode stops after certification.
Json cmd_pipeline(const Config &config);

/// Whether a stage report represents full success (battery passed, etc.).
bool report_succeeded(const Json &report);

/// Seed source selected by <prefix>_file, <prefix>_hex or <prefix> (for
/// example "protocol.schedule_seed"). `label` receives a description.
std::unique_ptr<SeedSource> open_seed(const Config &config, const std::string &prefix, std::string &label);

/// Parses 'trials:ones,trials:ones,trials:ones,trials:ones'.
std::array<StateCount, 4> parse_injected_counts(const std::string &text);

Json certificate_json(const TestTally &tally, const CertReport &rep, const CertifyOptions &options);

}  // namespace mdiqrng

#endif
