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

#include "mdiqrng/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "mdiqrng/error.hpp"
#include "mdiqrng/extractor.hpp"
#include "mdiqrng/randtests.hpp"
#include "mdiqrng/records.hpp"

namespace mdiqrng {

namespace {

SourceModel source_model(const Config &c) {
    SourceModel m{c.get_double("device.mu"), c.get_double("device.eta"), c.get_double("device.dark"),
                  c.get_double("device.error")};
    m.validate();
    return m;
}

std::vector<Povm> parse_povms(const std::string &text) {
    std::vector<Povm> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream one(item);
        std::string field;
        std::vector<double> v;
        while (std::getline(one, field, ',')) v.push_back(parse_real(field, "device.povms"));
        if (v.size() != 4) {
            fail(ErrorCode::invalid_argument, "device.povms entries need four numbers a0,nx,ny,nz");
        }
        Povm p{v[0], {v[1], v[2], v[3]}};
        if (auto bad = validate_povm(p); !bad.empty()) {
            fail(ErrorCode::invalid_argument, "device.povms entry '" + item + "' is not a POVM: " + bad.front());
        }
        out.push_back(p);
    }
    if (out.empty()) {
        fail(ErrorCode::invalid_argument, "device.kind = adversarial requires device.povms");
    }
    return out;
}

Device make_device(const Config &c) {
    if (c.get("device.kind") == "adversarial") {
        return AdversarialDevice{PovmSchedule{parse_povms(c.get("device.povms")), true}};
    }
    return HonestDevice{source_model(c)};
}

Json device_json(const Config &c) {
    Json j;
    j["kind"] = c.get("device.kind");
    if (c.get("device.kind") == "adversarial") {
        j["povms"] = c.get("device.povms");
    } else {
        j["mu"] = c.get_double("device.mu");
        j["eta"] = c.get_double("device.eta");
        j["dark"] = c.get_double("device.dark");
        j["error"] = c.get_double("device.error");
    }
    return j;
}

uint64_t required_seed(const Config &c, const char *key) {
    if (!c.is_set(key)) {
        fail(ErrorCode::invalid_argument, std::string("no ") + key + " given; every random seed must be explicit");
    }
    return c.get_u64(key);
}

CertifyOptions certify_options(const Config &c) {
    CertifyOptions o;
    o.epsilon_theta = c.get_double("certify.epsilon_theta");
    o.mu = c.get_double("device.mu");
    o.functional = parse_functional(c.get("certify.functional"));
    o.clock_hz = c.get_double("certify.clock_hz");
    o.oracle_density = static_cast<unsigned>(c.get_u64("certify.oracle_density"));
    return o;
}

Json accounting_json(const SeedAccounting &a) {
    return Json{{"positions", a.bits_for_positions},
                {"states", a.bits_for_states},
                {"extractor", a.bits_for_extractor_seed},
                {"protocol_total", a.protocol_bits()},
                {"total", a.total_consumed()}};
}

Json witness_json(const Witness &w) {
    return Json{{"a0", w.a0}, {"nx", w.nx}, {"ny", w.ny}, {"nz", w.nz}, {"mu", w.mu}};
}

Json tally_json(const TestTally &t) {
    Json states = Json::array();
    for (auto s : kAllTestStates) {
        size_t i = state_index(s);
        states.push_back(Json{{"state", std::string(state_name(s))},
                              {"trials", t.counts[i].trials},
                              {"ones", t.counts[i].ones},
                              {"p_zero", t.p[i]}});
    }
    return Json{{"states", states}, {"generation_turns", t.generation_turns}};
}

TestTally tally_from_json(const Json &j) {
    std::array<StateCount, 4> counts{};
    const auto &states = j.at("states");
    for (size_t i = 0; i < 4; i++) {
        counts[i] = {states.at(i).at("trials").get<uint64_t>(), states.at(i).at("ones").get<uint64_t>()};
    }
    return TestTally::from_counts(counts, j.at("generation_turns").get<uint64_t>());
}

// Accounting for injected rounds: schedules are built from the configured seed
// when one is given, otherwise the collision-free nominal count is reported.
Json injected_accounting(const Config &c, SeedAccounting &acc) {
    uint64_t rounds = c.get_u64("protocol.rounds");
    uint64_t n = c.get_u64("protocol.trials");
    uint64_t tests = c.get_u64("protocol.test_trials");
    unsigned bits = static_cast<unsigned>(c.get_u64("protocol.position_bits"));
    Json j;
    j["rounds"] = rounds;
    bool seeded = c.is_set("protocol.schedule_seed") || c.is_set("protocol.schedule_seed_file") ||
                  c.is_set("protocol.schedule_seed_hex");
    if (seeded) {
        std::string label;
        auto seed = open_seed(c, "protocol.schedule_seed", label);
        uint64_t rejected = 0;
        for (uint64_t r = 0; r < rounds; r++) {
            auto sb = build_schedule(*seed, n, tests, bits);
            acc += sb.accounting;
            rejected += sb.rejected_draws;
        }
        j["basis"] = "drawn";
        j["seed_source"] = label;
        j["rejected_draws"] = rejected;
    } else {
        acc.bits_for_positions += rounds * tests * bits;
        acc.bits_for_states += rounds * tests * 2;
        j["basis"] = "nominal collision-free draws";
    }
    return j;
}

std::string certificate_path(const Config &c) {
    return c.get("paths.certificate");
}

}  // namespace

std::unique_ptr<SeedSource> open_seed(const Config &config, const std::string &prefix, std::string &label) {
    if (config.is_set(prefix + "_file")) {
        std::string path = config.get(prefix + "_file");
        auto bytes = read_file(path);
        label = "file:" + path;
        return std::make_unique<BufferSeed>(std::move(bytes));
    }
    if (config.is_set(prefix + "_hex")) {
        label = "hex";
        return std::make_unique<BufferSeed>(BufferSeed::from_hex(config.get(prefix + "_hex")));
    }
    uint64_t s = required_seed(config, prefix.c_str());
    label = "expanded:" + std::to_string(s);
    return std::make_unique<ExpandedSeed>(s);
}

std::array<StateCount, 4> parse_injected_counts(const std::string &text) {
    std::array<StateCount, 4> out{};
    std::stringstream ss(text);
    std::string item;
    size_t i = 0;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (i >= 4 || colon == std::string::npos) {
            fail(ErrorCode::invalid_argument, "inject.counts must be four 'trials:ones' entries");
        }
        out[i++] = {parse_count(item.substr(0, colon), "inject.counts"),
                    parse_count(item.substr(colon + 1), "inject.counts")};
    }
    if (i != 4) {
        fail(ErrorCode::invalid_argument, "inject.counts must be four 'trials:ones' entries");
    }
    return out;
}

Json certificate_json(const TestTally &tally, const CertReport &rep, const CertifyOptions &options) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "certificate";
    j["R"] = rep.R;
    j["functional"] = std::string(functional_name(rep.functional));
    j["mu"] = options.mu;
    j["epsilon_theta"] = options.epsilon_theta;
    j["epsilon_total"] = rep.epsilon_total;
    j["theta"] = rep.theta.theta;
    j["theta_vacuous"] = rep.theta.vacuous;
    j["witness"] = witness_json(rep.witness);
    j["estimate"] = Json{{"a0", rep.estimate.a0},
                         {"nx", rep.estimate.nx},
                         {"ny", rep.estimate.ny},
                         {"nz", rep.estimate.nz},
                         {"physical", rep.estimate.physical}};
    j["upper_envelope"] = rep.upper_envelope;
    j["qubit_R"] = rep.qubit_R;
    j["clock_hz"] = options.clock_hz;
    j["rate_bps"] = rep.rate_bps;
    j["tally"] = tally_json(tally);
    j["extractable_bits"] = static_cast<uint64_t>(std::floor(static_cast<double>(tally.generation_turns) * rep.R));
    if (rep.oracle_R) {
        j["oracle"] = Json{{"density", options.oracle_density}, {"R", *rep.oracle_R}, {"agrees", *rep.oracle_agrees}};
    }
    j["notes"] = rep.notes;
    return j;
}

Json cmd_simulate(const Config &c) {
    c.validate();
    if (c.get_u64("protocol.rounds") != 1) {
        fail(ErrorCode::invalid_argument, "simulation runs a single round; set protocol.rounds = 1");
    }
    uint64_t n = c.get_u64("protocol.trials");
    std::string label;
    auto seed = open_seed(c, "protocol.schedule_seed", label);
    auto sb = build_schedule(*seed, n, c.get_u64("protocol.test_trials"),
                             static_cast<unsigned>(c.get_u64("protocol.position_bits")));
    uint64_t rng = required_seed(c, "simulation.rng_seed");
    Device device = make_device(c);

    std::string path = c.get("paths.records");
    RecordWriter writer(path, n);
    uint64_t gen_ones = 0;
    SimulationOptions opt{c.get_u64("simulation.chunk_size"), static_cast<unsigned>(c.get_u64("run.threads"))};
    simulate(
        sb.schedule, device, rng,
        [&](std::span<const TrialRecord> chunk) {
            for (const auto &r : chunk) gen_ones += !r.is_test && r.outcome;
            writer.write(chunk);
        },
        opt);
    writer.finish();

    Json j;
    j["stage"] = "simulate";
    j["trials"] = n;
    j["test_trials"] = sb.schedule.test_count();
    j["generation_trials"] = sb.schedule.generation_count();
    j["generation_ones"] = gen_ones;
    j["rejected_draws"] = sb.rejected_draws;
    j["seed_accounting"] = accounting_json(sb.accounting);
    j["schedule_seed"] = label;
    j["rng_seed"] = rng;
    j["device"] = device_json(c);
    j["records"] = path;
    return j;
}

Json cmd_certify(const Config &c) {
    c.validate();
    CertifyOptions opt = certify_options(c);
    TestTally t;
    std::string source;
    if (c.is_set("inject.counts")) {
        auto counts = parse_injected_counts(c.get("inject.counts"));
        uint64_t tests = 0;
        for (const auto &s : counts) tests += s.trials;
        uint64_t total = c.get_u64("protocol.rounds") * c.get_u64("protocol.trials");
        uint64_t gen = 0;
        if (c.is_set("inject.generation_turns")) {
            gen = c.get_u64("inject.generation_turns");
        } else if (total >= tests) {
            gen = total - tests;
        } else {
            fail(ErrorCode::invalid_argument, "injected test counts exceed rounds * trials");
        }
        t = TestTally::from_counts(counts, gen);
        source = "injection";
    } else {
        t = tally_records(read_records(c.get("paths.records")));
        source = "records:" + c.get("paths.records");
    }
    CertReport rep = certify(t, opt);
    Json cert = certificate_json(t, rep, opt);
    cert["source"] = source;
    if (c.get_bool("certify.mu_scan")) {
        SourceModel model = source_model(c);
        std::array<uint64_t, 4> trials{};
        for (size_t i = 0; i < 4; i++) trials[i] = t.counts[i].trials;
        TallyModel tm = [&](double mu) { return honest_expected_tally(model, mu, trials, t.generation_turns); };
        MuOptimum best = optimize_mu(tm, opt.epsilon_theta, opt.functional, c.get_double("certify.mu_min"),
                                     c.get_double("certify.mu_max"));
        cert["mu_scan"] = Json{{"mu", best.mu}, {"R", best.R}, {"grid_fallback", best.used_grid_fallback},
                               {"device_model", device_json(c)}};
    }
    write_file(certificate_path(c), cert.dump(2) + "\n");
    Json j = cert;
    j["stage"] = "certify";
    j["certificate"] = certificate_path(c);
    return j;
}

Json cmd_extract(const Config &c) {
    c.validate();
    auto text = read_file(certificate_path(c));
    Json cert;
    try {
        cert = Json::parse(text.begin(), text.end());
    } catch (const Json::exception &e) {
        fail(ErrorCode::format, "certificate is not valid JSON: " + std::string(e.what()));
    }
    if (cert.value("kind", "") != "certificate" || cert.value("schema_version", 0) != kReportSchemaVersion) {
        fail(ErrorCode::format, "not a certificate of schema version " + std::to_string(kReportSchemaVersion));
    }
    RecordFile rf = read_records(c.get("paths.records"));
    TestTally from_records = tally_records(rf);
    TestTally certified;
    try {
        certified = tally_from_json(cert.at("tally"));
    } catch (const Json::exception &e) {
        fail(ErrorCode::format, "certificate tally unreadable: " + std::string(e.what()));
    }
    if (certified.counts != from_records.counts || certified.generation_turns != from_records.generation_turns) {
        fail(ErrorCode::format, "certificate tally does not match the record file");
    }
    double R = cert.at("R").get<double>();
    double eps = c.get_double("extract.epsilon");
    BitVector raw = generation_bits(rf);
    if (c.is_set("paths.raw_bits")) write_bits(c.get("paths.raw_bits"), raw);
    BlockPlan plan = plan_blocks(raw.size(), c.get_u64("extract.block_bits"), R, eps,
                                 parse_seed_mode(c.get("extract.seed_mode")));
    if (plan.block_m == 0) {
        std::ostringstream ss;
        ss << "certified output length is zero (R = " << R << ", block of " << plan.block_n
           << " bits, margin " << 2 * std::log2(1 / eps) << " bits); extraction refused";
        fail(ErrorCode::nothing_to_extract, ss.str());
    }
    std::string label;
    auto seed = open_seed(c, "extract.seed", label);
    Extraction ex = extract_blocks(raw, plan, *seed, static_cast<unsigned>(c.get_u64("run.threads")));
    std::string out = c.get("paths.output");
    uint64_t written = write_bits(out, ex.output);

    Json j;
    j["stage"] = "extract";
    j["R"] = R;
    j["raw_bits"] = raw.size();
    j["block_bits"] = plan.block_n;
    j["block_output_bits"] = plan.block_m;
    j["blocks"] = plan.blocks;
    j["discarded_bits"] = plan.discarded_bits;
    j["output_bits"] = ex.output.size();
    j["written_bits"] = written;
    j["seed_mode"] = std::string(seed_mode_name(plan.mode));
    j["seed_bits"] = ex.seed_bits_consumed;
    j["seed_source"] = label;
    j["epsilon_ext"] = eps;
    j["output"] = out;
    return j;
}

Json cmd_test(const Config &c, const std::string &bits_path) {
    c.validate();
    std::string path = bits_path.empty() ? c.get("paths.output") : bits_path;
    BitVector bits = read_bits(path);
    auto verdicts = battery(bits, c.get_u64("test.subsequence_bits"), c.get_u64("test.block_len"),
                            static_cast<unsigned>(c.get_u64("run.threads")));
    Json j;
    j["stage"] = "test";
    j["input"] = path;
    j["bits"] = bits.size();
    j["subsequence_bits"] = c.get_u64("test.subsequence_bits");
    Json tests = Json::array();
    for (const auto &v : verdicts) {
        tests.push_back(Json{{"test", v.test},
                             {"p_value", v.p_value},
                             {"pass", v.pass},
                             {"proportion", v.proportion},
                             {"proportion_pass", v.proportion_pass},
                             {"sequences", v.sequences}});
    }
    j["tests"] = tests;
    j["pass"] = battery_passes(verdicts);
    return j;
}

Json cmd_pipeline(const Config &c) {
    c.validate();
    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["kind"] = "pipeline";
    SeedAccounting acc;
    Json stages;
    std::optional<ErrorCode> failure;
    std::string failure_message;
    auto run_stage = [&](const char *name, auto &&body) {
        if (failure) return false;
        try {
            stages[name] = body();
            return true;
        } catch (const Error &e) {
            failure = e.code();
            failure_message = e.what();
            stages[name] = Json{{"stage", name}, {"error", Json{{"code", static_cast<int>(e.code())},
                                                               {"name", error_code_name(e.code())},
                                                               {"message", e.what()}}}};
            return false;
        }
    };

    bool injected = c.is_set("inject.counts");
    double R = 0;
    if (injected) {
        report["mode"] = "injection";
        run_stage("certify", [&] { return cmd_certify(c); });
        if (!failure) {
            R = stages["certify"]["R"].get<double>();
            report["protocol_accounting"] = injected_accounting(c, acc);
            uint64_t raw = stages["certify"]["tally"]["generation_turns"].get<uint64_t>();
            double eps = c.get_double("extract.epsilon");
            BlockPlan plan = plan_blocks(raw, c.get_u64("extract.block_bits"), R, eps,
                                         parse_seed_mode(c.get("extract.seed_mode")));
            acc.bits_for_extractor_seed = plan.seed_bits();
            Throughput single = throughput_report(R, c.get_double("certify.clock_hz"), acc, static_cast<double>(raw));
            report["projection"] = Json{{"raw_bits", raw},
                                        {"extractable_bits", single.extractable_bits},
                                        {"single_block_output_bits", output_length(static_cast<double>(raw), R, eps)},
                                        {"block_plan_output_bits", plan.output_bits()},
                                        {"block_plan_seed_bits", plan.seed_bits()},
                                        {"rate_bps", single.rate_bps}};
            uint64_t out = output_length(static_cast<double>(raw), R, eps);
            report["gain"] = Json{
                {"protocol_only", acc.protocol_bits() ? static_cast<double>(out) / static_cast<double>(acc.protocol_bits()) : 0.0},
                {"including_extractor_seed",
                 acc.total_consumed() ? static_cast<double>(plan.output_bits()) / static_cast<double>(acc.total_consumed()) : 0.0}};
        }
    } else {
        report["mode"] = "simulation";
        if (run_stage("simulate", [&] { return cmd_simulate(c); })) {
            const auto &a = stages["simulate"]["seed_accounting"];
            acc.bits_for_positions = a["positions"].get<uint64_t>();
            acc.bits_for_states = a["states"].get<uint64_t>();
        }
        if (run_stage("certify", [&] { return cmd_certify(c); })) R = stages["certify"]["R"].get<double>();
        if (run_stage("extract", [&] { return cmd_extract(c); })) {
            acc.bits_for_extractor_seed = stages["extract"]["seed_bits"].get<uint64_t>();
            double out = static_cast<double>(stages["extract"]["output_bits"].get<uint64_t>());
            report["gain"] = Json{
                {"protocol_only", acc.protocol_bits() ? out / static_cast<double>(acc.protocol_bits()) : 0.0},
                {"including_extractor_seed", acc.total_consumed() ? out / static_cast<double>(acc.total_consumed()) : 0.0}};
        }
        run_stage("test", [&] { return cmd_test(c); });
    }
    report["stages"] = stages;
    report["seed_accounting"] = accounting_json(acc);
    report["R"] = R;
    bool ok = !failure && (injected ? R > 0 : stages["test"].value("pass", false));
    report["success"] = ok;
    if (failure) {
        report["error"] = Json{{"code", static_cast<int>(*failure)},
                               {"name", error_code_name(*failure)},
                               {"message", failure_message}};
    }
    return report;
}

bool report_succeeded(const Json &report) {
    if (report.contains("error")) return false;
    if (report.contains("success")) return report["success"].get<bool>();
    if (report.contains("pass")) return report["pass"].get<bool>();
    return true;
}

}  // namespace mdiqrng
