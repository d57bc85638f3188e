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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [config_dir]

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdiqrng/certifier.hpp"
#include "mdiqrng/config.hpp"
#include "mdiqrng/error.hpp"
#include "mdiqrng/extractor.hpp"
#include "mdiqrng/finite_size.hpp"
#include "mdiqrng/pipeline.hpp"
#include "mdiqrng/protocol.hpp"
#include "mdiqrng/randtests.hpp"
#include "mdiqrng/records.hpp"
#include "support.hpp"

#ifndef MDIQRNG_CONFIG_DIR
#define MDIQRNG_CONFIG_DIR "tools/configs"
#endif

using namespace mdiqrng;
namespace fs = std::filesystem;

namespace {

std::string config_dir = MDIQRNG_CONFIG_DIR;

// Collects sub-check results for one criterion.
class Checks {
   public:
    void expect(bool ok, const std::string &what) {
        if (!ok) {
            pass_ = false;
            failed_.push_back(what);
        }
    }
    void note(const std::string &text) {
        notes_.push_back(text);
    }
    bool pass() const {
        return pass_;
    }
    std::string summary() const {
        std::string out;
        for (const auto &n : notes_) out += (out.empty() ? "" : "; ") + n;
        for (const auto &f : failed_) out += (out.empty() ? "failed: " : "; failed: ") + f;
        return out;
    }

   private:
    bool pass_ = true;
    std::vector<std::string> failed_, notes_;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

// Rounds to `sig` significant digits.
double round_sig(double v, int sig) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", sig - 1, v);
    return std::strtod(buf, nullptr);
}

bool same_at_sig(double v, double ref, int sig) {
    return std::abs(round_sig(v, sig) - ref) <= 1e-12 * std::abs(ref);
}

void push_value(std::vector<uint8_t> &bits, uint64_t value, unsigned width) {
    for (unsigned k = width; k-- > 0;) bits.push_back((value >> k) & 1);
}

class TempDir {
   public:
    explicit TempDir(const std::string &tag)
        : path_(fs::temp_directory_path() / ("mdiqrng_acceptance_" + std::to_string(::getpid()) + "_" + tag)) {
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string file(const std::string &name) const {
        return (path_ / name).string();
    }

   private:
    fs::path path_;
};

Config profile(const std::string &name, const TempDir &dir) {
    Config c;
    c.load_file(config_dir + "/" + name);
    c.set("paths.records", dir.file("records.mdqr"));
    c.set("paths.certificate", dir.file("certificate.json"));
    c.set("paths.output", dir.file("output.bin"));
    return c;
}

SeedAccounting reference_round_accounting(bool &collision_free) {
    std::vector<uint8_t> bits;
    for (uint64_t k = 0; k < (1u << 15); k++) {
        push_value(bits, k * 524287 + 17, 34);
        push_value(bits, k & 3, 2);
    }
    BufferSeed seed = BufferSeed::from_bits(bits);
    auto b = build_schedule(seed, uint64_t{1} << 34, 1u << 15, 34);
    collision_free = b.rejected_draws == 0 && seed.remaining() == 0u;
    return b.accounting;
}

void a1(Checks &c) {
    bool clean = false;
    auto acc = reference_round_accounting(clean);
    c.expect(clean, "seed positions collide or seed not fully consumed");
    c.expect(acc.protocol_bits() == 1179648u, "protocol seed " + std::to_string(acc.protocol_bits()));
    c.expect(acc.protocol_bits() == 1152u * 1024u, "not 1152 Kbit");
    c.note("protocol seed " + std::to_string(acc.protocol_bits()) + " bits");
}

void a2(Checks &c) {
    auto t = fixtures::reference_tally();
    const double printed[4] = {1.48e-4, 1.60e-2, 7.85e-3, 7.82e-3};
    std::string shown;
    for (size_t i = 0; i < 4; i++) {
        double one = t.one_probability(i);
        shown += (i ? "," : "") + fmt(one, 4);
        c.expect(same_at_sig(one, printed[i], 3), std::string(state_name(kAllTestStates[i])) + " p(1) " + fmt(one));
    }
    auto e = reconstruct(t.p);
    c.expect(std::abs(e.a0 - 0.9919) <= 1e-4, "a0 = " + fmt(e.a0));
    c.expect(std::abs(e.nz - 7.98e-3) <= 1e-4, "nz = " + fmt(e.nz));
    c.note("p(1) = " + shown + ", a0 = " + fmt(e.a0) + ", nz = " + fmt(e.nz));
}

void a3(Checks &c) {
    auto t = fixtures::reference_tally();
    CertifyOptions opt;
    opt.mu = 0.06;
    opt.functional = EntropyFunctional::ShannonBinary;
    opt.epsilon_theta = 1e-10;
    opt.oracle_density = 1024;
    auto rep = certify(t, opt);
    CertifyOptions loose = opt;
    loose.epsilon_theta = 1e-5;
    loose.oracle_density = 0;
    auto rep_loose = certify(t, loose);
    // R grows with epsilon, so the two ends bracket every epsilon in between.
    bool in_window = false;
    for (double r : {rep.R, rep_loose.R}) in_window |= r >= 1.6e-4 && r <= 3.0e-4;
    c.expect(in_window, "R not in [1.6e-4, 3.0e-4] for epsilon in [1e-10, 1e-5]: R(1e-10) = " + fmt(rep.R) +
                            ", R(1e-5) = " + fmt(rep_loose.R));
    c.note("R(1e-10) = " + fmt(rep.R) + ", R(1e-5) = " + fmt(rep_loose.R));

    c.expect(rep.oracle_agrees.value_or(false), "oracle disagrees");
    c.note("oracle R = " + fmt(rep.oracle_R.value_or(-1)));

    Json cert = certificate_json(t, rep, opt);
    c.expect(cert["epsilon_theta"].get<double>() == 1e-10, "certificate epsilon_theta");
    double envelope = cert["upper_envelope"].get<double>();
    // Independent arithmetic: 2 a0 g H((1 - sqrt(1 - ny^2 - nz^2)) / 2) at the point estimate.
    double p1 = t.p[0], p2 = t.p[1], p4 = t.p[3];
    double a0 = (p1 + p2) / 2, nz = (p1 - p2) / (p1 + p2), ny = p4 / a0 - 1;
    double g = 1.06 * std::exp(-0.06);
    double expect_env = 2 * a0 * g * binary_entropy((1 - std::sqrt(1 - ny * ny - nz * nz)) / 2);
    c.expect(std::abs(envelope - expect_env) <= 1e-9 * expect_env, "envelope " + fmt(envelope) + " vs " + fmt(expect_env));
    c.expect(same_at_sig(envelope, 5.5e-4, 2), "envelope " + fmt(envelope) + " is not 5.5e-4 at 2 digits");
    c.note("envelope = " + fmt(envelope));

    double min_q = qubit_bound(t, FluctuationSet::zero(), EntropyFunctional::MinEntropy).R;
    c.expect(same_at_sig(min_q, 4.6e-5, 2), "MinEntropy theta=0 " + fmt(min_q) + " is not 4.6e-5 at 2 digits");
    CertifyOptions min_opt = opt;
    min_opt.functional = EntropyFunctional::MinEntropy;
    min_opt.oracle_density = 0;
    c.note("MinEntropy theta=0 = " + fmt(min_q) + ", MinEntropy certified = " + fmt(certify(t, min_opt).R));
}

void a4(Checks &c) {
    bool clean = false;
    SeedAccounting seed = reference_round_accounting(clean);
    SeedAccounting rounds;
    for (int r = 0; r < 100; r++) rounds += seed;
    auto t = throughput_report(2.3e-4, 25e6, rounds, 1.6e12);
    c.expect(t.rate_bps == 5750, "rate " + fmt(t.rate_bps));
    c.expect(t.gain_ratio >= 3.0 && t.gain_ratio <= 3.5, "gain " + fmt(t.gain_ratio));
    double gain_decimal = static_cast<double>(t.extractable_bits) / 115.2e6;
    c.expect(gain_decimal >= 3.0 && gain_decimal <= 3.5, "gain over 115.2 Mbit " + fmt(gain_decimal));
    c.note("rate " + fmt(t.rate_bps) + " bps, gain " + fmt(t.gain_ratio, 4) + " (seed " +
           std::to_string(rounds.protocol_bits()) + " bits), " + fmt(gain_decimal, 4) + " over 115.2 Mbit, " +
           std::to_string(t.extractable_bits) + " output bits");
}

void a5(Checks &c) {
    std::mt19937_64 rng(1001);
    double worst = 0;
    for (int k = 0; k < 1000; k++) {
        Povm povm = fixtures::random_povm(rng);
        auto e = reconstruct(fixtures::forward_probabilities(povm));
        worst = std::max({worst, std::abs(e.a0 - povm.a0), std::abs(e.nx - povm.n.x), std::abs(e.ny - povm.n.y),
                          std::abs(e.nz - povm.n.z)});
        if (!e.physical) c.expect(false, "random valid POVM reconstructed as unphysical");
    }
    c.expect(worst <= 1e-9, "worst parameter error " + fmt(worst));
    c.note("worst parameter error " + fmt(worst, 3));
}

void a6(Checks &c) {
    std::mt19937_64 rng(1002);
    double worst_rel = 0;
    int disagree = 0;
    for (int k = 0; k < 50; k++) {
        auto in = fixtures::random_instance(rng);
        auto b = coherent_bound(in.tally, in.theta, in.mu, EntropyFunctional::ShannonBinary);
        auto o = brute_force_bound(in.tally, in.theta, in.mu, EntropyFunctional::ShannonBinary, 1024);
        if (!oracle_agrees(b.R, o.R)) disagree++;
        if (o.R > 0) worst_rel = std::max(worst_rel, std::abs(b.R - o.R) / o.R);
    }
    c.expect(disagree == 0, std::to_string(disagree) + " of 50 tallies outside tolerance");
    c.note("worst relative gap " + fmt(worst_rel, 3) + " (tolerance " + fmt(kOracleRelativeTolerance) + " relative, " +
           fmt(kOracleAbsoluteTolerance) + " absolute)");
}

double certify_adversary(const Povm &a, const Povm &b, bool alternate) {
    ExpandedSeed seed(1003);
    auto sb = build_schedule(seed, 10000000, 1u << 18, 24);
    PovmSchedule ps;
    ps.povms = alternate ? std::vector<Povm>{a, b} : std::vector<Povm>{a};
    TallyAccumulator acc;
    simulate(sb.schedule, AdversarialDevice{ps}, 1004, [&](std::span<const TrialRecord> r) { acc.add(r); });
    return certify(acc.finish(), CertifyOptions{}).R;
}

void a7(Checks &c) {
    Povm zero{1, {}}, one{0, {}};
    double r_zero = certify_adversary(zero, zero, false);
    double r_one = certify_adversary(one, one, false);
    double r_alt = certify_adversary(zero, one, true);
    c.expect(r_zero == 0, "all-zero device R = " + fmt(r_zero));
    c.expect(r_one == 0, "all-one device R = " + fmt(r_one));
    c.expect(r_alt == 0, "alternating device R = " + fmt(r_alt));

    TempDir dir("a7");
    Config cfg = profile("reference_device.ini", dir);
    cmd_simulate(cfg);
    Json cert = cmd_certify(cfg);
    double r = cert["R"].get<double>();
    c.expect(cfg.get_u64("protocol.trials") == 10000000u, "honest profile is not 10^7 trials");
    c.expect(r > 0, "honest device R = " + fmt(r));
    c.note("adversarial R = " + fmt(r_zero) + "/" + fmt(r_one) + "/" + fmt(r_alt) + ", honest 10^7 R = " + fmt(r));
}

void a8(Checks &c) {
    bool universal = true;
    for (unsigned n = 1; n <= 12; n++) {
        for (unsigned m = 1; m <= std::min(4u, n); m++) {
            // T x = T y iff T (x ^ y) = 0: count kernel seeds per nonzero difference.
            uint64_t seeds = uint64_t{1} << (m + n - 1);
            for (uint64_t d = 1; d < (uint64_t{1} << n); d++) {
                uint64_t hits = 0;
                for (uint64_t s = 0; s < seeds; s++) hits += toeplitz_small(s, d, n, m) == 0;
                if (hits << m > seeds) universal = false;
            }
        }
    }
    c.expect(universal, "collision probability above 2^-m");

    std::mt19937_64 rng(1005);
    int nonlinear = 0;
    for (int k = 0; k < 10000; k++) {
        size_t n = 1 + rng() % 2048;
        size_t m = 1 + rng() % n;
        ToeplitzSpec spec{n, m, fixtures::random_bits(rng, m + n - 1)};
        BitVector x = fixtures::random_bits(rng, n), y = fixtures::random_bits(rng, n);
        if (extract(x ^ y, spec) != (extract(x, spec) ^ extract(y, spec))) nonlinear++;
    }
    c.expect(nonlinear == 0, std::to_string(nonlinear) + " of 10^4 pairs break linearity");

    BitVector raw = fixtures::random_bits(rng, 40007);
    for (auto mode : {SeedMode::Reuse, SeedMode::PerBlock}) {
        auto plan = plan_blocks(raw.size(), 8192, 0.3, kDefaultExtractorEpsilon, mode);
        ExpandedSeed seed(1006), replay(1006);
        auto ex = extract_blocks(raw, plan, seed, 2);
        BitVector expect;
        BitVector s = read_seed_bits(replay, plan.block_m + plan.block_n - 1);
        for (uint64_t b = 0; b < plan.blocks; b++) {
            if (mode == SeedMode::PerBlock && b > 0) s = read_seed_bits(replay, plan.block_m + plan.block_n - 1);
            expect.append(fixtures::naive_toeplitz(raw.slice(b * plan.block_n, plan.block_n), s, plan.block_m));
        }
        c.expect(ex.output == expect, "block streaming differs in " + std::string(seed_mode_name(mode)) + " mode");
    }

    ToeplitzSpec big{size_t{1} << 20, size_t{1} << 19, fixtures::random_bits(rng, (size_t{3} << 19) - 1)};
    BitVector x = fixtures::random_bits(rng, big.n);
    auto t0 = std::chrono::steady_clock::now();
    extract(x, big);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.note("n = 2^20 block at " + fmt(big.n / sec / 1e6, 3) + " Mbit/s input");
}

void a9(Checks &c) {
    TempDir dir("a9");
    Config cfg = profile("high_rate.ini", dir);
    Json r = cmd_pipeline(cfg);
    c.expect(report_succeeded(r), "pipeline did not succeed");
    const auto &test = r["stages"]["test"];
    uint64_t bits = test["bits"].get<uint64_t>();
    c.expect(bits >= 10000000u, "only " + std::to_string(bits) + " output bits");
    std::string shown;
    for (const auto &v : test["tests"]) {
        bool ok = v["pass"].get<bool>() && v["proportion_pass"].get<bool>();
        c.expect(ok, v["test"].get<std::string>() + " p = " + fmt(v["p_value"].get<double>()) +
                         ", proportion = " + fmt(v["proportion"].get<double>()));
        shown += " " + v["test"].get<std::string>() + " " + fmt(v["p_value"].get<double>(), 3) + "/" +
                 fmt(v["proportion"].get<double>(), 4);
    }
    c.expect(test["tests"].size() == 4, "expected four tests");

    BitVector raw = generation_bits(read_records(cfg.get("paths.records")));
    auto verdicts = battery(raw, cfg.get_u64("test.subsequence_bits"));
    bool mono_fails = !(verdicts[0].pass && verdicts[0].proportion_pass);
    c.expect(mono_fails, "raw bits pass monobit");
    c.note(std::to_string(bits) + " output bits;" + shown + "; raw monobit p = " + fmt(verdicts[0].p_value, 3) +
           ", proportion = " + fmt(verdicts[0].proportion, 3) + ", raw ones = " + fmt(double(raw.popcount()) / raw.size(), 4));
}

void a10(Checks &c) {
    std::mt19937_64 rng(1007);
    int solved = 0;
    double worst = 0;
    while (solved < 100) {
        double p = fixtures::uniform(rng, 0.5, 0.999);
        uint64_t ni = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, std::log(1e4), std::log(1e7))));
        uint64_t n0 = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, std::log(1e8), std::log(1e12))));
        double eps = std::exp(fixtures::uniform(rng, std::log(1e-15), std::log(1e-3)));
        double theta;
        try {
            theta = solve_theta(eps, p, ni, n0);
        } catch (const Error &) {
            continue;
        }
        if (theta == 0) continue;
        solved++;
        double residual = std::abs(std::exp2(fixtures::log2_bound_quad(theta, p, ni, n0) - std::log2(eps)) - 1);
        worst = std::max(worst, residual);
    }
    c.expect(worst <= 1e-9, "worst residual " + fmt(worst));

    int violations = 0;
    for (double p : {0.6, 0.9, 0.98}) {
        double prev = INFINITY;
        for (double ni = 1e4; ni <= 1e7; ni *= 1.5) {
            double th = solve_theta(1e-10, p, static_cast<uint64_t>(ni), 1000000000000u);
            violations += th > prev;
            prev = th;
        }
        prev = INFINITY;
        for (double n0 = 1e8; n0 <= 1e13; n0 *= 2) {
            double th = solve_theta(1e-10, p, 820318, static_cast<uint64_t>(n0));
            violations += th > prev;
            prev = th;
        }
        prev = INFINITY;
        for (double eps = 1e-15; eps <= 1e-3; eps *= 10) {
            double th = solve_theta(eps, p, 820318, 1717983641600u);
            violations += th > prev;
            prev = th;
        }
    }
    c.expect(violations == 0, std::to_string(violations) + " monotonicity violations");
    c.note("100 instances, worst relative residual " + fmt(worst, 3));
}

struct Criterion {
    const char *id;
    const char *title;
    double budget_seconds;
    std::function<void(Checks &)> run;
};

}  // namespace

int main(int argc, char **argv) {
    if (argc > 1) config_dir = argv[1];
    const Criterion criteria[] = {
        {"A1", "seed accounting", 1, a1},
        {"A2", "reference tomography", 1, a2},
        {"A3", "reference bound", 60, a3},
        {"A4", "throughput arithmetic", 1, a4},
        {"A5", "tomography round trip", 5, a5},
        {"A6", "optimizer vs oracle", 600, a6},
        {"A7", "soundness", 300, a7},
        {"A8", "extractor", 120, a8},
        {"A9", "battery", 300, a9},
        {"A10", "fluctuation solver", 10, a10},
    };
    int failures = 0;
    for (const auto &cr : criteria) {
        Checks checks;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(checks);
        } catch (const std::exception &e) {
            checks.expect(false, std::string("exception: ") + e.what());
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        checks.expect(sec < cr.budget_seconds, "runtime " + fmt(sec, 3) + " s over " + fmt(cr.budget_seconds) + " s");
        failures += !checks.pass();
        std::printf("%-3s %s  %s (%.2f s): %s\n", cr.id, checks.pass() ? "PASS" : "FAIL", cr.title, sec,
                    checks.summary().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
