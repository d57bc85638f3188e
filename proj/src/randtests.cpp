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

#include "mdiqrng/randtests.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <future>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

namespace {

void require_length(const BitVector &bits, size_t minimum, const char *test) {
    if (bits.size() < minimum) {
        std::ostringstream ss;
        ss << test << " needs at least " << minimum << " bits, got " << bits.size();
        fail(ErrorCode::insufficient_data, ss.str());
    }
}

TestVerdict verdict(const char *name, double p) {
    TestVerdict v;
    v.test = name;
    v.p_value = std::clamp(p, 0.0, 1.0);
    v.pass = v.p_value >= kSignificance;
    v.proportion = v.pass ? 1 : 0;
    v.proportion_pass = v.pass;
    return v;
}

uint64_t ones_in(const BitVector &bits, size_t offset, size_t count) {
    return bits.slice(offset, count).popcount();
}

}  // namespace

double igamc(double a, double x) {
    if (x <= 0) return 1;
    return boost::math::gamma_q(a, x);
}

TestVerdict monobit(const BitVector &bits) {
    require_length(bits, 100, "monobit");
    double n = static_cast<double>(bits.size());
    double s = 2 * static_cast<double>(bits.popcount()) - n;
    return verdict("monobit", std::erfc(std::abs(s) / std::sqrt(2 * n)));
}

TestVerdict block_frequency(const BitVector &bits, size_t block_len) {
    require_length(bits, 100, "block_frequency");
    if (block_len == 0 || block_len > bits.size()) {
        fail(ErrorCode::invalid_argument, "block_frequency block length must be in [1, n]");
    }
    size_t blocks = bits.size() / block_len;
    // 4 M sum (pi - 1/2)^2 = sum (2 ones - M)^2 / M, accumulated exactly.
    uint64_t excess2 = 0;
    for (size_t b = 0; b < blocks; b++) {
        int64_t d = 2 * static_cast<int64_t>(ones_in(bits, b * block_len, block_len)) - static_cast<int64_t>(block_len);
        excess2 += static_cast<uint64_t>(d * d);
    }
    double chi2 = static_cast<double>(excess2) / static_cast<double>(block_len);
    return verdict("block_frequency", igamc(static_cast<double>(blocks) / 2, chi2 / 2));
}

TestVerdict runs(const BitVector &bits) {
    require_length(bits, 100, "runs");
    size_t n = bits.size();
    double dn = static_cast<double>(n);
    double pi = static_cast<double>(bits.popcount()) / dn;
    if (std::abs(pi - 0.5) >= 2 / std::sqrt(dn)) {
        return verdict("runs", 0);
    }
    // V = 1 + number of adjacent unequal pairs = 1 + popcount(b xor (b >> 1)).
    const auto &w = bits.words();
    uint64_t changes = 0;
    for (size_t k = 0; k < w.size(); k++) {
        uint64_t next = (w[k] >> 1) | (k + 1 < w.size() ? w[k + 1] << 63 : 0);
        uint64_t diff = w[k] ^ next;
        size_t valid = std::min<size_t>(64, n - 1 - std::min(n - 1, 64 * k));
        if (valid < 64) diff &= (uint64_t{1} << valid) - 1;
        changes += std::popcount(diff);
    }
    double v = static_cast<double>(changes + 1);
    double q = pi * (1 - pi);
    return verdict("runs", std::erfc(std::abs(v - 2 * dn * q) / (2 * std::sqrt(2 * dn) * q)));
}

const LongestRunTable &longest_run_table(size_t n) {
    static const LongestRunTable small{8, 1, {0.2148, 0.3672, 0.2305, 0.1875}};
    static const LongestRunTable medium{128, 4, {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}};
    static const LongestRunTable large{10000, 10, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}};
    if (n < 6272) return small;
    if (n < 750000) return medium;
    return large;
}

TestVerdict longest_run(const BitVector &bits) {
    require_length(bits, 128, "longest_run");
    const auto &table = longest_run_table(bits.size());
    size_t blocks = bits.size() / table.block_len;
    size_t classes = table.pi.size();
    std::vector<double> counts(classes, 0);
    for (size_t b = 0; b < blocks; b++) {
        unsigned best = 0, cur = 0;
        for (size_t i = b * table.block_len; i < (b + 1) * table.block_len; i++) {
            cur = bits.get(i) ? cur + 1 : 0;
            best = std::max(best, cur);
        }
        size_t cls = best <= table.low ? 0 : std::min<size_t>(best - table.low, classes - 1);
        counts[cls] += 1;
    }
    double chi2 = 0;
    double N = static_cast<double>(blocks);
    for (size_t i = 0; i < classes; i++) {
        double expected = N * table.pi[i];
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    return verdict("longest_run", igamc(static_cast<double>(classes - 1) / 2, chi2 / 2));
}

double uniformity_p_value(std::span<const double> p_values) {
    if (p_values.empty()) {
        fail(ErrorCode::insufficient_data, "uniformity check needs at least one p-value");
    }
    std::array<double, 10> bins{};
    for (double p : p_values) bins[std::min<size_t>(9, static_cast<size_t>(std::max(0.0, p) * 10))] += 1;
    double expected = static_cast<double>(p_values.size()) / 10;
    double chi2 = 0;
    for (double b : bins) chi2 += (b - expected) * (b - expected) / expected;
    return igamc(4.5, chi2 / 2);
}

double ks_statistic(std::vector<double> sample) {
    if (sample.empty()) {
        fail(ErrorCode::insufficient_data, "KS statistic needs a nonempty sample");
    }
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0;
    for (size_t i = 0; i < sample.size(); i++) {
        double x = std::clamp(sample[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - x, x - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_1pct(size_t n) {
    double r = std::sqrt(static_cast<double>(n));
    return 1.628 / (r + 0.12 + 0.11 / r);
}

std::vector<TestVerdict> battery(const BitVector &bits, size_t subsequence_len, size_t block_len, unsigned threads) {
    if (subsequence_len == 0) {
        fail(ErrorCode::invalid_argument, "sub-sequence length must be positive");
    }
    uint64_t count = bits.size() / subsequence_len;
    if (count < kMinSubsequences) {
        std::ostringstream ss;
        ss << "battery needs at least " << kMinSubsequences << " sub-sequences of " << subsequence_len
           << " bits, input has " << count;
        fail(ErrorCode::insufficient_data, ss.str());
    }
    const char *names[] = {"monobit", "block_frequency", "runs", "longest_run"};
    std::vector<std::array<double, 4>> per(count);
    auto work = [&](uint64_t begin, uint64_t end) {
        for (uint64_t s = begin; s < end; s++) {
            BitVector sub = bits.slice(s * subsequence_len, subsequence_len);
            per[s] = {monobit(sub).p_value, block_frequency(sub, block_len).p_value, runs(sub).p_value,
                      longest_run(sub).p_value};
        }
    };
    unsigned width = std::max(1u, threads);
    if (width == 1) {
        work(0, count);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned k = 0; k < width; k++) {
            jobs.push_back(std::async(std::launch::async, work, count * k / width, count * (k + 1) / width));
        }
        for (auto &j : jobs) j.get();
    }

    std::vector<TestVerdict> out;
    for (size_t t = 0; t < 4; t++) {
        TestVerdict v;
        v.test = names[t];
        v.sequences = count;
        uint64_t passed = 0;
        for (const auto &row : per) {
            v.p_values.push_back(row[t]);
            passed += row[t] >= kSignificance;
        }
        v.p_value = uniformity_p_value(v.p_values);
        v.pass = v.p_value >= kSignificance;
        v.proportion = static_cast<double>(passed) / static_cast<double>(count);
        v.proportion_pass = v.proportion >= kMinProportion;
        out.push_back(std::move(v));
    }
    return out;
}

bool battery_passes(const std::vector<TestVerdict> &verdicts) {
    return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(),
                                            [](const TestVerdict &v) { return v.pass && v.proportion_pass; });
}

}  // namespace mdiqrng
