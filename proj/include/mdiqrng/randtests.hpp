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

#ifndef MDIQRNG_RANDTESTS_HPP
#define MDIQRNG_RANDTESTS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdiqrng/bits.hpp"

namespace mdiqrng {

constexpr double kSignificance = 0.01;
constexpr double kMinProportion = 0.98;

struct TestVerdict {
    std::string test;
    double p_value = 0;
    bool pass = false;
    /// Fraction of sub-sequences with p >= 0.01 (1 or 0 for a single sequence).
    double proportion = 0;
    bool proportion_pass = false;
    uint64_t sequences = 1;
    /// Sub-sequence p-values; empty for single-sequence verdicts.
    std::vector<double> p_values;
};

/// Frequency test: p = erfc(|S_n| / sqrt(2n)). Requires n >= 100.
TestVerdict monobit(const BitVector &bits);
/// Block frequency: chi^2 = 4M sum (pi_i - 1/2)^2 over floor(n/M) blocks,
/// p = Q(N/2, chi^2/2). Requires n >= 100 and at least one block.
TestVerdict block_frequency(const BitVector &bits, size_t block_len = 128);
/// Runs test with the frequency prerequisite |pi - 1/2| < 2/sqrt(n); p = 0 when
/// the prerequisite fails. Requires n >= 100.
TestVerdict runs(const BitVector &bits);
/// Longest run of ones in blocks. Block length 8, 128 or 10^4 chosen by n
/// (n >= 128, 6272, 750000). Requires n >= 128.
TestVerdict longest_run(const BitVector &bits);

struct LongestRunTable {
    size_t block_len;
    unsigned low;   // first class counts runs <= low
    std::vector<double> pi;
};
const LongestRunTable &longest_run_table(size_t n);

/// Regularized upper incomplete gamma Q(a, x).
double igamc(double a, double x);

/// Runs every test on consecutive sub-sequences of `subsequence_len` bits
/// (trailing bits are ignored). p_value is the chi-square uniformity p-value of
/// the sub-sequence p-values over 10 bins. Throws Error(insufficient_data)
/// with fewer than 50 sub-sequences.
std::vector<TestVerdict> battery(const BitVector &bits, size_t subsequence_len, size_t block_len = 128,
                                 unsigned threads = 1);

constexpr uint64_t kMinSubsequences = 50;

/// 10-bin chi-square uniformity p-value on [0, 1].
double uniformity_p_value(std::span<const double> p_values);

/// Kolmogorov-Smirnov distance of the sample from U(0,1).
double ks_statistic(std::vector<double> sample);
/// Critical value at level 0.01 (Stephens' finite-sample form).
double ks_critical_1pct(size_t n);

bool battery_passes(const std::vector<TestVerdict> &verdicts);

}  // namespace mdiqrng

#endif
