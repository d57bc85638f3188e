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

#ifndef MDIQRNG_TESTS_SUPPORT_HPP
#define MDIQRNG_TESTS_SUPPORT_HPP

#include <quadmath.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mdiqrng/bits.hpp"
#include "mdiqrng/finite_size.hpp"
#include "mdiqrng/qstate.hpp"
#include "mdiqrng/seed.hpp"
#include "mdiqrng/tomography.hpp"

namespace mdiqrng::fixtures {

inline constexpr std::array<StateCount, 4> kReferenceCounts{{
    {820318, 121},
    {818254, 13067},
    {819125, 6431},
    {819103, 6403},
}};

/// 100 rounds of 2^34 trials minus the test trials.
inline uint64_t reference_generation_turns() {
    uint64_t tests = 0;
    for (const auto &c : kReferenceCounts) tests += c.trials;
    return 100 * (uint64_t{1} << 34) - tests;
}

inline TestTally reference_tally() {
    return TestTally::from_counts(kReferenceCounts, reference_generation_turns());
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform direction scaled to a random fraction of the admissible length.
inline Povm random_povm(std::mt19937_64 &rng, double a0_lo = 0.01, double a0_hi = 0.99) {
    double a0 = uniform(rng, a0_lo, a0_hi);
    double limit = std::min(1.0, (1 - a0) / a0);
    std::normal_distribution<double> g;
    BlochVector d{g(rng), g(rng), g(rng)};
    double len = d.norm();
    double r = limit * std::cbrt(uniform01(rng));
    return Povm{a0, (r / len) * d};
}

inline std::array<double, 4> forward_probabilities(const Povm &povm) {
    std::array<double, 4> p{};
    for (auto s : kAllTestStates) p[state_index(s)] = outcome_zero_prob(povm, bloch_of_state(s));
    return p;
}

/// Exact binary entropy in quad precision.
// Probabilities a coherent source with the given single-photon POVM could
// produce when the multi-photon part answers '0' with probability `bias`.
inline std::array<double, 4> coherent_probabilities(const Povm &povm, double mu, double bias) {
    double g = (1 + mu) * std::exp(-mu);
    auto p = forward_probabilities(povm);
    for (double &v : p) v = g * v + (1 - g) * bias;
    return p;
}

struct Instance {
    TestTally tally;
    FluctuationSet theta;
    double mu;
};

inline Instance random_instance(std::mt19937_64 &rng) {
    Povm povm = random_povm(rng, 0.3, 0.98);
    double mu = uniform(rng, 0.005, 0.2);
    auto p = coherent_probabilities(povm, mu, uniform01(rng));
    uint64_t n = static_cast<uint64_t>(std::exp(uniform(rng, std::log(1e5), std::log(1e7))));
    uint64_t n0 = static_cast<uint64_t>(std::exp(uniform(rng, std::log(1e9), std::log(1e12))));
    auto t = TestTally::from_probabilities(p, {n, n, n, n}, n0);
    double eps = std::exp(uniform(rng, std::log(1e-12), std::log(1e-3)));
    return {t, fluctuations(t, eps), mu};
}

inline __float128 entropy_q(__float128 x) {
    if (x <= 0 || x >= 1) return 0;
    return -(x * log2q(x) + (1 - x) * log2q(1 - x));
}

/// log2 of the deviation bound evaluated term by term in quad precision.
inline double log2_bound_quad(double theta, double p, uint64_t n_i, uint64_t n_0) {
    __float128 P = p, T = static_cast<__float128>(n_i) + n_0;
    __float128 q = (1 + P) / 2;
    __float128 th = theta;
    __float128 x = entropy_q(q + n_0 * th / T) - (n_i * entropy_q(q) + n_0 * entropy_q(q + th)) / T;
    __float128 pre = 2 + (log2q(T) - log2q(static_cast<__float128>(n_i)) - log2q(static_cast<__float128>(n_0)) -
                          log2q(1 + P) - log2q(1 - P)) /
                             2;
    return static_cast<double>(pre - T * x);
}

/// Row-by-row product with T[i][j] = seed[i + n - 1 - j].
inline BitVector naive_toeplitz(const BitVector &raw, const BitVector &seed, size_t m) {
    size_t n = raw.size();
    BitVector out(m);
    for (size_t i = 0; i < m; i++) {
        bool acc = false;
        for (size_t j = 0; j < n; j++) acc ^= seed.get(i + n - 1 - j) && raw.get(j);
        out.set(i, acc);
    }
    return out;
}

inline BitVector random_bits(std::mt19937_64 &rng, size_t n) {
    BitVector v(n);
    for (size_t i = 0; i < n; i++) v.set(i, rng() & 1);
    return v;
}

/// Schoolbook carry-less product of word-packed polynomials, bit by bit.
inline std::vector<uint64_t> naive_gf2_multiply(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b) {
    std::vector<uint64_t> out(a.size() + b.size(), 0);
    for (size_t i = 0; i < 64 * a.size(); i++) {
        if (!((a[i / 64] >> (i % 64)) & 1)) continue;
        for (size_t j = 0; j < 64 * b.size(); j++) {
            if ((b[j / 64] >> (j % 64)) & 1) out[(i + j) / 64] ^= uint64_t{1} << ((i + j) % 64);
        }
    }
    return out;
}

}  // namespace mdiqrng::fixtures

#endif
