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

#include "mdiqrng/finite_size.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "mdiqrng/error.hpp"
#include "support.hpp"

using namespace mdiqrng;

TEST(finite_size, binary_entropy_examples) {
    EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
    EXPECT_EQ(binary_entropy(0), 0.0);
    EXPECT_EQ(binary_entropy(1), 0.0);
    // H(0.11) to 50 digits.
    EXPECT_NEAR(binary_entropy(0.11), 0.49991595816452800, 1e-15);
    EXPECT_NEAR(binary_entropy(0.11), static_cast<double>(fixtures::entropy_q(0.11Q)), 1e-15);
    EXPECT_THROW(binary_entropy(-0.1), Error);
    EXPECT_THROW(binary_entropy(1.5), Error);
}

TEST(finite_size, xi_examples) {
    EXPECT_EQ(xi(0, 0.7, 100, 1000), 0.0);
    double v = xi(0.001, 0.5, 1000000, 1000000);
    EXPECT_GT(v, 0);
    __float128 q = 0.75Q, th = 0.001Q;
    double oracle = static_cast<double>(fixtures::entropy_q(q + th / 2) -
                                        (fixtures::entropy_q(q) + fixtures::entropy_q(q + th)) / 2);
    EXPECT_NEAR(v, oracle, 1e-12 * oracle);
    try {
        xi(1e-6, 1, 10, 10);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::infeasible);
    }
}

TEST(finite_size, xi_matches_quad_definition) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 2000; k++) {
        double p = fixtures::uniform(rng, 0.0, 0.999);
        double ceiling = (1 - p) / 2;
        double theta = ceiling * std::pow(10.0, fixtures::uniform(rng, -6, 0)) * 0.999;
        uint64_t ni = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, 0, 14)));
        uint64_t n0 = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, 0, 28)));
        ni = std::max<uint64_t>(ni, 1);
        n0 = std::max<uint64_t>(n0, 1);
        double v = xi(theta, p, ni, n0);
        EXPECT_GT(v, 0);
        double pre = log2_deviation_bound(0, p, ni, n0);
        double oracle = fixtures::log2_bound_quad(theta, p, ni, n0);
        double total = static_cast<double>(ni) + static_cast<double>(n0);
        EXPECT_NEAR(pre - total * v, oracle, 1e-9 * std::max(1.0, std::abs(oracle)));
    }
}

TEST(finite_size, effective_probability_floor) {
    EXPECT_DOUBLE_EQ(effective_probability(1, 1000), 1 - 1 / 2000.0);
    EXPECT_DOUBLE_EQ(effective_probability(0.3, 1000), 0.3);
    // At the floor the ceiling (1 - p) / 2 is too small for any useful epsilon.
    EXPECT_THROW(solve_theta(1e-3, 1, 100000, 100000), Error);
    EXPECT_THROW(solve_theta(1e-10, 1, 820318, 1717983641600), Error);
}

TEST(finite_size, unsolvable_state_is_vacuous) {
    auto t = TestTally::from_counts({{{1000, 0}, {1000, 500}, {1000, 500}, {1000, 500}}}, 1000000000);
    auto f = fluctuations(t, 1e-10);
    EXPECT_TRUE(f.vacuous[0]);
    EXPECT_EQ(f.theta[0], 1);
    EXPECT_FALSE(f.vacuous[1]);
    EXPECT_GT(f.theta[1], 0);
    EXPECT_LT(f.theta[1], 0.25);
}

TEST(finite_size, solve_theta_vacuous_bound) {
    // The prefactor at N_i = N_0 = 10^6, p = 0.5 is 4 sqrt(2e-6 / 0.75) = 6.5e-3.
    EXPECT_NEAR(std::exp2(log2_deviation_bound(0, 0.5, 1000000, 1000000)), 4 * std::sqrt(2e-6 / 0.75), 1e-15);
    EXPECT_EQ(solve_theta(0.01, 0.5, 1000000, 1000000), 0.0);
    EXPECT_GT(solve_theta(0.006, 0.5, 1000000, 1000000), 0.0);
}

TEST(finite_size, solve_theta_infeasible_reports_ceiling) {
    try {
        solve_theta(1e-30, 0.5, 10, 10);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::infeasible);
        EXPECT_NE(std::string(e.what()).find("ceiling"), std::string::npos);
    }
    EXPECT_THROW(solve_theta(0, 0.5, 10, 10), Error);
    EXPECT_THROW(solve_theta(1, 0.5, 10, 10), Error);
    EXPECT_THROW(solve_theta(0.1, 0.5, 0, 10), Error);
}

TEST(finite_size, solve_theta_decreases_with_generation_turns) {
    double a = solve_theta(1e-10, 0.99, 820000, 100000000);
    double b = solve_theta(1e-10, 0.99, 820000, 10000000000);
    EXPECT_GT(a, b);
    EXPECT_GT(b, 0);
}

TEST(finite_size, solve_theta_reference_residual) {
    double theta = solve_theta(1e-10, 0.984, 818254, 17000000000);
    ASSERT_GT(theta, 0);
    double residual = std::exp2(fixtures::log2_bound_quad(theta, 0.984, 818254, 17000000000)) / 1e-10 - 1;
    EXPECT_LT(std::abs(residual), 1e-10);
}

TEST(finite_size, fluctuations_reference) {
    // Independent 50-digit evaluation of the same equation.
    const double e10[4] = {4.6196432425092822e-5, 5.9635602117244003e-4, 4.1774170987700116e-4,
                           4.1683382018575647e-4};
    const double e5[4] = {3.4908033729278022e-5, 3.8280055031323563e-4, 2.7272761814870828e-4,
                          2.7216383281841021e-4};
    auto t = fixtures::reference_tally();
    auto a = fluctuations(t, 1e-10);
    auto b = fluctuations(t, 1e-5);
    EXPECT_EQ(a.epsilon, 1e-10);
    for (size_t i = 0; i < 4; i++) {
        EXPECT_NEAR(a.theta[i], e10[i], 1e-9 * e10[i]);
        EXPECT_NEAR(b.theta[i], e5[i], 1e-9 * e5[i]);
    }
}

TEST(finite_size, solve_theta_residual_property) {
    std::mt19937_64 rng(41);
    int solved = 0;
    for (int k = 0; k < 300; k++) {
        double p = fixtures::uniform(rng, 0.01, 0.999);
        uint64_t ni = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, std::log(1e3), std::log(1e7))));
        uint64_t n0 = static_cast<uint64_t>(std::exp(fixtures::uniform(rng, std::log(1e6), std::log(1e12))));
        double eps = std::exp(fixtures::uniform(rng, std::log(1e-15), std::log(1e-2)));
        double theta;
        try {
            theta = solve_theta(eps, p, ni, n0);
        } catch (const Error &e) {
            ASSERT_EQ(e.code(), ErrorCode::infeasible);
            continue;
        }
        if (theta == 0) continue;
        solved++;
        double residual = std::exp2(fixtures::log2_bound_quad(theta, p, ni, n0) - std::log2(eps)) - 1;
        EXPECT_LT(std::abs(residual), 1e-9) << p << " " << ni << " " << n0 << " " << eps;
    }
    EXPECT_GT(solved, 200);
}

TEST(finite_size, theta_monotonicity_property) {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 200; k++) {
        double p = fixtures::uniform(rng, 0.5, 0.995);
        uint64_t ni = static_cast<uint64_t>(fixtures::uniform(rng, 1e4, 1e6));
        uint64_t n0 = static_cast<uint64_t>(fixtures::uniform(rng, 1e8, 1e11));
        double eps = std::exp(fixtures::uniform(rng, std::log(1e-12), std::log(1e-4)));
        double base = solve_theta(eps, p, ni, n0);
        EXPECT_LE(solve_theta(eps, p, ni * 2, n0), base);
        EXPECT_LE(solve_theta(eps, p, ni, n0 * 2), base);
        EXPECT_LE(solve_theta(eps * 10, p, ni, n0), base);
    }
}
