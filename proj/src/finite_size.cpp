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

#include <cmath>
#include <numbers>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

namespace {

// log1p(t) - t
double log1p_minus(double t) {
    if (std::abs(t) < 0.1) {
        double term = t;
        double sum = 0;
        for (int k = 2; k < 40; k++) {
            term *= -t;
            double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::log1p(t) - t;
}

}  // namespace

double binary_entropy(double p) {
    if (!(p >= 0 && p <= 1)) {
        fail(ErrorCode::invalid_argument, "binary entropy argument outside [0,1]");
    }
    if (p == 0 || p == 1) {
        return 0;
    }
    return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
}

double bernoulli_kl(double a, double d) {
    double b = a - d;
    double linear = d * d / (b * (1 - b));
    double up = a > 0 ? a * log1p_minus(d / b) : 0;
    double down = a < 1 ? (1 - a) * log1p_minus(-d / (1 - b)) : 0;
    return linear + up + down;
}

double xi(double theta, double p, uint64_t n_i, uint64_t n_0) {
    if (!(p >= 0 && p <= 1) || !(theta >= 0)) {
        fail(ErrorCode::invalid_argument, "xi requires p in [0,1] and theta >= 0");
    }
    if (n_i == 0 || n_0 == 0) {
        fail(ErrorCode::invalid_argument, "xi requires Ni, N0 >= 1");
    }
    double q = (1 + p) / 2;
    if (q + theta > 1) {
        std::ostringstream ss;
        ss.precision(17);
        ss << "theta = " << theta << " infeasible: (1+p)/2 + theta > 1 (ceiling " << 1 - q << ")";
        fail(ErrorCode::infeasible, ss.str());
    }
    if (theta == 0) {
        return 0;
    }
    double total = static_cast<double>(n_i) + static_cast<double>(n_0);
    double w_test = static_cast<double>(n_i) / total;
    double w_gen = static_cast<double>(n_0) / total;
    // Jensen gap of H at the points q (weight w_test) and q + theta (weight
    // w_gen) equals the weighted divergences to their mean.
    double gap = w_test * bernoulli_kl(q, -w_gen * theta) + w_gen * bernoulli_kl(q + theta, w_test * theta);
    return gap / std::numbers::ln2;
}

double effective_probability(double p, uint64_t n_i) {
    if (p == 1) {
        return 1 - 1 / (2 * static_cast<double>(n_i));
    }
    return p;
}

double log2_deviation_bound(double theta, double p, uint64_t n_i, uint64_t n_0) {
    double ni = static_cast<double>(n_i);
    double n0 = static_cast<double>(n_0);
    double log2_prefactor =
        2 + 0.5 * (std::log2(ni + n0) - std::log2(ni) - std::log2(n0) - std::log2(1 + p) - std::log2(1 - p));
    return log2_prefactor - (ni + n0) * xi(theta, p, n_i, n_0);
}

double solve_theta(double epsilon, double p, uint64_t n_i, uint64_t n_0) {
    if (!(epsilon > 0 && epsilon < 1)) {
        fail(ErrorCode::invalid_argument, "epsilon must lie in (0,1)");
    }
    if (!(p >= 0 && p <= 1)) {
        fail(ErrorCode::invalid_argument, "p must lie in [0,1]");
    }
    if (n_i == 0 || n_0 == 0) {
        fail(ErrorCode::invalid_argument, "solve_theta requires Ni, N0 >= 1");
    }
    p = effective_probability(p, n_i);
    const double target = std::log2(epsilon);
    auto excess = [&](double t) { return log2_deviation_bound(t, p, n_i, n_0) - target; };
    if (excess(0) <= 0) {
        return 0;
    }
    double ceiling = 1 - (1 + p) / 2 - 1e-15;
    if (ceiling <= 0 || excess(ceiling) > 0) {
        std::ostringstream ss;
        ss.precision(17);
        ss << "no feasible theta for epsilon = " << epsilon << ", p = " << p << ", Ni = " << n_i
           << ", N0 = " << n_0 << ": bound still exceeds epsilon at the ceiling theta = "
           << std::max(ceiling, 0.0);
        fail(ErrorCode::infeasible, ss.str());
    }
    double lo = 0;
    double hi = ceiling;
    for (int iter = 0; iter < 2000; iter++) {
        double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        if (excess(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

FluctuationSet fluctuations(const TestTally &tally, double epsilon) {
    FluctuationSet f;
    f.epsilon = epsilon;
    for (size_t i = 0; i < 4; i++) {
        try {
            f.theta[i] = solve_theta(epsilon, tally.p[i], tally.counts[i].trials, tally.generation_turns);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::infeasible) throw;
            f.theta[i] = 1;
            f.vacuous[i] = true;
        }
    }
    return f;
}

}  // namespace mdiqrng
