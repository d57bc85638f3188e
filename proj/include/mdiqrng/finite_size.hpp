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

#ifndef MDIQRNG_FINITE_SIZE_HPP
#define MDIQRNG_FINITE_SIZE_HPP

#include <array>
#include <cstdint>

#include "mdiqrng/tomography.hpp"

namespace mdiqrng {

/// Binary Shannon entropy in bits, H(0) = H(1) = 0.
double binary_entropy(double p);

/// Kullback-Leibler divergence D(a || a - d) between Bernoulli laws, in nats,
/// evaluated without the first-order cancellation of the textbook form.
double bernoulli_kl(double a, double d);

/// Concavity gap
///   H(q + N0 t/(N0+Ni)) - [Ni H(q) + N0 H(q + t)]/(N0+Ni),  q = (1+p)/2,
/// in bits. Throws Error(infeasible) when q + t > 1.
double xi(double theta, double p, uint64_t n_i, uint64_t n_0);

/// log2 of 4 sqrt(Ni+N0) / sqrt(Ni N0 (1+p)(1-p)) * 2^{-(Ni+N0) xi(theta)}.
double log2_deviation_bound(double theta, double p, uint64_t n_i, uint64_t n_0);

/// Probability plugged into the deviation bound: p itself, except that p = 1
/// is floored at 1 - 1/(2 Ni) to keep the prefactor finite.
double effective_probability(double p, uint64_t n_i);

/// Smallest theta >= 0 whose deviation bound equals epsilon (bisection on the
/// monotone bound). Zero when the bound at theta = 0 is already <= epsilon.
/// Throws Error(infeasible) when even the entropy-argument ceiling fails.
double solve_theta(double epsilon, double p, uint64_t n_i, uint64_t n_0);

/// Deviations for the four probe states at failure probability epsilon each.
struct FluctuationSet {
    std::array<double, 4> theta{};
    double epsilon = 0;
    /// Set where no theta meets epsilon below the ceiling; theta is then 1,
    /// which admits every probability.
    std::array<bool, 4> vacuous{};

    static FluctuationSet zero() {
        return {};
    }
};

/// A state whose equation has no solution gets the vacuous theta = 1 instead
/// of an error, so the certificate degrades to R = 0 rather than aborting.
FluctuationSet fluctuations(const TestTally &tally, double epsilon);

}  // namespace mdiqrng

#endif
