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

#ifndef MDIQRNG_CERTIFIER_HPP
#define MDIQRNG_CERTIFIER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdiqrng/finite_size.hpp"
#include "mdiqrng/protocol.hpp"
#include "mdiqrng/tomography.hpp"

namespace mdiqrng {

enum class EntropyFunctional { MinEntropy, ShannonBinary };

std::string_view functional_name(EntropyFunctional f);
EntropyFunctional parse_functional(std::string_view name);

/// MinEntropy: -log2 max(x, 1-x). ShannonBinary: binary_entropy(x).
double apply_functional(EntropyFunctional f, double x);

/// 2 a0 scale f((1 + sqrt(1 - ny^2 - nz^2)) / 2); ny^2 + nz^2 is clamped to 1.
double randomness_objective(EntropyFunctional f, double a0, double ny, double nz, double scale = 1);

struct Witness {
    double a0 = 0;
    double nx = 0;
    double ny = 0;
    double nz = 0;
    double mu = 0;
};

struct QubitBound {
    double R = 0;
    Witness witness;
};

/// Qubit-source bound with worst-case tomography parameters: a0 takes its lower
/// bound and ny, nz take the endpoint of their fluctuation interval closest to
/// zero (the signed lower bound whenever the interval is nonnegative).
/// Throws Error(infeasible) when ny^2 + nz^2 > 1.
QubitBound qubit_bound(const TestTally &tally, const FluctuationSet &theta, EntropyFunctional f);

struct Interval {
    double lo = 0;
    double hi = 0;
};

/// Feasible set for the weak-coherent-source minimization:
///   lower[i] <= a0 (1 + s_i . n) <= upper[i],  s = (+z, -z, +x, +y),
/// where lower[i] = (p_i - theta_i - P_multi)/g and upper[i] = (p_i + theta_i)/g,
/// g = (1+mu) e^-mu and P_multi = 1 - g, together with 0 <= a0 <= 1, |n| <= 1
/// and a0 |n| <= 1 - a0.
struct CoherentRegion {
    double mu = 0;
    double single_photon = 1;  // g
    double multi_photon = 0;   // P_multi
    std::array<double, 4> lower{};
    std::array<double, 4> upper{};
    Interval a0_range;
    bool empty = false;
    std::string diagnostics;

    /// Interval of n along probe axis i (i = 0 gives nz via both Z probes,
    /// 2 gives nx, 3 gives ny) at fixed a0 > 0; nullopt when empty.
    std::optional<Interval> nz_range(double a0) const;
    std::optional<Interval> nx_range(double a0) const;
    std::optional<Interval> ny_range(double a0) const;
    /// Largest admissible |n| at this a0.
    static double direction_limit(double a0);

    bool contains(const Witness &w, double tolerance) const;
};

/// Absolute slack on the linear constraints.
constexpr double kFeasibilityTolerance = 1e-12;

CoherentRegion feasible_region(const TestTally &tally, const FluctuationSet &theta, double mu);

struct BoundResult {
    double R = 0;
    Witness witness;
    uint64_t evaluations = 0;
};

/// Minimizes the objective over the region. At fixed a0 the objective increases
/// with ny^2 + nz^2, so the inner minimum is the point of the (nz, ny) box
/// nearest zero and is exact; a0 is searched on a 4097-point grid plus every
/// breakpoint of that inner solution, with bisection onto feasibility edges and
/// golden-section refinement of each sampled local minimum. Throws
/// Error(infeasible) on an empty region.
BoundResult coherent_bound(const TestTally &tally, const FluctuationSet &theta, double mu,
                           EntropyFunctional f);
BoundResult coherent_bound(const CoherentRegion &region, EntropyFunctional f);

/// Documented agreement between coherent_bound and brute_force_bound at density 1024.
constexpr double kOracleRelativeTolerance = 1e-5;
constexpr double kOracleAbsoluteTolerance = 1e-9;

/// Exhaustive oracle over a grid_density^3 lattice in the linear coordinates
/// u = a0(1+nz), v = a0(1-nz), w = a0(1+ny), spanning the boxes that the
/// probe constraints impose on them. For each (u, v) every w is checked; since
/// the objective increases with ny^2 at fixed a0 and nz, the transcendental
/// objective is only evaluated at the smallest feasible |ny|.
BoundResult brute_force_bound(const TestTally &tally, const FluctuationSet &theta, double mu,
                              EntropyFunctional f, unsigned grid_density);
BoundResult brute_force_bound(const CoherentRegion &region, EntropyFunctional f, unsigned grid_density);

bool oracle_agrees(double optimizer, double oracle);

/// P_multi = 1 - (1+mu) e^-mu, computed without cancellation.
double multi_photon_probability(double mu);

struct MuOptimum {
    double mu = 0;
    double R = 0;
    bool used_grid_fallback = false;
    uint64_t evaluations = 0;
};

using TallyModel = std::function<TestTally(double mu)>;

/// Certified coherent bound at one intensity; infeasible regions count as 0.
double coherent_rate_at(const TallyModel &model, double epsilon, EntropyFunctional f, double mu);

/// Golden-section maximization of the coherent bound over mu in [mu_lo, mu_hi].
/// Falls back to a 101-point scan when the result does not beat the bracket ends.
MuOptimum optimize_mu(const TallyModel &model, double epsilon, EntropyFunctional f, double mu_lo,
                      double mu_hi);

/// Expected tally of the honest detector at intensity mu with fixed trial counts.
TestTally honest_expected_tally(SourceModel model, double mu, const std::array<uint64_t, 4> &trials,
                                uint64_t generation_turns);

struct Throughput {
    double rate_bps = 0;
    uint64_t extractable_bits = 0;
    /// extractable / protocol seed bits (positions + states).
    double gain_ratio = 0;
    /// extractable / all seed bits including the extractor seed.
    double gain_ratio_with_extractor_seed = 0;
};

Throughput throughput_report(double R, double clock_hz, const SeedAccounting &seed, double raw_bits);

struct CertifyOptions {
    double epsilon_theta = 1e-10;
    double mu = 0.06;
    EntropyFunctional functional = EntropyFunctional::ShannonBinary;
    double clock_hz = 25e6;
    /// 0 disables the oracle cross-check.
    unsigned oracle_density = 0;
};

struct CertReport {
    double R = 0;
    EntropyFunctional functional = EntropyFunctional::ShannonBinary;
    Witness witness;
    FluctuationSet theta;
    /// Composition over four states and both deviation directions.
    double epsilon_total = 0;
    PovmEstimate estimate;
    /// The same objective at the exact tomography point with theta = 0.
    double upper_envelope = 0;
    double qubit_R = 0;
    double rate_bps = 0;
    std::optional<double> oracle_R;
    std::optional<bool> oracle_agrees;
    std::vector<std::string> notes;
};

CertReport certify(const TestTally &tally, const CertifyOptions &options);

}  // namespace mdiqrng

#endif
