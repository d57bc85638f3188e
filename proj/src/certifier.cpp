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

#include "mdiqrng/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

std::string_view functional_name(EntropyFunctional f) {
    return f == EntropyFunctional::MinEntropy ? "min-entropy" : "shannon";
}

EntropyFunctional parse_functional(std::string_view name) {
    if (name == "min-entropy" || name == "min_entropy" || name == "minentropy") {
        return EntropyFunctional::MinEntropy;
    }
    if (name == "shannon" || name == "shannon-binary" || name == "shannon_binary") {
        return EntropyFunctional::ShannonBinary;
    }
    fail(ErrorCode::invalid_argument, "unknown entropy functional '" + std::string(name) + "'");
}

double apply_functional(EntropyFunctional f, double x) {
    if (f == EntropyFunctional::MinEntropy) {
        if (!(x >= 0 && x <= 1)) {
            fail(ErrorCode::invalid_argument, "min-entropy argument outside [0,1]");
        }
        return -std::log2(std::max(x, 1 - x));
    }
    return binary_entropy(x);
}

double randomness_objective(EntropyFunctional f, double a0, double ny, double nz, double scale) {
    double s = std::min(1.0, ny * ny + nz * nz);
    // 1 - (1 + sqrt(1 - s)) / 2 without cancellation.
    double tail = s / (2 * (1 + std::sqrt(1 - s)));
    double h = f == EntropyFunctional::MinEntropy ? -std::log1p(-tail) / std::numbers::ln2 : binary_entropy(tail);
    return 2 * a0 * scale * h;
}

namespace {

double closest_to_zero(const Interval &r) {
    if (r.lo > 0) return r.lo;
    if (r.hi < 0) return r.hi;
    return 0;
}

std::optional<Interval> make_interval(double lo, double hi, double slack) {
    if (lo > hi + slack) {
        return std::nullopt;
    }
    if (lo > hi) {
        double mid = (lo + hi) / 2;
        return Interval{mid, mid};
    }
    return Interval{lo, hi};
}

}  // namespace

QubitBound qubit_bound(const TestTally &tally, const FluctuationSet &theta, EntropyFunctional f) {
    const auto &p = tally.p;
    const auto &t = theta.theta;
    double sum_hi = p[0] + p[1] + t[0] + t[1];
    double sum_lo = p[0] + p[1] - t[0] - t[1];
    QubitBound out;
    out.witness.a0 = sum_lo / 2;
    if (sum_lo <= 0) {
        return out;
    }
    Interval nz{2 * (p[0] - t[0]) / sum_hi - 1, 2 * (p[0] + t[0]) / sum_lo - 1};
    Interval ny{2 * (p[3] - t[3]) / sum_hi - 1, 2 * (p[3] + t[3]) / sum_lo - 1};
    out.witness.nz = closest_to_zero(nz);
    out.witness.ny = closest_to_zero(ny);
    out.witness.nx = 2 * p[2] / (p[0] + p[1]) - 1;
    double s = out.witness.ny * out.witness.ny + out.witness.nz * out.witness.nz;
    if (s > 1 + kPovmTolerance) {
        std::ostringstream ss;
        ss << "worst-case substitution gives ny^2 + nz^2 = " << s << " > 1";
        fail(ErrorCode::infeasible, ss.str());
    }
    out.R = std::max(0.0, randomness_objective(f, out.witness.a0, out.witness.ny, out.witness.nz));
    return out;
}

double multi_photon_probability(double mu) {
    if (!(mu >= 0) || !std::isfinite(mu)) {
        fail(ErrorCode::invalid_argument, "mu must be finite and >= 0");
    }
    return std::max(0.0, -std::expm1(-mu) - mu * std::exp(-mu));
}

double CoherentRegion::direction_limit(double a0) {
    return a0 <= 0.5 ? 1.0 : (1 - a0) / a0;
}

std::optional<Interval> CoherentRegion::nz_range(double a0) const {
    double lo = std::max({lower[0] / a0 - 1, 1 - upper[1] / a0, -1.0});
    double hi = std::min({upper[0] / a0 - 1, 1 - lower[1] / a0, 1.0});
    return make_interval(lo, hi, 2 * kFeasibilityTolerance / a0);
}

std::optional<Interval> CoherentRegion::nx_range(double a0) const {
    return make_interval(std::max(lower[2] / a0 - 1, -1.0), std::min(upper[2] / a0 - 1, 1.0),
                         2 * kFeasibilityTolerance / a0);
}

std::optional<Interval> CoherentRegion::ny_range(double a0) const {
    return make_interval(std::max(lower[3] / a0 - 1, -1.0), std::min(upper[3] / a0 - 1, 1.0),
                         2 * kFeasibilityTolerance / a0);
}

bool CoherentRegion::contains(const Witness &w, double tolerance) const {
    if (w.a0 < -tolerance || w.a0 > 1 + tolerance) return false;
    const std::array<double, 4> along{w.nz, -w.nz, w.nx, w.ny};
    for (size_t i = 0; i < 4; i++) {
        double u = w.a0 * (1 + along[i]);
        if (u < lower[i] - tolerance || u > upper[i] + tolerance) return false;
    }
    double n = std::sqrt(w.nx * w.nx + w.ny * w.ny + w.nz * w.nz);
    return n <= 1 + tolerance && w.a0 * n <= 1 - w.a0 + tolerance;
}

namespace {

// Feasible (nz, ny) admissible at this a0 once the best nx is chosen.
struct Slice {
    Interval nz;
    Interval ny;
    double nx;
    double radius2;
};

std::optional<Slice> slice_at(const CoherentRegion &region, double a0) {
    if (a0 <= 0) return std::nullopt;
    auto nz = region.nz_range(a0);
    auto ny = region.ny_range(a0);
    auto nx = region.nx_range(a0);
    if (!nz || !ny || !nx) return std::nullopt;
    double rho = CoherentRegion::direction_limit(a0) + kFeasibilityTolerance / a0;
    Slice s{*nz, *ny, closest_to_zero(*nx), 0};
    s.radius2 = rho * rho - s.nx * s.nx;
    double z = closest_to_zero(s.nz);
    double y = closest_to_zero(s.ny);
    if (z * z + y * y > s.radius2) return std::nullopt;
    return s;
}

bool origin_feasible(const CoherentRegion &region) {
    // a0 = 0 means F0 = 0: every probe constraint must admit zero.
    for (size_t i = 0; i < 4; i++) {
        if (region.lower[i] > kFeasibilityTolerance || region.upper[i] < -kFeasibilityTolerance) return false;
    }
    return true;
}

double lerp(double lo, double hi, unsigned k, unsigned count) {
    if (count <= 1 || hi <= lo) return lo;
    if (k + 1 == count) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
}

}  // namespace

CoherentRegion feasible_region(const TestTally &tally, const FluctuationSet &theta, double mu) {
    CoherentRegion r;
    r.mu = mu;
    r.multi_photon = multi_photon_probability(mu);
    r.single_photon = (1 + mu) * std::exp(-mu);
    for (size_t i = 0; i < 4; i++) {
        if (!(theta.theta[i] >= 0)) {
            fail(ErrorCode::invalid_argument, "theta must be >= 0");
        }
        r.lower[i] = (tally.p[i] - theta.theta[i] - r.multi_photon) / r.single_photon;
        r.upper[i] = (tally.p[i] + theta.theta[i]) / r.single_photon;
    }
    double min_upper = *std::min_element(r.upper.begin(), r.upper.end());
    r.a0_range.lo = std::max({0.0, (r.lower[0] + r.lower[1]) / 2, r.lower[2] / 2, r.lower[3] / 2});
    r.a0_range.hi = std::min({1.0, (r.upper[0] + r.upper[1]) / 2, (1 + min_upper) / 2});

    std::ostringstream diag;
    diag.precision(12);
    if (r.a0_range.lo > r.a0_range.hi + kFeasibilityTolerance) {
        r.empty = true;
        diag << "a0 interval empty: [" << r.a0_range.lo << ", " << r.a0_range.hi << "]";
    } else {
        r.a0_range.hi = std::max(r.a0_range.hi, r.a0_range.lo);
        bool any = origin_feasible(r) && r.a0_range.lo <= 0;
        const unsigned scan = 4097;
        for (unsigned k = 0; k < scan && !any; k++) {
            any = slice_at(r, lerp(r.a0_range.lo, r.a0_range.hi, k, scan)).has_value();
        }
        if (!any) {
            r.empty = true;
            diag << "no a0 in [" << r.a0_range.lo << ", " << r.a0_range.hi
                 << "] admits a unit-bounded direction meeting all four probe constraints";
        }
    }
    r.diagnostics = diag.str();
    return r;
}

BoundResult coherent_bound(const TestTally &tally, const FluctuationSet &theta, double mu,
                           EntropyFunctional f) {
    return coherent_bound(feasible_region(tally, theta, mu), f);
}

BoundResult coherent_bound(const CoherentRegion &region, EntropyFunctional f) {
    if (region.empty) {
        fail(ErrorCode::infeasible, "coherent-source feasible region is empty: " + region.diagnostics);
    }
    BoundResult best;
    best.R = std::numeric_limits<double>::infinity();
    best.witness.mu = region.mu;
    if (region.a0_range.lo <= 0 && origin_feasible(region)) {
        best.R = 0;
        best.evaluations = 1;
        return best;
    }

    // At fixed a0 the objective grows with ny^2 + nz^2, so the slice minimum sits
    // at the box point nearest the origin; only a0 needs searching.
    auto value_at = [&](double a0) -> std::optional<double> {
        auto sl = slice_at(region, a0);
        if (!sl) return std::nullopt;
        double nz = closest_to_zero(sl->nz);
        double ny = closest_to_zero(sl->ny);
        double v = randomness_objective(f, a0, ny, nz, region.single_photon);
        best.evaluations++;
        if (v < best.R) {
            best.R = v;
            best.witness = {a0, sl->nx, ny, nz, region.mu};
        }
        return v;
    };

    const double lo = region.a0_range.lo, hi = region.a0_range.hi;
    std::vector<double> grid;
    const unsigned samples = 4097;
    for (unsigned k = 0; k < samples; k++) grid.push_back(lerp(lo, hi, k, samples));
    // Points where a nearest-to-zero endpoint switches or the direction limit kinks.
    for (size_t i = 0; i < 4; i++) {
        for (double b : {region.lower[i], region.upper[i]}) {
            if (b > lo && b < hi) grid.push_back(b);
        }
    }
    if (lo < 0.5 && hi > 0.5) grid.push_back(0.5);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<std::optional<double>> values(grid.size());
    for (size_t k = 0; k < grid.size(); k++) values[k] = value_at(grid[k]);

    for (size_t k = 0; k + 1 < grid.size(); k++) {
        // Feasibility edges: bisect to the boundary between a feasible and an
        // infeasible neighbour.
        if (values[k].has_value() != values[k + 1].has_value()) {
            double in = values[k] ? grid[k] : grid[k + 1];
            double out = values[k] ? grid[k + 1] : grid[k];
            for (int it = 0; it < 100 && in != out; it++) {
                double mid = (in + out) / 2;
                if (mid == in || mid == out) break;
                (slice_at(region, mid) ? in : out) = mid;
            }
            value_at(in);
        }
    }
    // Golden-section refinement around each local minimum of the sampled curve.
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    for (size_t k = 0; k < grid.size(); k++) {
        if (!values[k]) continue;
        bool left_ok = k == 0 || !values[k - 1] || *values[k - 1] >= *values[k];
        bool right_ok = k + 1 == grid.size() || !values[k + 1] || *values[k + 1] >= *values[k];
        if (!left_ok || !right_ok) continue;
        double a = k > 0 && values[k - 1] ? grid[k - 1] : grid[k];
        double b = k + 1 < grid.size() && values[k + 1] ? grid[k + 1] : grid[k];
        if (b <= a) continue;
        auto eval = [&](double x) {
            auto v = value_at(x);
            return v ? *v : std::numeric_limits<double>::infinity();
        };
        double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        double fc = eval(c), fd = eval(d);
        for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, b); it++) {
            if (fc <= fd) {
                b = d, d = c, fd = fc;
                c = b - inv_phi * (b - a);
                fc = eval(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + inv_phi * (b - a);
                fd = eval(d);
            }
        }
    }
    if (!std::isfinite(best.R)) {
        fail(ErrorCode::infeasible, "coherent-source minimization found no feasible a0");
    }
    best.R = std::max(0.0, best.R);
    return best;
}

BoundResult brute_force_bound(const TestTally &tally, const FluctuationSet &theta, double mu,
                              EntropyFunctional f, unsigned grid_density) {
    return brute_force_bound(feasible_region(tally, theta, mu), f, grid_density);
}

BoundResult brute_force_bound(const CoherentRegion &region, EntropyFunctional f, unsigned grid_density) {
    if (grid_density < 10) {
        fail(ErrorCode::invalid_argument, "grid density must be at least 10 per dimension");
    }
    const double tol = kFeasibilityTolerance;
    auto span = [&](size_t i) { return Interval{std::max(region.lower[i], 0.0), std::min(region.upper[i], 2.0)}; };
    const Interval us = span(0), vs = span(1), ws = span(3);
    BoundResult best;
    best.R = std::numeric_limits<double>::infinity();
    best.witness.mu = region.mu;
    if (us.lo > us.hi + tol || vs.lo > vs.hi + tol || ws.lo > ws.hi + tol) {
        fail(ErrorCode::infeasible, "oracle grid admits no point: a probe constraint box is empty");
    }
    const unsigned n = grid_density;
    std::vector<double> w(n);
    for (unsigned k = 0; k < n; k++) w[k] = lerp(ws.lo, ws.hi, k, n);

    for (unsigned iu = 0; iu < n; iu++) {
        double u = lerp(us.lo, us.hi, iu, n);
        for (unsigned iv = 0; iv < n; iv++) {
            double v = lerp(vs.lo, vs.hi, iv, n);
            double a0 = (u + v) / 2;
            if (a0 > 1 + tol) continue;
            if (a0 <= 0) {
                if (region.lower[2] <= tol && region.lower[3] <= tol && ws.lo <= tol) {
                    best.evaluations++;
                    if (0 < best.R) {
                        best.R = 0;
                        best.witness = {0, 0, 0, 0, region.mu};
                    }
                }
                continue;
            }
            double mz = (u - v) / 2;
            double lim = std::max(0.0, std::min(a0, 1 - a0)) + tol;
            double room = lim * lim - mz * mz;
            if (room < 0) continue;
            double mx_lo = region.lower[2] - a0 - tol;
            double mx_hi = region.upper[2] - a0 + tol;
            double mx = mx_lo > 0 ? mx_lo : (mx_hi < 0 ? mx_hi : 0);
            room -= mx * mx;
            if (room < 0) continue;
            double min_my2 = std::numeric_limits<double>::infinity();
            for (unsigned k = 0; k < n; k++) {
                double my = w[k] - a0;
                double my2 = my * my;
                if (my2 <= room && my2 < min_my2) min_my2 = my2;
            }
            if (!std::isfinite(min_my2)) continue;
            best.evaluations++;
            double ny = std::sqrt(min_my2) / a0;
            double nz = mz / a0;
            double value = randomness_objective(f, std::min(a0, 1.0), ny, nz, region.single_photon);
            if (value < best.R) {
                best.R = value;
                best.witness = {a0, mx / a0, ny, nz, region.mu};
            }
        }
    }
    if (!std::isfinite(best.R)) {
        fail(ErrorCode::infeasible, "oracle grid admits no feasible point");
    }
    return best;
}

bool oracle_agrees(double optimizer, double oracle) {
    double scale = std::max(std::abs(optimizer), std::abs(oracle));
    return std::abs(optimizer - oracle) <= kOracleRelativeTolerance * scale + kOracleAbsoluteTolerance;
}

TestTally honest_expected_tally(SourceModel model, double mu, const std::array<uint64_t, 4> &trials,
                                uint64_t generation_turns) {
    model.mu = mu;
    std::array<double, 4> p{};
    for (auto s : kAllTestStates) {
        p[state_index(s)] = 1 - honest_device(model, s).one();
    }
    return TestTally::from_probabilities(p, trials, generation_turns);
}

double coherent_rate_at(const TallyModel &model, double epsilon, EntropyFunctional f, double mu) {
    try {
        TestTally t = model(mu);
        return coherent_bound(t, fluctuations(t, epsilon), mu, f).R;
    } catch (const Error &e) {
        if (e.code() == ErrorCode::infeasible) return 0;
        throw;
    }
}

MuOptimum optimize_mu(const TallyModel &model, double epsilon, EntropyFunctional f, double mu_lo,
                      double mu_hi) {
    if (!(mu_lo > 0 && mu_lo < mu_hi && mu_hi <= 1)) {
        fail(ErrorCode::invalid_argument, "mu range must satisfy 0 < mu_lo < mu_hi <= 1");
    }
    MuOptimum out;
    auto rate = [&](double mu) {
        out.evaluations++;
        return coherent_rate_at(model, epsilon, f, mu);
    };
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double a = mu_lo, b = mu_hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = rate(c), fd = rate(d);
    while (b - a > 1e-6 * (mu_hi - mu_lo)) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rate(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rate(d);
        }
    }
    out.mu = fc >= fd ? c : d;
    out.R = std::max(fc, fd);
    double f_lo = rate(mu_lo), f_hi = rate(mu_hi);
    if (f_lo > out.R || f_hi > out.R || out.R <= 0) {
        out.used_grid_fallback = true;
        const unsigned scan = 101;
        for (unsigned k = 0; k < scan; k++) {
            double mu = lerp(mu_lo, mu_hi, k, scan);
            double r = rate(mu);
            if (r > out.R || (k == 0 && out.R <= 0)) {
                out.R = r;
                out.mu = mu;
            }
        }
    }
    return out;
}

Throughput throughput_report(double R, double clock_hz, const SeedAccounting &seed, double raw_bits) {
    if (!(R >= 0)) {
        fail(ErrorCode::invalid_argument, "R must be >= 0");
    }
    Throughput t;
    t.rate_bps = R * clock_hz;
    t.extractable_bits = static_cast<uint64_t>(std::floor(raw_bits * R));
    auto ratio = [&](uint64_t denom) {
        return denom > 0 ? static_cast<double>(t.extractable_bits) / static_cast<double>(denom) : 0.0;
    };
    t.gain_ratio = ratio(seed.protocol_bits());
    t.gain_ratio_with_extractor_seed = ratio(seed.total_consumed());
    return t;
}

CertReport certify(const TestTally &tally, const CertifyOptions &options) {
    CertReport rep;
    rep.functional = options.functional;
    rep.theta = fluctuations(tally, options.epsilon_theta);
    rep.epsilon_total = 8 * options.epsilon_theta;
    try {
        rep.estimate = reconstruct(tally.p);
    } catch (const Error &e) {
        // Never a '0' on |0> or |1>: a0 = 0 reads as a device that always answers '1'.
        if (e.code() != ErrorCode::degenerate) throw;
        rep.estimate = PovmEstimate{};
        rep.estimate.violations.push_back(e.what());
    }

    CoherentRegion region = feasible_region(tally, rep.theta, options.mu);
    BoundResult bound = coherent_bound(region, options.functional);
    rep.R = bound.R;
    rep.witness = bound.witness;
    rep.rate_bps = rep.R * options.clock_hz;
    rep.upper_envelope = randomness_objective(options.functional, rep.estimate.a0, rep.estimate.ny,
                                              rep.estimate.nz, region.single_photon);
    try {
        rep.qubit_R = qubit_bound(tally, rep.theta, options.functional).R;
    } catch (const Error &e) {
        if (e.code() != ErrorCode::infeasible) throw;
        rep.qubit_R = 0;
        rep.notes.push_back(std::string("qubit-source bound infeasible: ") + e.what());
    }
    if (options.oracle_density > 0) {
        BoundResult oracle = brute_force_bound(region, options.functional, options.oracle_density);
        rep.oracle_R = oracle.R;
        rep.oracle_agrees = oracle_agrees(rep.R, oracle.R);
    }
    rep.notes.push_back("multi-photon slack P_multi = 1 - exp(-mu) - mu exp(-mu); the 1 - exp(+mu) form is negative for mu > 0 and is not used");
    rep.notes.push_back("each theta_i is applied in both directions; epsilon_total = 8 epsilon_theta");
    rep.notes.push_back(std::string("entropy functional: ") + std::string(functional_name(options.functional)));
    for (auto s : kAllTestStates) {
        if (rep.theta.vacuous[state_index(s)]) {
            rep.notes.push_back("theta for " + std::string(state_name(s)) +
                                " is vacuous: no deviation meets epsilon_theta below the entropy ceiling");
        }
    }
    if (!rep.estimate.physical) {
        rep.notes.push_back("point estimate of the POVM is unphysical: " + rep.estimate.violations.front());
    }
    return rep;
}

}  // namespace mdiqrng
