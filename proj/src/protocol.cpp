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

#include "mdiqrng/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <unordered_set>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

SeedAccounting &SeedAccounting::operator+=(const SeedAccounting &other) {
    bits_for_positions += other.bits_for_positions;
    bits_for_states += other.bits_for_states;
    bits_for_extractor_seed += other.bits_for_extractor_seed;
    return *this;
}

Schedule::Schedule(uint64_t total_trials, std::vector<TestSlot> tests)
    : total_trials_(total_trials), tests_(std::move(tests)) {
    std::sort(tests_.begin(), tests_.end(),
              [](const TestSlot &a, const TestSlot &b) { return a.position < b.position; });
    for (size_t k = 0; k < tests_.size(); k++) {
        if (tests_[k].position >= total_trials_) {
            fail(ErrorCode::invalid_argument, "test position " + std::to_string(tests_[k].position) +
                                                  " outside schedule of " +
                                                  std::to_string(total_trials_) + " trials");
        }
        if (k > 0 && tests_[k].position == tests_[k - 1].position) {
            fail(ErrorCode::invalid_argument,
                 "duplicate test position " + std::to_string(tests_[k].position));
        }
    }
}

std::optional<TestStateId> Schedule::state_at(uint64_t index) const {
    auto it = std::lower_bound(tests_.begin(), tests_.end(), index,
                               [](const TestSlot &s, uint64_t i) { return s.position < i; });
    if (it != tests_.end() && it->position == index) {
        return it->state;
    }
    return std::nullopt;
}

ScheduleBuild build_schedule(SeedSource &seed, uint64_t total_trials, uint64_t test_trials,
                             unsigned position_bits) {
    if (position_bits > 63) {
        fail(ErrorCode::invalid_argument, "position_bits must be <= 63");
    }
    if (total_trials > (uint64_t{1} << position_bits)) {
        fail(ErrorCode::invalid_argument, "total trials exceed 2^position_bits");
    }
    if (test_trials > total_trials) {
        fail(ErrorCode::invalid_argument, "more test trials than total trials");
    }
    ScheduleBuild out;
    std::vector<TestSlot> slots;
    slots.reserve(test_trials);
    std::unordered_set<uint64_t> taken;
    taken.reserve(test_trials * 2);
    auto read = [&](unsigned width, uint64_t accepted, bool for_position) {
        auto left = seed.remaining();
        if (left && *left < width) {
            uint64_t after = test_trials - accepted - 1;
            uint64_t shortfall = (width - *left) + after * (position_bits + 2) + (for_position ? 2 : 0);
            fail(ErrorCode::seed_exhausted,
                 "seed exhausted after " + std::to_string(accepted) + " of " +
                     std::to_string(test_trials) + " test positions; at least " +
                     std::to_string(shortfall) + " more seed bits required");
        }
        return seed.read(width);
    };
    for (uint64_t k = 0; k < test_trials; k++) {
        uint64_t pos;
        while (true) {
            pos = read(position_bits, k, true);
            out.accounting.bits_for_positions += position_bits;
            if (pos < total_trials && taken.insert(pos).second) {
                break;
            }
            out.rejected_draws++;
        }
        auto state = static_cast<TestStateId>(read(2, k, false));
        out.accounting.bits_for_states += 2;
        slots.push_back({pos, state});
    }
    out.schedule = Schedule(total_trials, std::move(slots));
    return out;
}

void SourceModel::validate() const {
    auto prob = [](double v, const char *name) {
        if (!(v >= 0 && v <= 1)) {
            fail(ErrorCode::invalid_argument, std::string(name) + " must lie in [0,1]");
        }
    };
    if (!(mu >= 0) || !std::isfinite(mu)) {
        fail(ErrorCode::invalid_argument, "mu must be finite and >= 0");
    }
    prob(eta, "eta");
    prob(dark, "dark");
    prob(error, "error");
}

namespace {

// P(at least one count in a time bin receiving fraction `weight` of the pulse).
double bin_click(const SourceModel &m, double weight) {
    double x = m.mu * m.eta * weight;
    return -std::expm1(-x) + m.dark * std::exp(-x);
}

}  // namespace

OutcomeDistribution honest_device(const SourceModel &model, double axis_component) {
    model.validate();
    double r = std::clamp(axis_component, -1.0, 1.0);
    double c1 = bin_click(model, (1 - r) / 2);
    double c0 = bin_click(model, (1 + r) / 2);
    double only1 = c1 * (1 - c0);
    double only0 = c0 * (1 - c1);
    OutcomeDistribution d;
    d.no_click = (1 - c0) * (1 - c1);
    d.double_click = c0 * c1;
    d.click1 = (1 - model.error) * only1 + model.error * only0;
    d.click0 = (1 - model.error) * only0 + model.error * only1;
    return d;
}

OutcomeDistribution honest_device(const SourceModel &model, TestStateId state) {
    return honest_device(model, bloch_of_state(state).z);
}

OutcomeDistribution honest_generation(const SourceModel &model) {
    return honest_device(model, bloch_of_state(TestStateId::XPlus).z);
}

OutcomeDistribution adversarial_device(const Povm &povm, const BlochVector &state) {
    double p0 = outcome_zero_prob(povm, state);
    OutcomeDistribution d;
    d.click0 = p0;
    d.click1 = 1 - p0;
    return d;
}

namespace {

struct Sampler {
    // Cumulative thresholds for NoClick, Click0, Click1; remainder is DoubleClick.
    std::array<double, 3> cut{};

    explicit Sampler(const OutcomeDistribution &d)
        : cut{d.no_click, d.no_click + d.click0, d.no_click + d.click0 + d.click1} {
    }
    RawOutcome draw(double u) const {
        if (u < cut[0]) return RawOutcome::NoClick;
        if (u < cut[1]) return RawOutcome::Click0;
        if (u < cut[2]) return RawOutcome::Click1;
        return RawOutcome::DoubleClick;
    }
};

void simulate_chunk(const Schedule &schedule, const Device &device, uint64_t rng_seed,
                    uint64_t chunk, uint64_t begin, uint64_t end, std::vector<TrialRecord> &out) {
    std::mt19937_64 engine(mix64(rng_seed ^ mix64(chunk)));
    out.clear();
    out.reserve(end - begin);
    const auto &tests = schedule.tests();
    auto it = std::lower_bound(tests.begin(), tests.end(), begin,
                               [](const TestSlot &s, uint64_t i) { return s.position < i; });

    const auto *honest = std::get_if<HonestDevice>(&device);
    std::array<std::optional<Sampler>, 5> samplers;  // four probe states, then generation
    if (honest) {
        for (auto s : kAllTestStates) {
            samplers[state_index(s)].emplace(honest_device(honest->model, s));
        }
        samplers[4].emplace(honest_generation(honest->model));
    }
    const auto *adversary = std::get_if<AdversarialDevice>(&device);
    const BlochVector generation_state = bloch_of_state(TestStateId::XPlus);

    for (uint64_t i = begin; i < end; i++) {
        TrialRecord rec;
        rec.index = i;
        if (it != tests.end() && it->position == i) {
            rec.is_test = true;
            rec.state = it->state;
            ++it;
        }
        double u = uniform01(engine);
        if (honest) {
            size_t slot = rec.is_test ? state_index(rec.state) : 4;
            rec.raw = samplers[slot]->draw(u);
        } else {
            const Povm &povm = adversary->schedule.at(i);
            const BlochVector r = rec.is_test ? bloch_of_state(rec.state) : generation_state;
            double p0 = povm.a0 * (1 + povm.n.dot(r));
            rec.raw = u < p0 ? RawOutcome::Click0 : RawOutcome::Click1;
        }
        rec.outcome = rec.raw == RawOutcome::Click1 ? 1 : 0;
        out.push_back(rec);
    }
}

void check_device(const Schedule &schedule, const Device &device) {
    if (const auto *honest = std::get_if<HonestDevice>(&device)) {
        honest->model.validate();
        return;
    }
    const auto &ps = std::get<AdversarialDevice>(device).schedule;
    if (ps.povms.empty()) {
        if (schedule.total_trials() == 0) return;
        fail(ErrorCode::invalid_argument, "adversarial device needs at least one POVM");
    }
    if (!ps.cyclic && ps.povms.size() != schedule.total_trials()) {
        fail(ErrorCode::invalid_argument,
             "POVM schedule has " + std::to_string(ps.povms.size()) + " entries for " +
                 std::to_string(schedule.total_trials()) + " trials");
    }
    for (size_t k = 0; k < ps.povms.size(); k++) {
        auto v = validate_povm(ps.povms[k]);
        if (!v.empty()) {
            fail(ErrorCode::invalid_argument, "POVM " + std::to_string(k) + ": " + v.front());
        }
    }
}

}  // namespace

void simulate(const Schedule &schedule, const Device &device, uint64_t rng_seed,
              const RecordSink &sink, const SimulationOptions &options) {
    check_device(schedule, device);
    if (options.chunk_size == 0) {
        fail(ErrorCode::invalid_argument, "chunk size must be positive");
    }
    const uint64_t n = schedule.total_trials();
    const uint64_t chunks = (n + options.chunk_size - 1) / options.chunk_size;
    const unsigned threads = std::max(1u, options.threads);
    std::vector<std::vector<TrialRecord>> buffers(threads);
    for (uint64_t first = 0; first < chunks; first += threads) {
        uint64_t batch = std::min<uint64_t>(threads, chunks - first);
        auto run = [&](uint64_t j) {
            uint64_t c = first + j;
            uint64_t begin = c * options.chunk_size;
            uint64_t end = std::min(n, begin + options.chunk_size);
            simulate_chunk(schedule, device, rng_seed, c, begin, end, buffers[j]);
        };
        if (batch == 1) {
            run(0);
        } else {
            std::vector<std::future<void>> jobs;
            for (uint64_t j = 0; j < batch; j++) {
                jobs.push_back(std::async(std::launch::async, run, j));
            }
            for (auto &job : jobs) job.get();
        }
        for (uint64_t j = 0; j < batch; j++) {
            sink(buffers[j]);
        }
    }
}

std::vector<TrialRecord> simulate_all(const Schedule &schedule, const Device &device,
                                      uint64_t rng_seed, const SimulationOptions &options) {
    std::vector<TrialRecord> out;
    out.reserve(schedule.total_trials());
    simulate(schedule, device, rng_seed,
             [&](std::span<const TrialRecord> chunk) { out.insert(out.end(), chunk.begin(), chunk.end()); },
             options);
    return out;
}

StateVerification verify_states(const SourceModel &model) {
    StateVerification v;
    for (auto s : kAllTestStates) {
        BlochVector r = bloch_of_state(s);
        std::array<double, 3> axis{r.x, r.y, r.z};
        for (size_t b = 0; b < 3; b++) {
            auto d = honest_device(model, axis[b]);
            double clicks = d.click0 + d.click1;
            double wrong = axis[b] > 0 ? d.click1 : d.click0;
            if (axis[b] == 0) wrong = d.click1;
            v.error_rate[state_index(s)][b] = clicks > 0 ? wrong / clicks : 0;
        }
    }
    return v;
}

}  // namespace mdiqrng
