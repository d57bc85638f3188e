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

#ifndef MDIQRNG_PROTOCOL_HPP
#define MDIQRNG_PROTOCOL_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mdiqrng/qstate.hpp"
#include "mdiqrng/seed.hpp"

namespace mdiqrng {

/// Every trusted seed bit spent by one run, split by purpose.
struct SeedAccounting {
    uint64_t bits_for_positions = 0;
    uint64_t bits_for_states = 0;
    uint64_t bits_for_extractor_seed = 0;

    uint64_t protocol_bits() const {
        return bits_for_positions + bits_for_states;
    }
    uint64_t total_consumed() const {
        return bits_for_positions + bits_for_states + bits_for_extractor_seed;
    }
    SeedAccounting &operator+=(const SeedAccounting &other);
};

struct TestSlot {
    uint64_t position;
    TestStateId state;

    bool operator==(const TestSlot &) const = default;
};

/// Which trials are test trials and which probe state each one sends. Trials
/// not listed are generation trials (fixed |+> state).
class Schedule {
   public:
    Schedule() = default;
    /// `tests` need not be sorted; positions must be distinct and < total_trials.
    Schedule(uint64_t total_trials, std::vector<TestSlot> tests);

    uint64_t total_trials() const {
        return total_trials_;
    }
    uint64_t test_count() const {
        return tests_.size();
    }
    uint64_t generation_count() const {
        return total_trials_ - tests_.size();
    }
    /// Sorted by position.
    const std::vector<TestSlot> &tests() const {
        return tests_;
    }
    std::optional<TestStateId> state_at(uint64_t index) const;

    bool operator==(const Schedule &) const = default;

   private:
    uint64_t total_trials_ = 0;
    std::vector<TestSlot> tests_;
};

struct ScheduleBuild {
    Schedule schedule;
    SeedAccounting accounting;
    /// Position draws discarded as duplicates or out of range.
    uint64_t rejected_draws = 0;
};

/// Draws `test_trials` distinct positions (position_bits seed bits per draw,
/// duplicates and values >= total_trials are redrawn) and, after each accepted
/// position, 2 seed bits choosing its probe state.
ScheduleBuild build_schedule(SeedSource &seed, uint64_t total_trials, uint64_t test_trials,
                             unsigned position_bits);

/// Phase-randomized weak coherent source feeding a gated single-photon detector
/// that reads a Z-basis time-bin qubit.
struct SourceModel {
    double mu = 0.06;    // mean photon number
    double eta = 0.25;   // detection efficiency
    double dark = 0;     // dark count probability per gate and time bin
    double error = 0;    // lumped preparation / afterpulse flip probability

    void validate() const;
};

enum class RawOutcome : uint8_t { NoClick = 0, Click0 = 1, Click1 = 2, DoubleClick = 3 };

struct OutcomeDistribution {
    double no_click = 0;
    double click0 = 0;
    double click1 = 0;
    double double_click = 0;

    /// Probability of the bit '1'; everything else is assigned '0'.
    double one() const {
        return click1;
    }
};

/// Click statistics when the honest detector measures along the axis on which
/// the prepared state has Bloch component `axis_component`.
OutcomeDistribution honest_device(const SourceModel &model, double axis_component);
OutcomeDistribution honest_device(const SourceModel &model, TestStateId state);
/// Generation trials send |+> through the Z measurement.
OutcomeDistribution honest_generation(const SourceModel &model);

/// One POVM per trial; a cyclic schedule repeats its entries (a single entry
/// models an i.i.d. device).
struct PovmSchedule {
    std::vector<Povm> povms;
    bool cyclic = true;

    const Povm &at(uint64_t trial) const {
        return cyclic ? povms[trial % povms.size()] : povms[trial];
    }
};

OutcomeDistribution adversarial_device(const Povm &povm, const BlochVector &state);

struct HonestDevice {
    SourceModel model;
};
struct AdversarialDevice {
    PovmSchedule schedule;
};
using Device = std::variant<HonestDevice, AdversarialDevice>;

struct TrialRecord {
    uint64_t index = 0;
    bool is_test = false;
    TestStateId state = TestStateId::Z0;  // meaningful only for test trials
    uint8_t outcome = 0;
    RawOutcome raw = RawOutcome::NoClick;

    bool operator==(const TrialRecord &) const = default;
};

struct SimulationOptions {
    uint64_t chunk_size = uint64_t{1} << 20;
    unsigned threads = 1;
};

using RecordSink = std::function<void(std::span<const TrialRecord>)>;

/// Streams one record per trial in index order. Chunk k draws from its own
/// engine seeded from (rng_seed, k), so output is identical for any thread count.
void simulate(const Schedule &schedule, const Device &device, uint64_t rng_seed,
              const RecordSink &sink, const SimulationOptions &options = {});

std::vector<TrialRecord> simulate_all(const Schedule &schedule, const Device &device,
                                      uint64_t rng_seed, const SimulationOptions &options = {});

enum class Basis : uint8_t { X = 0, Y = 1, Z = 2 };

/// error_rate[state][basis]: probability of the wrong single-click outcome given
/// a single click. For a state orthogonal to the basis axis the '1' outcome is
/// counted as wrong (the rate is 1/2 either way).
struct StateVerification {
    std::array<std::array<double, 3>, 4> error_rate{};
};

StateVerification verify_states(const SourceModel &model);

}  // namespace mdiqrng

#endif
