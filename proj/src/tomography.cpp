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

#include "mdiqrng/tomography.hpp"

#include <cmath>
#include <string>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

TestTally TestTally::from_counts(const std::array<StateCount, 4> &counts, uint64_t generation_turns) {
    TestTally t;
    t.counts = counts;
    t.generation_turns = generation_turns;
    for (auto s : kAllTestStates) {
        size_t i = state_index(s);
        const auto &c = counts[i];
        if (c.trials == 0) {
            fail(ErrorCode::insufficient_data,
                 "no test trials recorded for state " + std::string(state_name(s)));
        }
        if (c.ones > c.trials) {
            fail(ErrorCode::invalid_argument,
                 "state " + std::string(state_name(s)) + " has more '1' counts than trials");
        }
        t.p[i] = static_cast<double>(c.trials - c.ones) / static_cast<double>(c.trials);
    }
    return t;
}

TestTally TestTally::from_probabilities(const std::array<double, 4> &p_zero,
                                        const std::array<uint64_t, 4> &trials,
                                        uint64_t generation_turns) {
    TestTally t;
    t.generation_turns = generation_turns;
    for (size_t i = 0; i < 4; i++) {
        if (!(p_zero[i] >= 0 && p_zero[i] <= 1)) {
            fail(ErrorCode::invalid_argument, "probability outside [0,1]");
        }
        if (trials[i] == 0) {
            fail(ErrorCode::insufficient_data,
                 "no test trials for state " + std::string(state_name(kAllTestStates[i])));
        }
        t.p[i] = p_zero[i];
        t.counts[i].trials = trials[i];
        t.counts[i].ones = static_cast<uint64_t>(std::llround((1 - p_zero[i]) * static_cast<double>(trials[i])));
    }
    return t;
}

void TallyAccumulator::add(std::span<const TrialRecord> records) {
    for (const auto &r : records) {
        if (r.is_test) {
            auto &c = counts_[state_index(r.state)];
            c.trials++;
            c.ones += r.outcome;
        } else {
            generation_turns_++;
            generation_ones_ += r.outcome;
        }
    }
}

void TallyAccumulator::merge(const TallyAccumulator &other) {
    for (size_t i = 0; i < 4; i++) {
        counts_[i].trials += other.counts_[i].trials;
        counts_[i].ones += other.counts_[i].ones;
    }
    generation_turns_ += other.generation_turns_;
    generation_ones_ += other.generation_ones_;
}

TestTally TallyAccumulator::finish() const {
    return TestTally::from_counts(counts_, generation_turns_);
}

TestTally tally(std::span<const TrialRecord> records) {
    TallyAccumulator acc;
    acc.add(records);
    return acc.finish();
}

PovmEstimate reconstruct(const std::array<double, 4> &p) {
    for (double v : p) {
        if (!(v >= 0 && v <= 1)) {
            fail(ErrorCode::invalid_argument, "tomography probability outside [0,1]");
        }
    }
    double sum = p[0] + p[1];
    if (sum == 0) {
        fail(ErrorCode::degenerate, "p1 + p2 = 0: a0 = 0 and the direction n is undetermined");
    }
    PovmEstimate e;
    e.a0 = sum / 2;
    e.nz = (p[0] - p[1]) / sum;
    e.nx = p[2] / e.a0 - 1;
    e.ny = p[3] / e.a0 - 1;
    e.violations = validate_povm(e.povm());
    e.physical = e.violations.empty();
    return e;
}

}  // namespace mdiqrng
