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

#ifndef MDIQRNG_TOMOGRAPHY_HPP
#define MDIQRNG_TOMOGRAPHY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdiqrng/protocol.hpp"
#include "mdiqrng/qstate.hpp"

namespace mdiqrng {

struct StateCount {
    uint64_t trials = 0;
    uint64_t ones = 0;

    bool operator==(const StateCount &) const = default;
};

/// Per-probe-state statistics of one experiment. Counts are of the bit '1'
/// (as recorded); p holds the probability of '0', which is what every
/// downstream formula consumes.
struct TestTally {
    std::array<StateCount, 4> counts{};
    std::array<double, 4> p{};
    uint64_t generation_turns = 0;

    /// Validates counts and derives p = 1 - ones/trials.
    static TestTally from_counts(const std::array<StateCount, 4> &counts, uint64_t generation_turns);
    /// Expected tally for a forward model: exact probabilities with nominal counts.
    static TestTally from_probabilities(const std::array<double, 4> &p_zero,
                                        const std::array<uint64_t, 4> &trials,
                                        uint64_t generation_turns);

    double one_probability(size_t i) const {
        return 1 - p[i];
    }
};

/// Associative count reduction over record chunks.
class TallyAccumulator {
   public:
    void add(std::span<const TrialRecord> records);
    void merge(const TallyAccumulator &other);

    uint64_t generation_turns() const {
        return generation_turns_;
    }
    uint64_t generation_ones() const {
        return generation_ones_;
    }
    const std::array<StateCount, 4> &counts() const {
        return counts_;
    }
    /// Throws Error(insufficient_data) naming any probe state with no trials.
    TestTally finish() const;

   private:
    std::array<StateCount, 4> counts_{};
    uint64_t generation_turns_ = 0;
    uint64_t generation_ones_ = 0;
};

TestTally tally(std::span<const TrialRecord> records);

struct PovmEstimate {
    double a0 = 0;
    double nx = 0;
    double ny = 0;
    double nz = 0;
    bool physical = false;
    std::vector<std::string> violations;

    Povm povm() const {
        return Povm{a0, {nx, ny, nz}};
    }
};

/// Linear inversion of p1 = a0(1+nz), p2 = a0(1-nz), p3 = a0(1+nx), p4 = a0(1+ny).
/// Unphysical estimates are returned with physical = false, never clipped.
PovmEstimate reconstruct(const std::array<double, 4> &p);

}  // namespace mdiqrng

#endif
