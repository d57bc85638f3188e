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

#ifndef MDIQRNG_QSTATE_HPP
#define MDIQRNG_QSTATE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mdiqrng {

/// Slack allowed on Bloch-vector norms.
constexpr double kNormSlack = 1e-12;
/// Tolerance used when checking POVM constraints.
constexpr double kPovmTolerance = 1e-9;

struct BlochVector {
    double x = 0;
    double y = 0;
    double z = 0;

    double dot(const BlochVector &other) const {
        return x * other.x + y * other.y + z * other.z;
    }
    double norm2() const {
        return dot(*this);
    }
    double norm() const;

    bool operator==(const BlochVector &) const = default;
};

BlochVector operator*(double s, const BlochVector &v);

/// The four trusted probe states, in the order used for tallies (index 0..3).
enum class TestStateId : uint8_t {
    Z0 = 0,     // |0>
    Z1 = 1,     // |1>
    XPlus = 2,  // |+>
    YPlus = 3,  // |+i>
};

constexpr std::array<TestStateId, 4> kAllTestStates{
    TestStateId::Z0, TestStateId::Z1, TestStateId::XPlus, TestStateId::YPlus};

constexpr size_t state_index(TestStateId s) {
    return static_cast<size_t>(s);
}
std::string_view state_name(TestStateId s);

BlochVector bloch_of_state(TestStateId state);

/// Binary qubit measurement F0 = a0 (I + n.sigma), F1 = I - F0.
struct Povm {
    double a0 = 1;
    BlochVector n;

    double a1() const {
        return 1 - a0;
    }
    /// Direction of F1; zero when a1 == 0.
    BlochVector n1() const;
};

/// Empty when valid; otherwise one human-readable line per violated constraint.
std::vector<std::string> validate_povm(const Povm &povm);
bool is_valid_povm(const Povm &povm);

/// The measurement with F0 and F1 exchanged.
Povm complement(const Povm &povm);

/// tr(F0 rho) = a0 (1 + n.r). Throws Error(invalid_argument) on invalid inputs.
double outcome_zero_prob(const Povm &povm, const BlochVector &state);

}  // namespace mdiqrng

#endif
