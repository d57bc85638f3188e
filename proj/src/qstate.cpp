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

#include "mdiqrng/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

double BlochVector::norm() const {
    return std::sqrt(norm2());
}

BlochVector operator*(double s, const BlochVector &v) {
    return {s * v.x, s * v.y, s * v.z};
}

std::string_view state_name(TestStateId s) {
    switch (s) {
        case TestStateId::Z0:
            return "Z0";
        case TestStateId::Z1:
            return "Z1";
        case TestStateId::XPlus:
            return "XPlus";
        case TestStateId::YPlus:
            return "YPlus";
    }
    return "?";
}

BlochVector bloch_of_state(TestStateId state) {
    switch (state) {
        case TestStateId::Z0:
            return {0, 0, 1};
        case TestStateId::Z1:
            return {0, 0, -1};
        case TestStateId::XPlus:
            return {1, 0, 0};
        case TestStateId::YPlus:
            return {0, 1, 0};
    }
    fail(ErrorCode::invalid_argument, "unknown test state");
}

BlochVector Povm::n1() const {
    double b = a1();
    if (b <= 0) {
        return {};
    }
    return (-a0 / b) * n;
}

std::vector<std::string> validate_povm(const Povm &povm) {
    std::vector<std::string> out;
    auto describe = [&](const char *what, double value, const char *bound) {
        std::ostringstream ss;
        ss.precision(10);
        ss << what << " = " << value << " " << bound;
        out.push_back(ss.str());
    };
    if (!std::isfinite(povm.a0) || !std::isfinite(povm.n.x) || !std::isfinite(povm.n.y) ||
        !std::isfinite(povm.n.z)) {
        out.emplace_back("non-finite parameter");
        return out;
    }
    if (povm.a0 < -kPovmTolerance) {
        describe("a0", povm.a0, "< 0");
    }
    if (povm.a0 > 1 + kPovmTolerance) {
        describe("a0", povm.a0, "> 1");
    }
    double n0 = povm.n.norm();
    if (n0 > 1 + kPovmTolerance) {
        describe("|n0|", n0, "> 1");
    }
    // |n1| <= 1 is equivalent to a0 |n0| <= 1 - a0; the product form also
    // covers a0 == 1, where F1 = 0 forces n0 = 0.
    double lhs = povm.a0 * n0;
    double rhs = 1 - povm.a0;
    if (lhs > rhs + kPovmTolerance) {
        if (rhs > 0) {
            describe("|n1|", lhs / rhs, "> 1");
        } else {
            describe("a0 |n0|", lhs, "> 1 - a0");
        }
    }
    return out;
}

bool is_valid_povm(const Povm &povm) {
    return validate_povm(povm).empty();
}

Povm complement(const Povm &povm) {
    return Povm{povm.a1(), povm.n1()};
}

double outcome_zero_prob(const Povm &povm, const BlochVector &state) {
    if (state.norm2() > 1 + kNormSlack) {
        fail(ErrorCode::invalid_argument, "state Bloch vector has norm > 1");
    }
    auto violations = validate_povm(povm);
    if (!violations.empty()) {
        fail(ErrorCode::invalid_argument, "invalid POVM: " + violations.front());
    }
    double p = povm.a0 * (1 + povm.n.dot(state));
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace mdiqrng
