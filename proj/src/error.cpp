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

#include "mdiqrng/error.hpp"

namespace mdiqrng {

const char *error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ok:
            return "ok";
        case ErrorCode::invalid_argument:
            return "invalid_argument";
        case ErrorCode::io:
            return "io";
        case ErrorCode::format:
            return "format";
        case ErrorCode::seed_exhausted:
            return "seed_exhausted";
        case ErrorCode::infeasible:
            return "infeasible";
        case ErrorCode::insufficient_data:
            return "insufficient_data";
        case ErrorCode::nothing_to_extract:
            return "nothing_to_extract";
        case ErrorCode::test_failed:
            return "test_failed";
        case ErrorCode::degenerate:
            return "degenerate";
        case ErrorCode::internal:
            return "internal";
    }
    return "unknown";
}

}  // namespace mdiqrng
