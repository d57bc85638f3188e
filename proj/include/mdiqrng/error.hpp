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

#ifndef MDIQRNG_ERROR_HPP
#define MDIQRNG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mdiqrng {

/// Failure categories. The numeric values are part of the C ABI and double as
/// process exit codes for the command line tool.
enum class ErrorCode : int {
    ok = 0,
    invalid_argument = 1,
    io = 2,
    format = 3,
    seed_exhausted = 4,
    infeasible = 5,
    insufficient_data = 6,
    nothing_to_extract = 7,
    test_failed = 8,
    degenerate = 9,
    internal = 10,
};

const char *error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message) : std::runtime_error(message), code_(code) {
    }
    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &message) {
    throw Error(code, message);
}

}  // namespace mdiqrng

#endif
