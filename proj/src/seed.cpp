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

#include "mdiqrng/seed.hpp"

#include <string>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

uint64_t SeedSource::read(unsigned width) {
    if (width > 64) {
        fail(ErrorCode::invalid_argument, "seed read wider than 64 bits");
    }
    auto left = remaining();
    if (left && *left < width) {
        fail(ErrorCode::seed_exhausted, "seed exhausted: read of " + std::to_string(width) +
                                            " bits with only " + std::to_string(*left) + " left");
    }
    uint64_t value = 0;
    for (unsigned k = 0; k < width; k++) {
        value = (value << 1) | static_cast<uint64_t>(next_bit());
    }
    consumed_ += width;
    return value;
}

BufferSeed::BufferSeed(std::vector<uint8_t> bytes, uint64_t bit_count)
    : bytes_(std::move(bytes)), bit_count_(bit_count) {
    if (bit_count_ > bytes_.size() * 8) {
        fail(ErrorCode::invalid_argument, "seed bit count exceeds buffer size");
    }
}

BufferSeed::BufferSeed(std::vector<uint8_t> bytes) : BufferSeed(bytes, bytes.size() * 8) {
}

BufferSeed BufferSeed::from_hex(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
        hex.remove_prefix(2);
    }
    if (hex.size() % 2 != 0) {
        fail(ErrorCode::format, "hex seed must have an even number of digits");
    }
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<uint8_t> bytes;
    bytes.reserve(hex.size() / 2);
    for (size_t k = 0; k < hex.size(); k += 2) {
        int hi = nibble(hex[k]);
        int lo = nibble(hex[k + 1]);
        if (hi < 0 || lo < 0) {
            fail(ErrorCode::format, "invalid hex digit in seed");
        }
        bytes.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return BufferSeed(std::move(bytes));
}

BufferSeed BufferSeed::from_bits(std::span<const uint8_t> bits) {
    std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (size_t k = 0; k < bits.size(); k++) {
        if (bits[k]) {
            bytes[k / 8] |= static_cast<uint8_t>(1u << (k % 8));
        }
    }
    return BufferSeed(std::move(bytes), bits.size());
}

bool BufferSeed::next_bit() {
    bool b = (bytes_[cursor_ / 8] >> (cursor_ % 8)) & 1;
    cursor_++;
    return b;
}

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

ExpandedSeed::ExpandedSeed(uint64_t seed) : engine_(mix64(seed)) {
}

bool ExpandedSeed::next_bit() {
    if (left_ == 0) {
        word_ = engine_();
        left_ = 64;
    }
    bool b = word_ & 1;
    word_ >>= 1;
    left_--;
    return b;
}

std::vector<uint8_t> expand_seed_bytes(uint64_t seed, uint64_t bit_count) {
    std::mt19937_64 engine(mix64(seed));
    std::vector<uint8_t> bytes((bit_count + 7) / 8, 0);
    for (size_t k = 0; k < bytes.size(); k += 8) {
        uint64_t w = engine();
        for (size_t j = 0; j < 8 && k + j < bytes.size(); j++) {
            bytes[k + j] = static_cast<uint8_t>(w >> (8 * j));
        }
    }
    if (bit_count % 8 != 0) {
        bytes.back() &= static_cast<uint8_t>((1u << (bit_count % 8)) - 1);
    }
    return bytes;
}

}  // namespace mdiqrng
