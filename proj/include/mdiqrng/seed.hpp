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

#ifndef MDIQRNG_SEED_HPP
#define MDIQRNG_SEED_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace mdiqrng {

/// A stream of trusted random seed bits. Multi-bit reads are most significant
/// bit first; every bit handed out is counted in consumed().
class SeedSource {
   public:
    virtual ~SeedSource() = default;

    /// Bits left, or nullopt for an unbounded stream.
    virtual std::optional<uint64_t> remaining() const = 0;

    /// Reads `width` <= 64 bits. Throws Error(seed_exhausted) when fewer remain;
    /// nothing is consumed in that case.
    uint64_t read(unsigned width);

    uint64_t consumed() const {
        return consumed_;
    }

   protected:
    virtual bool next_bit() = 0;

   private:
    uint64_t consumed_ = 0;
};

/// Seed bits held in memory. Bit i lives at byte i/8, bit position i%8.
class BufferSeed final : public SeedSource {
   public:
    BufferSeed(std::vector<uint8_t> bytes, uint64_t bit_count);
    explicit BufferSeed(std::vector<uint8_t> bytes);

    static BufferSeed from_hex(std::string_view hex);
    static BufferSeed from_bits(std::span<const uint8_t> bits);

    std::optional<uint64_t> remaining() const override {
        return bit_count_ - cursor_;
    }
    uint64_t bit_count() const {
        return bit_count_;
    }
    const std::vector<uint8_t> &bytes() const {
        return bytes_;
    }

   protected:
    bool next_bit() override;

   private:
    std::vector<uint8_t> bytes_;
    uint64_t bit_count_;
    uint64_t cursor_ = 0;
};

/// Deterministic pseudo-random expansion of an explicit 64-bit seed, for
/// simulation runs that have no physical seed file. Unbounded.
class ExpandedSeed final : public SeedSource {
   public:
    explicit ExpandedSeed(uint64_t seed);

    std::optional<uint64_t> remaining() const override {
        return std::nullopt;
    }

   protected:
    bool next_bit() override;

   private:
    std::mt19937_64 engine_;
    uint64_t word_ = 0;
    unsigned left_ = 0;
};

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
uint64_t mix64(uint64_t x);

/// 53-bit uniform double in [0, 1).
inline double uniform01(std::mt19937_64 &engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Fills `bit_count` bits from an ExpandedSeed into little-endian packed bytes.
std::vector<uint8_t> expand_seed_bytes(uint64_t seed, uint64_t bit_count);

}  // namespace mdiqrng

#endif
