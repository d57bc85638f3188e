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

#ifndef MDIQRNG_BITS_HPP
#define MDIQRNG_BITS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdiqrng {

/// Growable bit string packed into 64-bit words, bit i at word i/64, position
/// i%64. Bits past size() in the last word are kept zero.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(size_t size, bool value = false);

    /// Parses a string of '0'/'1' characters, first character is bit 0.
    static BitVector from_string(std::string_view bits);
    /// Little-endian packed bytes: bit i is byte i/8, bit i%8.
    static BitVector from_bytes(std::span<const uint8_t> bytes, size_t bit_count);
    static BitVector from_words(std::vector<uint64_t> words, size_t bit_count);

    size_t size() const {
        return size_;
    }
    bool empty() const {
        return size_ == 0;
    }
    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    bool operator[](size_t i) const {
        return get(i);
    }
    void set(size_t i, bool v);
    void push_back(bool v);
    void resize(size_t n);
    void reserve(size_t n);
    void append(const BitVector &other);

    /// Bits [offset, offset + count) as a new vector.
    BitVector slice(size_t offset, size_t count) const;
    uint64_t popcount() const;

    std::vector<uint8_t> to_bytes() const;
    std::string to_string() const;

    const std::vector<uint64_t> &words() const {
        return words_;
    }
    std::span<uint64_t> mutable_words() {
        return words_;
    }

    BitVector &operator^=(const BitVector &other);
    bool operator==(const BitVector &other) const = default;

   private:
    void clear_tail();

    std::vector<uint64_t> words_;
    size_t size_ = 0;
};

BitVector operator^(BitVector a, const BitVector &b);

/// Copies `count` bits starting at bit `offset` of `src` into `dst` (which must
/// hold ceil(count/64) words); unused high bits of the last word are zeroed.
void copy_bits(std::span<const uint64_t> src, size_t offset, size_t count, std::span<uint64_t> dst);

}  // namespace mdiqrng

#endif
