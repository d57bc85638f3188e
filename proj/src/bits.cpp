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

#include "mdiqrng/bits.hpp"

#include <bit>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

namespace {
size_t words_for(size_t bits) {
    return (bits + 63) / 64;
}
}  // namespace

BitVector::BitVector(size_t size, bool value) : words_(words_for(size), value ? ~uint64_t{0} : 0), size_(size) {
    clear_tail();
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector out(bits.size());
    for (size_t i = 0; i < bits.size(); i++) {
        if (bits[i] != '0' && bits[i] != '1') {
            fail(ErrorCode::invalid_argument, "bit string may contain only '0' and '1'");
        }
        out.set(i, bits[i] == '1');
    }
    return out;
}

BitVector BitVector::from_bytes(std::span<const uint8_t> bytes, size_t bit_count) {
    if (bit_count > bytes.size() * 8) {
        fail(ErrorCode::invalid_argument, "bit count exceeds the supplied bytes");
    }
    BitVector out(bit_count);
    for (size_t i = 0; i < (bit_count + 7) / 8; i++) {
        out.words_[i / 8] |= uint64_t{bytes[i]} << (8 * (i % 8));
    }
    out.clear_tail();
    return out;
}

BitVector BitVector::from_words(std::vector<uint64_t> words, size_t bit_count) {
    if (words.size() < words_for(bit_count)) {
        fail(ErrorCode::invalid_argument, "bit count exceeds the supplied words");
    }
    BitVector out;
    words.resize(words_for(bit_count));
    out.words_ = std::move(words);
    out.size_ = bit_count;
    out.clear_tail();
    return out;
}

void BitVector::set(size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (v) {
        words_[i >> 6] |= mask;
    } else {
        words_[i >> 6] &= ~mask;
    }
}

void BitVector::push_back(bool v) {
    if ((size_ & 63) == 0) words_.push_back(0);
    size_++;
    if (v) set(size_ - 1, true);
}

void BitVector::resize(size_t n) {
    words_.resize(words_for(n), 0);
    size_ = n;
    clear_tail();
}

void BitVector::reserve(size_t n) {
    words_.reserve(words_for(n));
}

void BitVector::append(const BitVector &other) {
    size_t old = size_;
    resize(size_ + other.size_);
    if ((old & 63) == 0) {
        std::copy(other.words_.begin(), other.words_.end(), words_.begin() + old / 64);
        return;
    }
    unsigned shift = old & 63;
    size_t base = old / 64;
    for (size_t k = 0; k < other.words_.size(); k++) {
        words_[base + k] |= other.words_[k] << shift;
        if (base + k + 1 < words_.size()) words_[base + k + 1] |= other.words_[k] >> (64 - shift);
    }
    clear_tail();
}

BitVector BitVector::slice(size_t offset, size_t count) const {
    if (offset > size_ || count > size_ - offset) {
        fail(ErrorCode::invalid_argument, "slice out of range");
    }
    BitVector out(count);
    copy_bits(words_, offset, count, out.words_);
    return out;
}

uint64_t BitVector::popcount() const {
    uint64_t total = 0;
    for (uint64_t w : words_) total += std::popcount(w);
    return total;
}

std::vector<uint8_t> BitVector::to_bytes() const {
    std::vector<uint8_t> out((size_ + 7) / 8);
    for (size_t i = 0; i < out.size(); i++) out[i] = static_cast<uint8_t>(words_[i / 8] >> (8 * (i % 8)));
    return out;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (size_t i = 0; i < size_; i++) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

BitVector &BitVector::operator^=(const BitVector &other) {
    if (other.size_ != size_) {
        fail(ErrorCode::invalid_argument, "xor of bit vectors with different lengths");
    }
    for (size_t i = 0; i < words_.size(); i++) words_[i] ^= other.words_[i];
    return *this;
}

BitVector operator^(BitVector a, const BitVector &b) {
    a ^= b;
    return a;
}

void BitVector::clear_tail() {
    if (size_ & 63) words_.back() &= (uint64_t{1} << (size_ & 63)) - 1;
}

void copy_bits(std::span<const uint64_t> src, size_t offset, size_t count, std::span<uint64_t> dst) {
    size_t n = words_for(count);
    size_t base = offset / 64;
    unsigned shift = offset & 63;
    for (size_t k = 0; k < n; k++) {
        uint64_t lo = base + k < src.size() ? src[base + k] : 0;
        uint64_t hi = shift && base + k + 1 < src.size() ? src[base + k + 1] : 0;
        dst[k] = shift ? (lo >> shift) | (hi << (64 - shift)) : lo;
    }
    if (count & 63) dst[n - 1] &= (uint64_t{1} << (count & 63)) - 1;
}

}  // namespace mdiqrng
