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

#ifndef MDIQRNG_EXTRACTOR_HPP
#define MDIQRNG_EXTRACTOR_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mdiqrng/bits.hpp"
#include "mdiqrng/seed.hpp"

namespace mdiqrng {

/// Toeplitz hash from n input bits to m output bits. The matrix entry at row i,
/// column j is seed[i + n - 1 - j], so output bit i is the coefficient of
/// x^(i+n-1) in seed(x) * raw(x) over GF(2).
struct ToeplitzSpec {
    size_t n = 0;
    size_t m = 0;
    BitVector seed;  // m + n - 1 bits

    void validate() const;
};

constexpr double kDefaultExtractorEpsilon = 0x1.0p-100;

/// max(0, floor(n_raw R - 2 log2(1/eps_ext))).
uint64_t output_length(double n_raw, double R, double eps_ext);

/// T raw. With threads > 1 the rows are split into contiguous ranges that are
/// hashed concurrently; the result does not depend on the split.
BitVector extract(const BitVector &raw, const ToeplitzSpec &spec, unsigned threads = 1);

/// Rows [row_begin, row_end) of T raw.
BitVector extract_rows(const BitVector &raw, const ToeplitzSpec &spec, size_t row_begin, size_t row_end);

/// Word-level form of extract: seed holds m+n-1 bits, raw n bits, out receives
/// ceil(m/64) words.
void toeplitz_multiply(std::span<const uint64_t> seed, std::span<const uint64_t> raw, size_t n, size_t m,
                       std::span<uint64_t> out);

/// Single-word form for n + m - 1 <= 64; no allocation.
uint64_t toeplitz_small(uint64_t seed, uint64_t raw, unsigned n, unsigned m);

/// Carry-less product of two word-packed GF(2) polynomials (a.size() + b.size() words).
std::vector<uint64_t> gf2_multiply(std::span<const uint64_t> a, std::span<const uint64_t> b);

bool hardware_clmul_available();

enum class SeedMode { Reuse, PerBlock };

std::string_view seed_mode_name(SeedMode mode);
SeedMode parse_seed_mode(std::string_view name);

/// Fixed-size blocking of a raw stream. A trailing partial block is dropped;
/// an input shorter than one block forms a single block of its own length.
struct BlockPlan {
    uint64_t block_n = 0;
    uint64_t block_m = 0;
    uint64_t blocks = 0;
    uint64_t discarded_bits = 0;
    SeedMode mode = SeedMode::Reuse;

    uint64_t output_bits() const {
        return blocks * block_m;
    }
    uint64_t seed_bits() const;
};

BlockPlan plan_blocks(uint64_t raw_bits, uint64_t block_n, double R, double eps_ext, SeedMode mode);

struct Extraction {
    BitVector output;
    BlockPlan plan;
    uint64_t seed_bits_consumed = 0;
};

/// Reads m+n-1 seed bits (once, or again for every block under PerBlock) and
/// hashes each block. Throws Error(nothing_to_extract) when block_m == 0.
Extraction extract_blocks(const BitVector &raw, const BlockPlan &plan, SeedSource &seed, unsigned threads = 1);

/// Draws a Toeplitz seed of `bits` bits from the source, bit by bit.
BitVector read_seed_bits(SeedSource &seed, uint64_t bits);

}  // namespace mdiqrng

#endif
