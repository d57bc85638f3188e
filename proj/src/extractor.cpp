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

#include "mdiqrng/extractor.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

namespace {

size_t words_for(size_t bits) {
    return (bits + 63) / 64;
}

constexpr size_t kSchoolbookWords = 32;

// out[0 .. 2L) = a * b for L-word operands; out is overwritten.
void schoolbook_soft(const uint64_t *a, const uint64_t *b, size_t L, uint64_t *out) {
    std::fill(out, out + 2 * L, 0);
    for (size_t i = 0; i < L; i++) {
        uint64_t x = a[i];
        if (!x) continue;
        for (size_t j = 0; j < L; j++) {
            uint64_t y = b[j];
            uint64_t lo = 0, hi = 0;
            for (unsigned k = 0; k < 64; k++) {
                uint64_t mask = -((x >> k) & 1);
                lo ^= (y << k) & mask;
                hi ^= (k ? y >> (64 - k) : 0) & mask;
            }
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
}

__attribute__((target("pclmul,sse4.1"))) void schoolbook_hw(const uint64_t *a, const uint64_t *b, size_t L,
                                                              uint64_t *out) {
    std::fill(out, out + 2 * L, 0);
    for (size_t i = 0; i < L; i++) {
        __m128i x = _mm_cvtsi64_si128(static_cast<long long>(a[i]));
        for (size_t j = 0; j < L; j++) {
            __m128i r = _mm_clmulepi64_si128(x, _mm_cvtsi64_si128(static_cast<long long>(b[j])), 0);
            out[i + j] ^= static_cast<uint64_t>(_mm_cvtsi128_si64(r));
            out[i + j + 1] ^= static_cast<uint64_t>(_mm_extract_epi64(r, 1));
        }
    }
}

using Basecase = void (*)(const uint64_t *, const uint64_t *, size_t, uint64_t *);

Basecase pick_basecase() {
    return hardware_clmul_available() ? schoolbook_hw : schoolbook_soft;
}

size_t scratch_words(size_t L) {
    size_t total = 0;
    while (L > kSchoolbookWords) {
        size_t hh = L - L / 2;
        total += 4 * hh;
        L = hh;
    }
    return total + 1;
}

void karatsuba(const uint64_t *a, const uint64_t *b, size_t L, uint64_t *out, uint64_t *scratch, Basecase base) {
    if (L <= kSchoolbookWords) {
        base(a, b, L, out);
        return;
    }
    size_t h = L / 2;
    size_t hh = L - h;
    karatsuba(a, b, h, out, scratch, base);
    karatsuba(a + h, b + h, hh, out + 2 * h, scratch, base);
    uint64_t *as = scratch;
    uint64_t *bs = scratch + hh;
    uint64_t *mid = scratch + 2 * hh;
    for (size_t k = 0; k < hh; k++) {
        as[k] = a[h + k] ^ (k < h ? a[k] : 0);
        bs[k] = b[h + k] ^ (k < h ? b[k] : 0);
    }
    karatsuba(as, bs, hh, mid, scratch + 4 * hh, base);
    for (size_t k = 0; k < 2 * h; k++) mid[k] ^= out[k];
    for (size_t k = 0; k < 2 * hh; k++) mid[k] ^= out[2 * h + k];
    for (size_t k = 0; k < 2 * hh; k++) out[h + k] ^= mid[k];
}

}  // namespace

bool hardware_clmul_available() {
    static const bool ok = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
    }();
    return ok;
}

std::vector<uint64_t> gf2_multiply(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    size_t L = std::max(a.size(), b.size());
    std::vector<uint64_t> out(a.size() + b.size());
    if (L == 0) return out;
    std::vector<uint64_t> pa(L, 0), pb(L, 0), prod(2 * L);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());
    std::vector<uint64_t> scratch(scratch_words(L));
    karatsuba(pa.data(), pb.data(), L, prod.data(), scratch.data(), pick_basecase());
    std::copy(prod.begin(), prod.begin() + out.size(), out.begin());
    return out;
}

void ToeplitzSpec::validate() const {
    std::ostringstream ss;
    if (n == 0 || m == 0) {
        ss << "Toeplitz dimensions must be positive (n = " << n << ", m = " << m << ")";
    } else if (m > n) {
        ss << "Toeplitz output length m = " << m << " exceeds input length n = " << n;
    } else if (seed.size() != m + n - 1) {
        ss << "Toeplitz seed has " << seed.size() << " bits, expected m + n - 1 = " << m + n - 1;
    } else {
        return;
    }
    fail(ErrorCode::invalid_argument, ss.str());
}

uint64_t output_length(double n_raw, double R, double eps_ext) {
    if (!(eps_ext > 0 && eps_ext < 1)) {
        fail(ErrorCode::invalid_argument, "eps_ext must lie in (0, 1)");
    }
    if (!(n_raw >= 0) || !(R >= 0) || !std::isfinite(n_raw * R)) {
        fail(ErrorCode::invalid_argument, "raw length and rate must be finite and >= 0");
    }
    double m = std::floor(n_raw * R - 2 * std::log2(1 / eps_ext));
    return m > 0 ? static_cast<uint64_t>(m) : 0;
}

void toeplitz_multiply(std::span<const uint64_t> seed, std::span<const uint64_t> raw, size_t n, size_t m,
                       std::span<uint64_t> out) {
    if (seed.size() < words_for(m + n - 1) || raw.size() < words_for(n) || out.size() < words_for(m)) {
        fail(ErrorCode::invalid_argument, "Toeplitz word buffers too short");
    }
    auto prod = gf2_multiply(seed.first(words_for(m + n - 1)), raw.first(words_for(n)));
    copy_bits(prod, n - 1, m, out.first(words_for(m)));
}

uint64_t toeplitz_small(uint64_t seed, uint64_t raw, unsigned n, unsigned m) {
    // Product bits n-1 .. n+m-2 only need raw bit j against seed bits >= n-1-j.
    uint64_t acc = 0;
    for (unsigned j = 0; j < n; j++) {
        uint64_t mask = -((raw >> j) & 1);
        acc ^= (seed >> (n - 1 - j)) & mask;
    }
    return m >= 64 ? acc : acc & ((uint64_t{1} << m) - 1);
}

BitVector extract_rows(const BitVector &raw, const ToeplitzSpec &spec, size_t row_begin, size_t row_end) {
    spec.validate();
    if (raw.size() != spec.n) {
        std::ostringstream ss;
        ss << "raw input has " << raw.size() << " bits, Toeplitz spec expects n = " << spec.n;
        fail(ErrorCode::invalid_argument, ss.str());
    }
    if (row_begin > row_end || row_end > spec.m) {
        fail(ErrorCode::invalid_argument, "row range out of bounds");
    }
    size_t rows = row_end - row_begin;
    BitVector out(rows);
    if (rows == 0) return out;
    // Rows [b, e) form the Toeplitz matrix of seed bits [b, e + n - 1).
    std::vector<uint64_t> sub(words_for(rows + spec.n - 1));
    copy_bits(spec.seed.words(), row_begin, rows + spec.n - 1, sub);
    toeplitz_multiply(sub, raw.words(), spec.n, rows, out.mutable_words());
    return out;
}

BitVector extract(const BitVector &raw, const ToeplitzSpec &spec, unsigned threads) {
    if (threads <= 1 || spec.m < 2 * 64) {
        return extract_rows(raw, spec, 0, spec.m);
    }
    size_t parts = std::min<size_t>(threads, spec.m / 64);
    std::vector<std::future<BitVector>> jobs;
    for (size_t k = 0; k < parts; k++) {
        size_t b = spec.m * k / parts;
        size_t e = spec.m * (k + 1) / parts;
        jobs.push_back(std::async(std::launch::async, [&, b, e] { return extract_rows(raw, spec, b, e); }));
    }
    BitVector out;
    out.reserve(spec.m);
    for (auto &j : jobs) out.append(j.get());
    return out;
}

std::string_view seed_mode_name(SeedMode mode) {
    return mode == SeedMode::Reuse ? "reuse" : "per-block";
}

SeedMode parse_seed_mode(std::string_view name) {
    if (name == "reuse") return SeedMode::Reuse;
    if (name == "per-block" || name == "per_block") return SeedMode::PerBlock;
    fail(ErrorCode::invalid_argument, "unknown extractor seed mode '" + std::string(name) + "'");
}

uint64_t BlockPlan::seed_bits() const {
    if (block_m == 0 || blocks == 0) return 0;
    uint64_t per = block_m + block_n - 1;
    return mode == SeedMode::Reuse ? per : per * blocks;
}

BlockPlan plan_blocks(uint64_t raw_bits, uint64_t block_n, double R, double eps_ext, SeedMode mode) {
    if (block_n == 0) {
        fail(ErrorCode::invalid_argument, "extractor block length must be positive");
    }
    BlockPlan plan;
    plan.mode = mode;
    plan.block_n = std::min(block_n, raw_bits);
    if (plan.block_n == 0) return plan;
    plan.blocks = raw_bits / plan.block_n;
    plan.discarded_bits = raw_bits - plan.blocks * plan.block_n;
    plan.block_m = std::min<uint64_t>(output_length(static_cast<double>(plan.block_n), R, eps_ext), plan.block_n);
    return plan;
}

BitVector read_seed_bits(SeedSource &seed, uint64_t bits) {
    if (auto left = seed.remaining(); left && *left < bits) {
        std::ostringstream ss;
        ss << "extractor seed needs " << bits << " bits, source holds " << *left;
        fail(ErrorCode::seed_exhausted, ss.str());
    }
    BitVector out(bits);
    for (uint64_t i = 0; i < bits; i++) out.set(i, seed.read(1));
    return out;
}

Extraction extract_blocks(const BitVector &raw, const BlockPlan &plan, SeedSource &seed, unsigned threads) {
    if (plan.block_m == 0 || plan.blocks == 0) {
        fail(ErrorCode::nothing_to_extract, "certified output length is zero; nothing to extract");
    }
    if (plan.blocks * plan.block_n + plan.discarded_bits != raw.size()) {
        fail(ErrorCode::invalid_argument, "block plan does not match the raw input length");
    }
    Extraction ex;
    ex.plan = plan;
    uint64_t before = seed.consumed();
    uint64_t seed_len = plan.block_m + plan.block_n - 1;
    std::vector<BitVector> seeds;
    seeds.push_back(read_seed_bits(seed, seed_len));
    if (plan.mode == SeedMode::PerBlock) {
        for (uint64_t b = 1; b < plan.blocks; b++) seeds.push_back(read_seed_bits(seed, seed_len));
    }
    ex.seed_bits_consumed = seed.consumed() - before;

    auto run = [&](uint64_t b) {
        ToeplitzSpec spec{plan.block_n, plan.block_m, seeds[plan.mode == SeedMode::PerBlock ? b : 0]};
        return extract_rows(raw.slice(b * plan.block_n, plan.block_n), spec, 0, plan.block_m);
    };
    ex.output.reserve(plan.output_bits());
    unsigned width = std::max(1u, threads);
    for (uint64_t b0 = 0; b0 < plan.blocks; b0 += width) {
        uint64_t b1 = std::min<uint64_t>(plan.blocks, b0 + width);
        if (width == 1) {
            ex.output.append(run(b0));
            continue;
        }
        std::vector<std::future<BitVector>> jobs;
        for (uint64_t b = b0; b < b1; b++) jobs.push_back(std::async(std::launch::async, run, b));
        for (auto &j : jobs) ex.output.append(j.get());
    }
    return ex;
}

}  // namespace mdiqrng
