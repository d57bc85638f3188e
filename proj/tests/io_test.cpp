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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mdiqrng/bits.hpp"
#include "mdiqrng/config.hpp"
#include "mdiqrng/error.hpp"
#include "mdiqrng/records.hpp"
#include "support.hpp"

using namespace mdiqrng;
namespace fs = std::filesystem;

namespace {

class TempDir {
   public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("mdiqrng_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string file(const std::string &name) const {
        return (path_ / name).string();
    }

   private:
    static inline int counter_ = 0;
    fs::path path_;
};

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    return ErrorCode::ok;
}

}  // namespace

TEST(bits, string_round_trip_and_order) {
    auto v = BitVector::from_string("1011000011");
    EXPECT_EQ(v.size(), 10u);
    EXPECT_TRUE(v.get(0));
    EXPECT_FALSE(v.get(1));
    EXPECT_EQ(v.to_string(), "1011000011");
    EXPECT_EQ(v.popcount(), 5u);
    EXPECT_EQ(v.to_bytes(), (std::vector<uint8_t>{0x0d, 0x03}));
    EXPECT_THROW(BitVector::from_string("10x"), Error);
}

TEST(bits, slice_append_and_copy_property) {
    std::mt19937_64 rng(81);
    for (int k = 0; k < 300; k++) {
        BitVector v = fixtures::random_bits(rng, 1 + rng() % 700);
        size_t off = rng() % v.size();
        size_t cnt = rng() % (v.size() - off + 1);
        BitVector s = v.slice(off, cnt);
        ASSERT_EQ(s.size(), cnt);
        for (size_t i = 0; i < cnt; i++) ASSERT_EQ(s.get(i), v.get(off + i));
        BitVector joined = v.slice(0, off);
        joined.append(v.slice(off, v.size() - off));
        EXPECT_EQ(joined, v);
        BitVector pushed;
        for (size_t i = 0; i < v.size(); i++) pushed.push_back(v.get(i));
        EXPECT_EQ(pushed, v);
        EXPECT_EQ(BitVector::from_bytes(v.to_bytes(), v.size()), v);
    }
    EXPECT_THROW(BitVector(10).slice(5, 6), Error);
}

TEST(bits, resize_clears_tail) {
    BitVector v = BitVector::from_string("1111111111");
    v.resize(3);
    v.resize(10);
    EXPECT_EQ(v.to_string(), "1110000000");
    EXPECT_EQ(v.popcount(), 3u);
}

TEST(records, round_trip) {
    TempDir dir;
    ExpandedSeed seed(3);
    auto b = build_schedule(seed, 100003, 4000, 17);
    auto recs = simulate_all(b.schedule, HonestDevice{SourceModel{0.5, 0.5, 1e-3, 0.01}}, 9);
    {
        RecordWriter w(dir.file("r.mdqr"), recs.size());
        std::span<const TrialRecord> all(recs);
        w.write(all.subspan(0, 777));
        w.write(all.subspan(777));
        w.finish();
    }
    auto rf = read_records(dir.file("r.mdqr"));
    EXPECT_EQ(rf.trials, recs.size());
    EXPECT_EQ(rf.tests, b.schedule.tests());
    for (size_t i = 0; i < recs.size(); i++) {
        ASSERT_EQ(rf.test_flags.get(i), recs[i].is_test);
        ASSERT_EQ(rf.outcomes.get(i), recs[i].outcome == 1);
    }
    auto t = tally_records(rf);
    auto direct = tally(recs);
    EXPECT_EQ(t.counts, direct.counts);
    EXPECT_EQ(t.generation_turns, direct.generation_turns);
    auto gen = generation_bits(rf);
    EXPECT_EQ(gen.size(), b.schedule.generation_count());
    uint64_t ones = 0;
    for (const auto &r : recs) ones += !r.is_test && r.outcome;
    EXPECT_EQ(gen.popcount(), ones);

    auto bytes = read_file(dir.file("r.mdqr"));
    EXPECT_EQ(bytes.size(), kRecordHeaderBytes + (recs.size() + 3) / 4 + 8 + 9 * 4000);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MDQR");
}

TEST(records, rejects_bad_files) {
    TempDir dir;
    write_file(dir.file("bad"), "XXXX0000000000000000");
    EXPECT_EQ(code_of([&] { read_records(dir.file("bad")); }), ErrorCode::format);
    EXPECT_EQ(code_of([&] { read_records(dir.file("missing")); }), ErrorCode::io);
    {
        RecordWriter w(dir.file("short.mdqr"), 10);
        std::vector<TrialRecord> few(3);
        for (uint64_t i = 0; i < 3; i++) few[i].index = i;
        w.write(few);
        EXPECT_EQ(code_of([&] { w.finish(); }), ErrorCode::format);
    }
    {
        RecordWriter w(dir.file("ok.mdqr"), 8);
        std::vector<TrialRecord> all(8);
        for (uint64_t i = 0; i < 8; i++) all[i].index = i;
        w.write(all);
        w.finish();
    }
    auto bytes = read_file(dir.file("ok.mdqr"));
    write_file(dir.file("trunc.mdqr"), std::string(bytes.begin(), bytes.end() - 1));
    EXPECT_EQ(code_of([&] { read_records(dir.file("trunc.mdqr")); }), ErrorCode::format);
}

TEST(records, bit_files_hold_whole_bytes) {
    TempDir dir;
    BitVector v = BitVector::from_string("10110011" "0101");
    EXPECT_EQ(write_bits(dir.file("b.bin"), v), 8u);
    EXPECT_EQ(read_bits(dir.file("b.bin")).to_string(), "10110011");
    EXPECT_EQ(read_file(dir.file("b.bin")), (std::vector<uint8_t>{0xcd}));
}

TEST(config, defaults_and_overrides) {
    Config c;
    EXPECT_EQ(c.get("device.mu"), "0.06");
    EXPECT_DOUBLE_EQ(c.get_double("extract.epsilon"), 0x1p-100);
    EXPECT_EQ(c.get_u64("protocol.test_trials"), 262144u);
    EXPECT_FALSE(c.is_set("protocol.schedule_seed"));
    c.set("protocol.schedule_seed", "42");
    EXPECT_TRUE(c.is_set("protocol.schedule_seed"));
    EXPECT_EQ(code_of([&] { c.set("protocol.nonsense", "1"); }), ErrorCode::invalid_argument);
    EXPECT_NO_THROW(c.validate());
    for (const auto &k : config_keys()) {
        EXPECT_NE(std::string(k.name).find('.'), std::string::npos);
        EXPECT_EQ(find_config_key(k.name), &k);
    }
}

TEST(config, count_and_real_parsing) {
    EXPECT_EQ(parse_count("2^34", "x"), uint64_t{1} << 34);
    EXPECT_EQ(parse_count(" 1e8 ", "x"), 100000000u);
    EXPECT_EQ(parse_count("32768", "x"), 32768u);
    EXPECT_THROW(parse_count("-1", "x"), Error);
    EXPECT_THROW(parse_count("1.5", "x"), Error);
    EXPECT_THROW(parse_count("2^64", "x"), Error);
    EXPECT_DOUBLE_EQ(parse_real("0x1p-100", "x"), 0x1p-100);
    EXPECT_THROW(parse_real("nan", "x"), Error);
    EXPECT_THROW(parse_real("1e5x", "x"), Error);
}

TEST(config, load_file) {
    TempDir dir;
    write_file(dir.file("a.ini"),
               "; comment\n[protocol]\ntrials = 2^20 ; inline\nposition_bits = 20\n\n[device]\nmu = 0.1 # note\n");
    Config c;
    c.load_file(dir.file("a.ini"));
    EXPECT_EQ(c.get_u64("protocol.trials"), uint64_t{1} << 20);
    EXPECT_DOUBLE_EQ(c.get_double("device.mu"), 0.1);
    EXPECT_NO_THROW(c.validate());

    write_file(dir.file("unknown.ini"), "[device]\ncolour = blue\n");
    EXPECT_EQ(code_of([&] { Config().load_file(dir.file("unknown.ini")); }), ErrorCode::invalid_argument);
    write_file(dir.file("top.ini"), "trials = 5\n");
    EXPECT_EQ(code_of([&] { Config().load_file(dir.file("top.ini")); }), ErrorCode::format);
    EXPECT_EQ(code_of([&] { Config().load_file(dir.file("none.ini")); }), ErrorCode::io);
}

TEST(config, validation_rules) {
    auto bad = [](const char *key, const char *value) {
        Config c;
        c.set(key, value);
        return code_of([&] { c.validate(); });
    };
    EXPECT_EQ(bad("protocol.position_bits", "64"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("protocol.position_bits", "10"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("protocol.test_trials", "2e7"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("device.eta", "1.5"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("device.kind", "quantum"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("certify.functional", "renyi"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("certify.mu_max", "2"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("extract.epsilon", "0"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("extract.seed_mode", "never"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("test.block_len", "20000"), ErrorCode::invalid_argument);
    EXPECT_EQ(bad("certify.mu_scan", "maybe"), ErrorCode::invalid_argument);
}
