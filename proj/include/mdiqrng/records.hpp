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

#ifndef MDIQRNG_RECORDS_HPP
#define MDIQRNG_RECORDS_HPP

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mdiqrng/bits.hpp"
#include "mdiqrng/protocol.hpp"
#include "mdiqrng/tomography.hpp"

namespace mdiqrng {

// Trial record file, all integers little-endian:
//   bytes 0-3   magic "MDQR"
//   bytes 4-7   u32 version (1)
//   bytes 8-15  u64 trial count T
//   ceil(T/4) bytes of 2-bit trial codes, trial t in byte t/4 at bits 2(t%4)..2(t%4)+1:
//               low bit = test flag, high bit = recorded outcome
//   u64 test count K, then K entries of (u64 position, u8 state index), ascending.
constexpr uint32_t kRecordVersion = 1;
constexpr size_t kRecordHeaderBytes = 16;

class RecordWriter {
   public:
    RecordWriter(const std::string &path, uint64_t total_trials);
    ~RecordWriter();
    RecordWriter(const RecordWriter &) = delete;
    RecordWriter &operator=(const RecordWriter &) = delete;

    /// Records must arrive in index order.
    void write(std::span<const TrialRecord> records);
    /// Writes the side table; throws Error(format) if fewer than T trials arrived.
    void finish();

   private:
    void flush_byte();

    std::ofstream out_;
    std::string path_;
    uint64_t total_;
    uint64_t written_ = 0;
    uint8_t pending_ = 0;
    std::vector<TestSlot> tests_;
    bool finished_ = false;
};

struct RecordFile {
    uint64_t trials = 0;
    BitVector test_flags;
    BitVector outcomes;
    std::vector<TestSlot> tests;
};

/// Throws Error(io) when unreadable and Error(format) on any structural mismatch.
RecordFile read_records(const std::string &path);

TestTally tally_records(const RecordFile &records);
/// Outcome bits of the generation trials in trial order.
BitVector generation_bits(const RecordFile &records);

/// Raw bit files: little-endian packed bytes, bit i at byte i/8 position i%8.
/// Only whole bytes are written; a trailing partial byte is dropped.
uint64_t write_bits(const std::string &path, const BitVector &bits);
BitVector read_bits(const std::string &path);

std::vector<uint8_t> read_file(const std::string &path);
void write_file(const std::string &path, std::string_view contents);

}  // namespace mdiqrng

#endif
