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

#include "mdiqrng/records.hpp"

#include <cstring>
#include <iterator>
#include <sstream>

#include "mdiqrng/error.hpp"

namespace mdiqrng {

namespace {

void put_u64(std::ostream &out, uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; i++) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 8);
}

uint64_t get_u64(const std::vector<uint8_t> &buf, size_t at) {
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= uint64_t{buf[at + i]} << (8 * i);
    return v;
}

}  // namespace

RecordWriter::RecordWriter(const std::string &path, uint64_t total_trials)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), total_(total_trials) {
    if (!out_) {
        fail(ErrorCode::io, "cannot open record file for writing: " + path);
    }
    out_.write("MDQR", 4);
    char v[4];
    for (int i = 0; i < 4; i++) v[i] = static_cast<char>(kRecordVersion >> (8 * i));
    out_.write(v, 4);
    put_u64(out_, total_trials);
}

RecordWriter::~RecordWriter() = default;

void RecordWriter::write(std::span<const TrialRecord> records) {
    for (const auto &r : records) {
        if (r.index != written_ || written_ >= total_) {
            fail(ErrorCode::format, "trial records out of order or beyond the declared count");
        }
        uint8_t code = static_cast<uint8_t>((r.is_test ? 1 : 0) | ((r.outcome & 1) << 1));
        pending_ |= static_cast<uint8_t>(code << (2 * (written_ % 4)));
        if (r.is_test) tests_.push_back({r.index, r.state});
        written_++;
        if (written_ % 4 == 0) flush_byte();
    }
}

void RecordWriter::flush_byte() {
    out_.put(static_cast<char>(pending_));
    pending_ = 0;
}

void RecordWriter::finish() {
    if (finished_) return;
    if (written_ != total_) {
        std::ostringstream ss;
        ss << "record file declared " << total_ << " trials but received " << written_;
        fail(ErrorCode::format, ss.str());
    }
    if (written_ % 4) flush_byte();
    put_u64(out_, tests_.size());
    for (const auto &t : tests_) {
        put_u64(out_, t.position);
        out_.put(static_cast<char>(state_index(t.state)));
    }
    out_.flush();
    if (!out_) {
        fail(ErrorCode::io, "write failed: " + path_);
    }
    finished_ = true;
}

std::vector<uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot open file: " + path);
    }
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string &path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        fail(ErrorCode::io, "cannot write file: " + path);
    }
}

RecordFile read_records(const std::string &path) {
    auto buf = read_file(path);
    auto bad = [&](const std::string &what) { fail(ErrorCode::format, path + ": " + what); };
    if (buf.size() < kRecordHeaderBytes || std::memcmp(buf.data(), "MDQR", 4) != 0) {
        bad("not a trial record file (bad magic)");
    }
    uint32_t version = 0;
    for (int i = 0; i < 4; i++) version |= uint32_t{buf[4 + i]} << (8 * i);
    if (version != kRecordVersion) {
        bad("unsupported record version " + std::to_string(version));
    }
    RecordFile rf;
    rf.trials = get_u64(buf, 8);
    size_t body = (rf.trials + 3) / 4;
    if (rf.trials > buf.size() * 4 || buf.size() < kRecordHeaderBytes + body + 8) {
        bad("truncated trial codes");
    }
    rf.test_flags = BitVector(rf.trials);
    rf.outcomes = BitVector(rf.trials);
    uint64_t flagged = 0;
    for (uint64_t t = 0; t < rf.trials; t++) {
        uint8_t code = (buf[kRecordHeaderBytes + t / 4] >> (2 * (t % 4))) & 3;
        if (code & 1) {
            rf.test_flags.set(t, true);
            flagged++;
        }
        if (code & 2) rf.outcomes.set(t, true);
    }
    size_t at = kRecordHeaderBytes + body;
    uint64_t k = get_u64(buf, at);
    at += 8;
    if (k != flagged || buf.size() != at + k * 9) {
        bad("side table does not match the flagged test trials");
    }
    rf.tests.reserve(k);
    for (uint64_t i = 0; i < k; i++, at += 9) {
        uint64_t pos = get_u64(buf, at);
        uint8_t s = buf[at + 8];
        if (s > 3 || pos >= rf.trials || !rf.test_flags.get(pos) || (i && pos <= rf.tests.back().position)) {
            bad("invalid side table entry " + std::to_string(i));
        }
        rf.tests.push_back({pos, kAllTestStates[s]});
    }
    return rf;
}

TestTally tally_records(const RecordFile &records) {
    std::array<StateCount, 4> counts{};
    for (const auto &t : records.tests) {
        auto &c = counts[state_index(t.state)];
        c.trials++;
        c.ones += records.outcomes.get(t.position);
    }
    return TestTally::from_counts(counts, records.trials - records.tests.size());
}

BitVector generation_bits(const RecordFile &records) {
    BitVector out;
    out.reserve(records.trials - records.tests.size());
    const auto &flags = records.test_flags.words();
    const auto &bits = records.outcomes.words();
    for (size_t w = 0; w < flags.size(); w++) {
        uint64_t gen = ~flags[w];
        size_t limit = std::min<uint64_t>(64, records.trials - 64 * w);
        if (gen == ~uint64_t{0} && limit == 64) {
            out.append(BitVector::from_words({bits[w]}, 64));
            continue;
        }
        for (size_t i = 0; i < limit; i++) {
            if ((gen >> i) & 1) out.push_back((bits[w] >> i) & 1);
        }
    }
    return out;
}

uint64_t write_bits(const std::string &path, const BitVector &bits) {
    auto bytes = bits.to_bytes();
    bytes.resize(bits.size() / 8);
    write_file(path, std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
    return bytes.size() * 8;
}

BitVector read_bits(const std::string &path) {
    auto buf = read_file(path);
    return BitVector::from_bytes(buf, buf.size() * 8);
}

}  // namespace mdiqrng
