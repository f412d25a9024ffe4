// Copyright 2026 The NBV Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nbv/bit_io.hpp"

#include <bit>
#include <climits>
#include <cstdint>
#include <string>

#include "nbv/error.hpp"

namespace nbv {

void BitWriter::write_bits(std::uint32_t value, int n) {
  if (n < 0 || n > 32) throw UsageError("write_bits: width out of range");
  if (n < 32 && (value >> n) != 0) throw UsageError("write_bits: value does not fit");
  for (int i = n - 1; i >= 0; --i) {
    if (bits_ % 8 == 0) buf_.push_back(0);
    if ((value >> i) & 1u) buf_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
    ++bits_;
  }
}

void BitWriter::align() {
  while (bits_ % 8 != 0) write_bit(false);
}

void BitWriter::append(const BitWriter& other) {
  std::uint64_t left = other.bits_;
  for (std::uint8_t byte : other.buf_) {
    const int n = left >= 8 ? 8 : static_cast<int>(left);
    write_bits(static_cast<std::uint32_t>(byte) >> (8 - n), n);
    left -= n;
  }
}

std::uint32_t BitReader::read_bits(int n) {
  if (n < 0 || n > 32) throw UsageError("read_bits: width out of range");
  if (static_cast<std::uint64_t>(n) > bits_left())
    throw StreamError("read past end of data at bit " + std::to_string(pos_));
  std::uint32_t v = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint8_t byte = data_[pos_ / 8];
    v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
    ++pos_;
  }
  return v;
}

void BitReader::align() {
  const std::uint64_t pad = (8 - pos_ % 8) % 8;
  if (pad > bits_left()) throw StreamError("read past end of data");
  pos_ += pad;
}

int ue_length(std::uint32_t v) {
  const std::uint64_t code = static_cast<std::uint64_t>(v) + 1;
  return 2 * (std::bit_width(code) - 1) + 1;
}

int se_length(std::int32_t v) {
  const std::int64_t x = v;
  return ue_length(static_cast<std::uint32_t>(x > 0 ? 2 * x - 1 : -2 * x));
}

void write_ue(BitWriter& w, std::uint32_t v) {
  // 32 leading zeros would be rejected by read_ue.
  if (v == 0xFFFFFFFFu) throw UsageError("exp-Golomb value out of range");
  const std::uint64_t code = static_cast<std::uint64_t>(v) + 1;
  const int len = std::bit_width(code);
  w.write_bits(0, len - 1);
  w.write_bits(static_cast<std::uint32_t>(code), len);
}

std::uint32_t read_ue(BitReader& r) {
  int zeros = 0;
  while (!r.read_bit()) {
    if (++zeros >= 32) throw StreamError("malformed exp-Golomb prefix");
  }
  const std::uint64_t code = (std::uint64_t{1} << zeros) | r.read_bits(zeros);
  return static_cast<std::uint32_t>(code - 1);
}

void write_se(BitWriter& w, std::int32_t v) {
  const std::int64_t x = v;
  if (x == INT32_MIN) throw UsageError("exp-Golomb value out of range");
  write_ue(w, static_cast<std::uint32_t>(x > 0 ? 2 * x - 1 : -2 * x));
}

std::int32_t read_se(BitReader& r) {
  const std::uint32_t k = read_ue(r);
  if (k % 2 == 1) return static_cast<std::int32_t>((k + 1) / 2);
  return -static_cast<std::int32_t>(k / 2);
}

}  // namespace nbv
