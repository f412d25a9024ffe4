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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nbv {

// MSB-first bit writer. Bytes are zero padded only by align().
class BitWriter {
 public:
  void write_bits(std::uint32_t value, int n);
  void write_bit(bool bit) { write_bits(bit ? 1u : 0u, 1); }
  // Zero-pad to the next byte boundary.
  void align();
  void append(const BitWriter& other);

  std::uint64_t bit_count() const { return bits_; }
  bool aligned() const { return bits_ % 8 == 0; }
  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> take() { bits_ = 0; return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

  // Throws StreamError when fewer than n bits remain.
  std::uint32_t read_bits(int n);
  bool read_bit() { return read_bits(1) != 0; }
  void align();

  std::uint64_t position() const { return pos_; }
  std::uint64_t bits_left() const { return data_.size() * 8 - pos_; }
  bool at_end() const { return pos_ == data_.size() * 8; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t pos_ = 0;
};

// Unsigned exp-Golomb: (bits(v+1)-1) zeros, then v+1 in binary.
void write_ue(BitWriter& w, std::uint32_t v);
std::uint32_t read_ue(BitReader& r);

// Signed exp-Golomb: 0 -> 0, v > 0 -> 2v-1, v < 0 -> -2v, then ue.
void write_se(BitWriter& w, std::int32_t v);
std::int32_t read_se(BitReader& r);

int ue_length(std::uint32_t v);
int se_length(std::int32_t v);

}  // namespace nbv
