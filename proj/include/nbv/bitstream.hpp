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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nbv/bit_io.hpp"
#include "nbv/frame.hpp"
#include "nbv/gnn.hpp"
#include "nbv/prediction.hpp"
#include "nbv/residual.hpp"

namespace nbv {

inline constexpr std::array<std::uint8_t, 4> kStreamMagic = {'N', 'B', 'V', '1'};
inline constexpr int kStreamHeaderBytes = 16;
inline constexpr int kMaxGnnInterval = 120;
inline constexpr std::uint8_t kParamSetTag = 0x01;
inline constexpr std::uint8_t kFrameTag = 0x02;
// Decoded motion vector components beyond this are rejected.
inline constexpr int kMaxMvComponent = 65535;

// 16 bytes: magic, width u16, height u16, frame_count u32, qp u8,
// gnn_enabled u8, gnn_interval u8, one reserved zero byte. Big-endian.
// Width and height are the display size before block padding.
struct StreamHeader {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint32_t frame_count = 0;
  std::uint8_t qp = 0;
  bool gnn_enabled = false;
  std::uint8_t gnn_interval = 1;

  GridDims grid() const { return block_grid_dims(width, height); }
  bool operator==(const StreamHeader&) const = default;
};

enum class RegionKind : std::uint8_t { kForced = 0, kSelectable = 1 };

// Inclusive rectangle of block indices.
struct RegionSpec {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  RegionKind kind = RegionKind::kSelectable;

  bool contains(BlockCoord c) const { return c.bx >= x0 && c.bx <= x1 && c.by >= y0 && c.by <= y1; }
  int block_count() const { return (x1 - x0 + 1) * (y1 - y0 + 1); }
  bool overlaps(const RegionSpec& o) const {
    return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
  bool operator==(const RegionSpec&) const = default;
};

// Description of the first out-of-grid or overlapping region, if any.
std::optional<std::string> region_error(std::span<const RegionSpec> regions, GridDims grid);
// Region index per block in raster order, -1 outside every region.
std::vector<int> region_membership(std::span<const RegionSpec> regions, GridDims grid);

enum class FrameType : std::uint8_t { kIntra = 0, kPredicted = 1 };

enum class BlockModeKind : std::uint8_t { kInter, kIntraDc, kIntraH, kIntraV, kGenerate };

std::string_view mode_name(BlockModeKind k);

struct BlockMode {
  BlockModeKind kind = BlockModeKind::kIntraDc;
  MotionVector mv;  // meaningful for kInter only

  static BlockMode inter(MotionVector mv) { return {BlockModeKind::kInter, mv}; }
  static BlockMode intra(IntraMode m);
  static BlockMode generate() { return {BlockModeKind::kGenerate, {}}; }

  bool is_intra() const;
  IntraMode intra_mode() const;
  bool operator==(const BlockMode&) const = default;
};

// Wire mode symbol for a non-generated block.
std::uint32_t mode_symbol(BlockModeKind k, FrameType t);

struct CodedBlock {
  BlockMode mode;
  BlockCoeffs coeffs{};
  bool operator==(const CodedBlock&) const = default;
};

struct FrameUnit {
  FrameType type = FrameType::kIntra;
  std::vector<RegionSpec> regions;
  // One entry per block in frame raster order. Selection bits are implied by
  // which blocks of Selectable regions carry kGenerate.
  std::vector<CodedBlock> blocks;
  bool operator==(const FrameUnit&) const = default;
};

struct ParamSetUnit {
  QuantizedGnnParams params;
  bool operator==(const ParamSetUnit&) const = default;
};

using Unit = std::variant<ParamSetUnit, FrameUnit>;

enum class BitCategory : int { kHeader, kParams, kModes, kMv, kResidual };
inline constexpr int kBitCategoryCount = 5;

std::string_view category_name(BitCategory c);

struct BitBreakdown {
  std::array<std::uint64_t, kBitCategoryCount> bits{};

  std::uint64_t& operator[](BitCategory c) { return bits[static_cast<int>(c)]; }
  std::uint64_t operator[](BitCategory c) const { return bits[static_cast<int>(c)]; }
  std::uint64_t total() const;
  BitBreakdown& operator+=(const BitBreakdown& o);
  bool operator==(const BitBreakdown&) const = default;
};

void write_header(BitWriter& w, const StreamHeader& h);
StreamHeader parse_header(BitReader& r);

// Unit tag, architecture descriptor (8-bit size count, 16-bit hidden sizes),
// then per layer a big-endian float32 scale and 10-bit two's-complement
// values, weights row-major then biases. Byte aligned at the end.
void write_param_set(BitWriter& w, const QuantizedGnnParams& q);
QuantizedGnnParams parse_param_set(BitReader& r);
std::uint64_t param_set_bits(const GnnArchitecture& arch);

// Mode symbol, motion vector difference and coefficients of one
// non-generated block. The MV predictor is the left neighbour's MV when it is
// inter coded, else (0, 0).
void write_block_header(BitWriter& w, const BlockMode& mode, FrameType type,
                        MotionVector mv_pred, BitBreakdown* acct = nullptr);

void write_frame(BitWriter& w, const FrameUnit& f, GridDims grid, BitBreakdown* acct = nullptr);
FrameUnit parse_frame(BitReader& r, GridDims grid, BitBreakdown* acct = nullptr);

// Throws UsageError on a structurally invalid frame (mode/region mismatch).
void validate_frame(const FrameUnit& f, GridDims grid);

std::vector<std::uint8_t> write_stream(const StreamHeader& h, std::span<const Unit> units,
                                       BitBreakdown* acct = nullptr);

void validate_header(const StreamHeader& h);

// Sequential unit reader over a complete NBV1 byte stream.
class StreamParser {
 public:
  explicit StreamParser(std::span<const std::uint8_t> bytes);

  const StreamHeader& header() const { return header_; }
  // Next unit, or nullopt at a clean end of stream.
  std::optional<Unit> next();
  const BitBreakdown& breakdown() const { return acct_; }
  std::uint32_t frames_parsed() const { return frames_; }

 private:
  std::span<const std::uint8_t> bytes_;
  BitReader reader_;
  StreamHeader header_;
  BitBreakdown acct_;
  std::uint32_t frames_ = 0;
};

struct ParsedStream {
  StreamHeader header;
  std::vector<Unit> units;
  BitBreakdown breakdown;
};

ParsedStream parse_stream(std::span<const std::uint8_t> bytes);

}  // namespace nbv
