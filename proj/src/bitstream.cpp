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

#include "nbv/bitstream.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "nbv/error.hpp"

namespace nbv {
namespace {

void add(BitBreakdown* acct, BitCategory cat, std::uint64_t bits) {
  if (acct != nullptr) (*acct)[cat] += bits;
}

std::int32_t sign_extend_10(std::uint32_t v) {
  return (v & 0x200u) ? static_cast<std::int32_t>(v) - 1024 : static_cast<std::int32_t>(v);
}

MotionVector read_mv(BitReader& r, MotionVector pred) {
  const std::int64_t dx = static_cast<std::int64_t>(pred.dx) + read_se(r);
  const std::int64_t dy = static_cast<std::int64_t>(pred.dy) + read_se(r);
  if (std::abs(dx) > kMaxMvComponent || std::abs(dy) > kMaxMvComponent)
    throw StreamError("motion vector out of range");
  return {static_cast<int>(dx), static_cast<int>(dy)};
}

BlockModeKind mode_from_symbol(std::uint32_t sym, FrameType t) {
  if (t == FrameType::kIntra) {
    if (sym > 2) throw StreamError("invalid intra-frame mode symbol " + std::to_string(sym));
    sym += 1;
  } else if (sym > 3) {
    throw StreamError("invalid mode symbol " + std::to_string(sym));
  }
  static constexpr BlockModeKind kinds[] = {BlockModeKind::kInter, BlockModeKind::kIntraDc,
                                            BlockModeKind::kIntraH, BlockModeKind::kIntraV};
  return kinds[sym];
}

}  // namespace

std::optional<std::string> region_error(std::span<const RegionSpec> regions, GridDims grid) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const RegionSpec& a = regions[i];
    if (a.x0 < 0 || a.y0 < 0 || a.x0 > a.x1 || a.y0 > a.y1 || a.x1 >= grid.cols ||
        a.y1 >= grid.rows)
      return "region " + std::to_string(i) + " outside the block grid";
    for (std::size_t j = 0; j < i; ++j)
      if (a.overlaps(regions[j]))
        return "regions " + std::to_string(j) + " and " + std::to_string(i) + " overlap";
  }
  return std::nullopt;
}

std::vector<int> region_membership(std::span<const RegionSpec> regions, GridDims grid) {
  std::vector<int> member(grid.block_count(), -1);
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (int by = regions[i].y0; by <= regions[i].y1; ++by)
      for (int bx = regions[i].x0; bx <= regions[i].x1; ++bx)
        member[by * grid.cols + bx] = static_cast<int>(i);
  return member;
}

std::string_view mode_name(BlockModeKind k) {
  switch (k) {
    case BlockModeKind::kInter: return "inter";
    case BlockModeKind::kIntraDc: return "intra_dc";
    case BlockModeKind::kIntraH: return "intra_h";
    case BlockModeKind::kIntraV: return "intra_v";
    case BlockModeKind::kGenerate: return "gen";
  }
  return "?";
}

BlockMode BlockMode::intra(IntraMode m) {
  switch (m) {
    case IntraMode::kDc: return {BlockModeKind::kIntraDc, {}};
    case IntraMode::kHorizontal: return {BlockModeKind::kIntraH, {}};
    case IntraMode::kVertical: return {BlockModeKind::kIntraV, {}};
  }
  return {};
}

bool BlockMode::is_intra() const {
  return kind == BlockModeKind::kIntraDc || kind == BlockModeKind::kIntraH ||
         kind == BlockModeKind::kIntraV;
}

IntraMode BlockMode::intra_mode() const {
  if (kind == BlockModeKind::kIntraH) return IntraMode::kHorizontal;
  if (kind == BlockModeKind::kIntraV) return IntraMode::kVertical;
  return IntraMode::kDc;
}

std::uint32_t mode_symbol(BlockModeKind k, FrameType t) {
  if (k == BlockModeKind::kGenerate) throw UsageError("generated blocks carry no mode symbol");
  if (k == BlockModeKind::kInter && t == FrameType::kIntra)
    throw UsageError("inter block in an intra frame");
  const std::uint32_t sym = static_cast<std::uint32_t>(k);  // kInter = 0 ... kIntraV = 3
  return t == FrameType::kIntra ? sym - 1 : sym;
}

std::string_view category_name(BitCategory c) {
  switch (c) {
    case BitCategory::kHeader: return "header";
    case BitCategory::kParams: return "param_sets";
    case BitCategory::kModes: return "regions_and_modes";
    case BitCategory::kMv: return "mvs";
    case BitCategory::kResidual: return "residuals";
  }
  return "?";
}

std::uint64_t BitBreakdown::total() const {
  return std::accumulate(bits.begin(), bits.end(), std::uint64_t{0});
}

BitBreakdown& BitBreakdown::operator+=(const BitBreakdown& o) {
  for (int i = 0; i < kBitCategoryCount; ++i) bits[i] += o.bits[i];
  return *this;
}

void validate_header(const StreamHeader& h) {
  if (h.width < 2 || h.height < 2 || h.width % 2 != 0 || h.height % 2 != 0)
    throw UsageError("stream dimensions must be even and at least 2x2");
  if (h.qp > kMaxQp) throw UsageError("qp outside [0,51]");
  if (h.gnn_interval < 1 || h.gnn_interval > kMaxGnnInterval)
    throw UsageError("gnn interval outside [1,120]");
}

void write_header(BitWriter& w, const StreamHeader& h) {
  validate_header(h);
  for (std::uint8_t b : kStreamMagic) w.write_bits(b, 8);
  w.write_bits(h.width, 16);
  w.write_bits(h.height, 16);
  w.write_bits(h.frame_count, 32);
  w.write_bits(h.qp, 8);
  w.write_bits(h.gnn_enabled ? 1 : 0, 8);
  w.write_bits(h.gnn_interval, 8);
  w.write_bits(0, 8);
}

StreamHeader parse_header(BitReader& r) {
  if (r.bits_left() < kStreamHeaderBytes * 8) throw StreamError("truncated stream header");
  for (std::uint8_t b : kStreamMagic)
    if (r.read_bits(8) != b) throw StreamError("bad magic: not an NBV1 stream");
  StreamHeader h;
  h.width = static_cast<std::uint16_t>(r.read_bits(16));
  h.height = static_cast<std::uint16_t>(r.read_bits(16));
  h.frame_count = r.read_bits(32);
  h.qp = static_cast<std::uint8_t>(r.read_bits(8));
  const std::uint32_t enabled = r.read_bits(8);
  h.gnn_interval = static_cast<std::uint8_t>(r.read_bits(8));
  r.read_bits(8);
  if (enabled > 1) throw StreamError("bad gnn_enabled flag");
  h.gnn_enabled = enabled == 1;
  try {
    validate_header(h);
  } catch (const UsageError& e) {
    throw StreamError(std::string("invalid stream header: ") + e.what());
  }
  return h;
}

void write_param_set(BitWriter& w, const QuantizedGnnParams& q) {
  const GnnArchitecture arch = q.architecture();
  arch.validate_generator();
  w.write_bits(kParamSetTag, 8);
  w.write_bits(static_cast<std::uint32_t>(arch.layer_sizes.size()), 8);
  for (int s : arch.hidden()) w.write_bits(static_cast<std::uint32_t>(s), 16);
  for (const QuantizedLayer& l : q.layers) {
    if (l.values.size() != static_cast<std::size_t>(l.out) * (l.in + 1))
      throw UsageError("quantized layer has wrong value count");
    if (!std::isfinite(l.scale) || !(l.scale > 0.0f))
      throw UsageError("layer scale must be finite and positive");
    w.write_bits(std::bit_cast<std::uint32_t>(l.scale), 32);
    for (std::int16_t v : l.values) {
      if (v < -kQuantMax || v > kQuantMax) throw UsageError("parameter code outside 10-bit range");
      w.write_bits(static_cast<std::uint32_t>(v) & 0x3FFu, 10);
    }
  }
  w.align();
}

QuantizedGnnParams parse_param_set(BitReader& r) {
  if (r.read_bits(8) != kParamSetTag) throw StreamError("expected parameter set unit");
  GnnArchitecture arch;
  const std::uint32_t count = r.read_bits(8);
  if (count < 2 || count > kMaxGnnLayerEntries)
    throw StreamError("architecture layer count " + std::to_string(count) + " exceeds caps");
  arch.layer_sizes.push_back(kGnnInputs);
  for (std::uint32_t i = 0; i + 2 < count; ++i) {
    const std::uint32_t s = r.read_bits(16);
    if (s < 1 || s > kMaxGnnLayerSize)
      throw StreamError("hidden layer size " + std::to_string(s) + " exceeds caps");
    arch.layer_sizes.push_back(static_cast<int>(s));
  }
  arch.layer_sizes.push_back(kGnnOutputs);

  QuantizedGnnParams q;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    QuantizedLayer ql;
    ql.in = arch.layer_sizes[l];
    ql.out = arch.layer_sizes[l + 1];
    const std::size_t n = static_cast<std::size_t>(ql.out) * (ql.in + 1);
    if (r.bits_left() < 32 + 10 * n) throw StreamError("truncated parameter set");
    ql.scale = std::bit_cast<float>(r.read_bits(32));
    if (!std::isfinite(ql.scale) || !(ql.scale > 0.0f))
      throw StreamError("invalid layer scale in parameter set");
    ql.values.resize(n);
    for (std::int16_t& v : ql.values) {
      const std::int32_t x = sign_extend_10(r.read_bits(10));
      if (x < -kQuantMax) throw StreamError("parameter code -512 is not allowed");
      v = static_cast<std::int16_t>(x);
    }
    q.layers.push_back(std::move(ql));
  }
  r.align();
  return q;
}

std::uint64_t param_set_bits(const GnnArchitecture& arch) {
  std::uint64_t bits = 8 + 8 + 16 * arch.hidden().size();
  for (std::size_t c : layer_param_counts(arch)) bits += 32 + 10 * c;
  return (bits + 7) / 8 * 8;
}

void write_block_header(BitWriter& w, const BlockMode& mode, FrameType type,
                        MotionVector mv_pred, BitBreakdown* acct) {
  std::uint64_t start = w.bit_count();
  write_ue(w, mode_symbol(mode.kind, type));
  add(acct, BitCategory::kModes, w.bit_count() - start);
  if (mode.kind == BlockModeKind::kInter) {
    start = w.bit_count();
    write_se(w, mode.mv.dx - mv_pred.dx);
    write_se(w, mode.mv.dy - mv_pred.dy);
    add(acct, BitCategory::kMv, w.bit_count() - start);
  }
}

void validate_frame(const FrameUnit& f, GridDims grid) {
  if (f.blocks.size() != static_cast<std::size_t>(grid.block_count()))
    throw UsageError("frame has " + std::to_string(f.blocks.size()) + " blocks, grid needs " +
                     std::to_string(grid.block_count()));
  if (auto err = region_error(f.regions, grid)) throw UsageError(*err);
  const std::vector<int> member = region_membership(f.regions, grid);
  for (int i = 0; i < grid.block_count(); ++i) {
    const BlockModeKind k = f.blocks[i].mode.kind;
    const int reg = member[i];
    if (k == BlockModeKind::kGenerate && reg < 0)
      throw UsageError("generated block " + std::to_string(i) + " outside every region");
    if (k != BlockModeKind::kGenerate && reg >= 0 && f.regions[reg].kind == RegionKind::kForced)
      throw UsageError("block " + std::to_string(i) + " in a forced region is not generated");
    if (k == BlockModeKind::kInter && f.type == FrameType::kIntra)
      throw UsageError("inter block in an intra frame");
  }
}

void write_frame(BitWriter& w, const FrameUnit& f, GridDims grid, BitBreakdown* acct) {
  validate_frame(f, grid);
  std::uint64_t start = w.bit_count();
  w.write_bits(kFrameTag, 8);
  w.write_bit(f.type == FrameType::kPredicted);
  add(acct, BitCategory::kHeader, w.bit_count() - start);

  start = w.bit_count();
  write_ue(w, static_cast<std::uint32_t>(f.regions.size()));
  for (const RegionSpec& reg : f.regions) {
    write_ue(w, static_cast<std::uint32_t>(reg.x0));
    write_ue(w, static_cast<std::uint32_t>(reg.y0));
    write_ue(w, static_cast<std::uint32_t>(reg.x1));
    write_ue(w, static_cast<std::uint32_t>(reg.y1));
    w.write_bit(reg.kind == RegionKind::kSelectable);
  }
  for (const RegionSpec& reg : f.regions) {
    if (reg.kind != RegionKind::kSelectable) continue;
    for (int by = reg.y0; by <= reg.y1; ++by)
      for (int bx = reg.x0; bx <= reg.x1; ++bx)
        w.write_bit(f.blocks[by * grid.cols + bx].mode.kind == BlockModeKind::kGenerate);
  }
  add(acct, BitCategory::kModes, w.bit_count() - start);

  for (int by = 0; by < grid.rows; ++by) {
    MotionVector pred{};
    for (int bx = 0; bx < grid.cols; ++bx) {
      const CodedBlock& b = f.blocks[by * grid.cols + bx];
      if (b.mode.kind != BlockModeKind::kGenerate) write_block_header(w, b.mode, f.type, pred, acct);
      pred = b.mode.kind == BlockModeKind::kInter ? b.mode.mv : MotionVector{};
      start = w.bit_count();
      write_block_coeffs(w, b.coeffs);
      add(acct, BitCategory::kResidual, w.bit_count() - start);
    }
  }
  start = w.bit_count();
  w.align();
  add(acct, BitCategory::kHeader, w.bit_count() - start);
}

FrameUnit parse_frame(BitReader& r, GridDims grid, BitBreakdown* acct) {
  std::uint64_t start = r.position();
  if (r.read_bits(8) != kFrameTag) throw StreamError("expected frame unit");
  FrameUnit f;
  f.type = r.read_bit() ? FrameType::kPredicted : FrameType::kIntra;
  add(acct, BitCategory::kHeader, r.position() - start);

  start = r.position();
  const std::uint32_t count = read_ue(r);
  if (count > static_cast<std::uint32_t>(grid.block_count()))
    throw StreamError("region count exceeds block count");
  for (std::uint32_t i = 0; i < count; ++i) {
    RegionSpec reg;
    auto coord = [&](int limit) {
      const std::uint32_t v = read_ue(r);
      if (v >= static_cast<std::uint32_t>(limit)) throw StreamError("region outside the block grid");
      return static_cast<int>(v);
    };
    reg.x0 = coord(grid.cols);
    reg.y0 = coord(grid.rows);
    reg.x1 = coord(grid.cols);
    reg.y1 = coord(grid.rows);
    reg.kind = r.read_bit() ? RegionKind::kSelectable : RegionKind::kForced;
    f.regions.push_back(reg);
  }
  if (auto err = region_error(f.regions, grid)) throw StreamError(*err);

  f.blocks.resize(grid.block_count());
  for (const RegionSpec& reg : f.regions) {
    for (int by = reg.y0; by <= reg.y1; ++by)
      for (int bx = reg.x0; bx <= reg.x1; ++bx) {
        const bool gen = reg.kind == RegionKind::kForced || r.read_bit();
        if (gen) f.blocks[by * grid.cols + bx].mode = BlockMode::generate();
      }
  }
  add(acct, BitCategory::kModes, r.position() - start);

  for (int by = 0; by < grid.rows; ++by) {
    MotionVector pred{};
    for (int bx = 0; bx < grid.cols; ++bx) {
      CodedBlock& b = f.blocks[by * grid.cols + bx];
      if (b.mode.kind != BlockModeKind::kGenerate) {
        start = r.position();
        b.mode.kind = mode_from_symbol(read_ue(r), f.type);
        add(acct, BitCategory::kModes, r.position() - start);
        if (b.mode.kind == BlockModeKind::kInter) {
          start = r.position();
          b.mode.mv = read_mv(r, pred);
          add(acct, BitCategory::kMv, r.position() - start);
        }
      }
      pred = b.mode.kind == BlockModeKind::kInter ? b.mode.mv : MotionVector{};
      start = r.position();
      b.coeffs = read_block_coeffs(r);
      add(acct, BitCategory::kResidual, r.position() - start);
    }
  }
  start = r.position();
  r.align();
  add(acct, BitCategory::kHeader, r.position() - start);
  return f;
}

std::vector<std::uint8_t> write_stream(const StreamHeader& h, std::span<const Unit> units,
                                       BitBreakdown* acct) {
  BitWriter w;
  write_header(w, h);
  add(acct, BitCategory::kHeader, w.bit_count());
  const GridDims grid = h.grid();
  std::uint32_t frames = 0;
  for (const Unit& u : units) {
    if (const auto* ps = std::get_if<ParamSetUnit>(&u)) {
      const std::uint64_t start = w.bit_count();
      write_param_set(w, ps->params);
      add(acct, BitCategory::kParams, w.bit_count() - start);
    } else {
      write_frame(w, std::get<FrameUnit>(u), grid, acct);
      ++frames;
    }
  }
  if (frames != h.frame_count)
    throw UsageError("header declares " + std::to_string(h.frame_count) + " frames, got " +
                     std::to_string(frames));
  return w.take();
}

StreamParser::StreamParser(std::span<const std::uint8_t> bytes) : bytes_(bytes), reader_(bytes) {
  header_ = parse_header(reader_);
  acct_[BitCategory::kHeader] += reader_.position();
}

std::optional<Unit> StreamParser::next() {
  if (reader_.at_end()) {
    if (frames_ != header_.frame_count)
      throw StreamError("stream ends after " + std::to_string(frames_) + " of " +
                        std::to_string(header_.frame_count) + " frames");
    return std::nullopt;
  }
  const std::uint8_t tag = bytes_[reader_.position() / 8];
  const std::uint64_t start = reader_.position();
  if (tag == kParamSetTag) {
    ParamSetUnit u{parse_param_set(reader_)};
    acct_[BitCategory::kParams] += reader_.position() - start;
    return u;
  }
  if (tag == kFrameTag) {
    if (frames_ == header_.frame_count) throw StreamError("more frames than the header declares");
    FrameUnit f = parse_frame(reader_, header_.grid(), &acct_);
    ++frames_;
    return f;
  }
  throw StreamError("unknown unit tag " + std::to_string(tag));
}

ParsedStream parse_stream(std::span<const std::uint8_t> bytes) {
  StreamParser parser(bytes);
  ParsedStream out;
  out.header = parser.header();
  while (auto u = parser.next()) out.units.push_back(std::move(*u));
  out.breakdown = parser.breakdown();
  return out;
}

}  // namespace nbv
