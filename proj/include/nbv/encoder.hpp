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
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "nbv/bitstream.hpp"
#include "nbv/frame.hpp"
#include "nbv/gnn.hpp"
#include "nbv/metrics.hpp"

namespace nbv {

struct SequenceConfig {
  int width = 0;  // display size; frames are padded to whole blocks
  int height = 0;
  int frame_count = 0;
  int qp = 32;
  // Frames per parameter-set period. Every period opens with an I frame,
  // with or without generation, so this is also the keyframe interval.
  int gnn_interval = 16;
  bool gnn_enabled = true;
  GnnArchitecture gnn_arch = GnnArchitecture::standard();
  int search_range = 16;

  void validate() const;
};

enum class ZoomHint { kNone, kOut, kIn };

ZoomHint parse_zoom_hint(std::string_view name);

struct EncoderConfig {
  SequenceConfig seq;
  TrainOptions train;
  ZoomHint zoom = ZoomHint::kNone;
  RegionKind region_kind = RegionKind::kSelectable;
  // Keep the generation pass of every period that trained a set, even when
  // it costs more. Breaks the never-worse guarantee; for analysis only.
  bool force_generation = false;
};

// Lagrangian multiplier 0.85 * 2^((qp - 12) / 3).
double lambda(int qp);

struct RdCost {
  std::uint64_t distortion = 0;  // SSD over 1536 samples
  std::uint64_t bits = 0;        // measured, never estimated
  double j = 0.0;

  static RdCost make(std::uint64_t distortion, std::uint64_t bits, double lambda);
};

struct ModeCandidate {
  BlockMode mode;
  RdCost cost;
};

// Minimum j; ties go to Inter, Intra-DC, Intra-H, Intra-V, then Generate.
BlockMode choose_block_mode(std::span<const ModeCandidate> candidates);

// Dominant per-frame translation under the prediction convention.
struct GlobalMotion {
  int dx = 0;
  int dy = 0;
  bool operator==(const GlobalMotion&) const = default;
};

// Component-wise median of motion_search vectors on a 4x4 subsample of the
// block grid. The two middle values are averaged, truncating toward zero.
GlobalMotion estimate_global_motion(const Frame& cur, const Frame& ref, int range);

std::array<int, 4> subsample_positions(int count);

struct RegionPlan {
  ZoomHint zoom = ZoomHint::kNone;
  RegionKind kind = RegionKind::kSelectable;
  int frames_since_set = 1;  // 1 for the frame that carries the set
};

// Pan: a margin on each edge where content enters, ceil(|v| * frames / 32)
// blocks thick, clamped to [1, max(1, dim/4)]. Zoom out: four margins whose
// thicknesses follow the grid aspect ratio. Zoom in: 1-row regions over runs
// of high-detail blocks (needs `detail`, one value per block).
std::vector<RegionSpec> select_generation_regions(GlobalMotion gm, GridDims grid,
                                                  const RegionPlan& plan,
                                                  std::span<const double> detail = {});

// Per-block luma variance in raster order.
std::vector<double> block_detail(const Frame& frame);

// Regions for frame `index` of `frames`, using source-frame global motion.
std::vector<RegionSpec> plan_frame_regions(std::span<const Frame> frames, int index,
                                           int period_start, const EncoderConfig& cfg);

struct TrainedSet {
  QuantizedGnnParams params;
  std::size_t dataset_size = 0;
  double final_loss = 0.0;
};

// Dataset: every block inside any region of any frame in the period with the
// source block as target. nullopt when there is nothing to train on.
Dataset build_period_dataset(std::span<const Frame> period_frames,
                             std::span<const std::vector<RegionSpec>> regions,
                             const SetContext& ctx);
std::optional<TrainedSet> train_param_set(std::span<const Frame> period_frames,
                                          std::span<const std::vector<RegionSpec>> regions,
                                          const SetContext& ctx, const GnnArchitecture& arch,
                                          const TrainOptions& options);

struct FrameReport {
  int frame = 0;
  FrameType type = FrameType::kIntra;
  FramePsnr psnr;
  BitBreakdown bits;
  int n_gen = 0;
  std::uint64_t ssd = 0;
};

struct PeriodReport {
  int start = 0;
  int frames = 0;
  int region_blocks = 0;
  std::size_t dataset_size = 0;
  double j_with_gnn = 0.0;  // equals j_without_gnn when nothing was trained
  double j_without_gnn = 0.0;
  bool used_gnn = false;
};

struct EncodeReport {
  std::vector<FrameReport> frames;
  std::vector<PeriodReport> periods;
  // Indexed by BlockModeKind.
  std::array<std::uint64_t, 5> mode_histogram{};
  BitBreakdown bits;
  std::uint64_t total_ssd = 0;
  double lambda = 0.0;
  // total_ssd + lambda * stream bits
  double total_j = 0.0;
  int param_sets = 0;
};

struct EncodeResult {
  std::vector<std::uint8_t> bytes;
  EncodeReport report;
  // Padded reconstructions exactly as the decoder will produce them.
  std::vector<Frame> recon;
};

// frames must be padded to whole blocks and match cfg.seq dimensions.
EncodeResult encode_sequence(std::span<const Frame> frames, const EncoderConfig& cfg);

// frame,type,psnr_y,psnr_cb,psnr_cr,bits_header,bits_params,bits_modes,bits_mv,bits_residual,n_gen_blocks
void write_encode_report_csv(std::ostream& os, const EncodeReport& report);

}  // namespace nbv
