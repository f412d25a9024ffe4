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

#include <algorithm>
#include <cmath>
#include <string>

#include "nbv/encoder.hpp"
#include "nbv/error.hpp"
#include "nbv/prediction.hpp"

namespace nbv {
namespace {

int median_toward_zero(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2;  // C++ division truncates toward zero
}

int margin(int magnitude, int frames, int dim) {
  const int cap = std::max(1, dim / 4);
  const long long px = static_cast<long long>(magnitude) * frames;
  const int blocks = static_cast<int>((px + kBlockSize - 1) / kBlockSize);
  return std::clamp(blocks, 1, cap);
}

std::vector<RegionSpec> pan_regions(GlobalMotion gm, GridDims g, RegionKind kind, int frames) {
  std::vector<RegionSpec> out;
  // Under pred(x) = ref(x + dx), dx > 0 means content moves left and new
  // content enters at the right edge.
  int x_lo = 0;
  int x_hi = g.cols - 1;
  if (gm.dx != 0) {
    const int w = margin(std::abs(gm.dx), frames, g.cols);
    if (gm.dx > 0) {
      out.push_back({g.cols - w, 0, g.cols - 1, g.rows - 1, kind});
      x_hi = g.cols - w - 1;
    } else {
      out.push_back({0, 0, w - 1, g.rows - 1, kind});
      x_lo = w;
    }
  }
  if (gm.dy != 0 && x_lo <= x_hi) {
    const int h = margin(std::abs(gm.dy), frames, g.rows);
    if (gm.dy > 0)
      out.push_back({x_lo, g.rows - h, x_hi, g.rows - 1, kind});
    else
      out.push_back({x_lo, 0, x_hi, h - 1, kind});
  }
  return out;
}

std::vector<RegionSpec> zoom_out_regions(GridDims g, RegionKind kind) {
  const int h = std::clamp((g.rows + 15) / 16, 1, std::max(1, g.rows / 4));
  const int w = std::clamp(static_cast<int>(std::round(static_cast<double>(h) * g.cols / g.rows)),
                           1, std::max(1, g.cols / 4));
  std::vector<RegionSpec> out;
  out.push_back({0, 0, w - 1, g.rows - 1, kind});
  if (g.cols - w > w - 1) out.push_back({g.cols - w, 0, g.cols - 1, g.rows - 1, kind});
  const int x_lo = w;
  const int x_hi = g.cols - w - 1;
  if (x_lo <= x_hi) {
    out.push_back({x_lo, 0, x_hi, h - 1, kind});
    if (g.rows - h > h - 1) out.push_back({x_lo, g.rows - h, x_hi, g.rows - 1, kind});
  }
  return out;
}

std::vector<RegionSpec> zoom_in_regions(GridDims g, RegionKind kind,
                                        std::span<const double> detail) {
  if (detail.size() != static_cast<std::size_t>(g.block_count()))
    throw UsageError("zoom-in region selection needs one detail value per block");
  std::vector<double> sorted(detail.begin(), detail.end());
  std::sort(sorted.begin(), sorted.end());
  const double threshold = sorted[(sorted.size() * 3) / 4];
  std::vector<RegionSpec> out;
  for (int by = 0; by < g.rows; ++by) {
    int bx = 0;
    while (bx < g.cols) {
      if (!(detail[by * g.cols + bx] >= threshold && detail[by * g.cols + bx] > 0.0)) {
        ++bx;
        continue;
      }
      const int start = bx;
      while (bx < g.cols && detail[by * g.cols + bx] >= threshold && detail[by * g.cols + bx] > 0.0)
        ++bx;
      out.push_back({start, by, bx - 1, by, kind});
    }
  }
  return out;
}

}  // namespace

ZoomHint parse_zoom_hint(std::string_view name) {
  if (name == "none") return ZoomHint::kNone;
  if (name == "out") return ZoomHint::kOut;
  if (name == "in") return ZoomHint::kIn;
  throw UsageError("zoom hint must be out, in or none, got '" + std::string(name) + "'");
}

std::array<int, 4> subsample_positions(int count) {
  std::array<int, 4> pos{};
  for (int i = 0; i < 4; ++i) pos[i] = ((2 * i + 1) * count) / 8;
  return pos;
}

GlobalMotion estimate_global_motion(const Frame& cur, const Frame& ref, int range) {
  const GridDims g = grid_of(cur);
  if (grid_of(ref) != g) throw UsageError("global motion: frame sizes differ");
  std::vector<int> xs;
  std::vector<int> ys;
  for (int by : subsample_positions(g.rows))
    for (int bx : subsample_positions(g.cols)) {
      const BlockCoord c{bx, by};
      const MotionSearchResult r = motion_search(extract_block(cur, c), ref, c, range);
      xs.push_back(r.mv.dx);
      ys.push_back(r.mv.dy);
    }
  return {median_toward_zero(xs), median_toward_zero(ys)};
}

std::vector<RegionSpec> select_generation_regions(GlobalMotion gm, GridDims grid,
                                                  const RegionPlan& plan,
                                                  std::span<const double> detail) {
  if (grid.cols < 1 || grid.rows < 1) throw UsageError("empty block grid");
  switch (plan.zoom) {
    case ZoomHint::kOut: return zoom_out_regions(grid, plan.kind);
    case ZoomHint::kIn: return zoom_in_regions(grid, plan.kind, detail);
    case ZoomHint::kNone: break;
  }
  if (gm.dx == 0 && gm.dy == 0) return {};
  return pan_regions(gm, grid, plan.kind, std::max(1, plan.frames_since_set));
}

std::vector<double> block_detail(const Frame& frame) {
  const GridDims g = grid_of(frame);
  std::vector<double> out;
  out.reserve(g.block_count());
  for (int by = 0; by < g.rows; ++by)
    for (int bx = 0; bx < g.cols; ++bx) {
      const Block32 b = extract_block(frame, {bx, by});
      double sum = 0.0;
      double sq = 0.0;
      for (std::uint8_t v : b.y) {
        sum += v;
        sq += static_cast<double>(v) * v;
      }
      const double mean = sum / kLumaSamples;
      out.push_back(sq / kLumaSamples - mean * mean);
    }
  return out;
}

std::vector<RegionSpec> plan_frame_regions(std::span<const Frame> frames, int index,
                                           int period_start, const EncoderConfig& cfg) {
  const int n = static_cast<int>(frames.size());
  GlobalMotion gm;
  if (cfg.zoom == ZoomHint::kNone && n >= 2) {
    // The first frame has no predecessor; borrow the motion into frame 1.
    const int cur = index >= 1 ? index : 1;
    gm = estimate_global_motion(frames[cur], frames[cur - 1], cfg.seq.search_range);
  }
  RegionPlan plan;
  plan.zoom = cfg.zoom;
  plan.kind = cfg.region_kind;
  plan.frames_since_set = index - period_start + 1;
  std::vector<double> detail;
  if (cfg.zoom == ZoomHint::kIn) detail = block_detail(frames[index]);
  return select_generation_regions(gm, grid_of(frames[index]), plan, detail);
}

}  // namespace nbv
