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

#include "nbv/prediction.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "nbv/error.hpp"

namespace nbv {
namespace {

// Predict one plane of the block from its neighbor row/column.
template <std::size_t N>
void predict_plane(const Plane& p, int x0, int y0, int size, IntraMode mode,
                   std::array<std::uint8_t, N>& out) {
  const bool has_top = y0 > 0;
  const bool has_left = x0 > 0;
  if (mode == IntraMode::kVertical && has_top) {
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) out[y * size + x] = p.at(x0 + x, y0 - 1);
    return;
  }
  if (mode == IntraMode::kHorizontal && has_left) {
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) out[y * size + x] = p.at(x0 - 1, y0 + y);
    return;
  }
  int sum = 0;
  int count = 0;
  if (has_top) {
    for (int x = 0; x < size; ++x) sum += p.at(x0 + x, y0 - 1);
    count += size;
  }
  if (has_left) {
    for (int y = 0; y < size; ++y) sum += p.at(x0 - 1, y0 + y);
    count += size;
  }
  // Non-negative sum, so integer half-up equals half-away-from-zero.
  const std::uint8_t dc =
      count == 0 ? 128 : static_cast<std::uint8_t>((2 * sum + count) / (2 * count));
  out.fill(dc);
}

template <std::size_t N>
void displaced_plane(const Plane& p, int x0, int y0, int size, int dx, int dy,
                     std::array<std::uint8_t, N>& out) {
  const bool inside = x0 + dx >= 0 && y0 + dy >= 0 && x0 + dx + size <= p.width &&
                      y0 + dy + size <= p.height;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      out[y * size + x] = inside ? p.at(x0 + x + dx, y0 + y + dy)
                                 : p.clamped(x0 + x + dx, y0 + y + dy);
}

}  // namespace

Block32 intra_predict(const Frame& recon, BlockCoord c, IntraMode mode) {
  if (!grid_of(recon).contains(c)) throw UsageError("intra_predict: coordinate outside grid");
  Block32 b;
  predict_plane(recon.y, c.bx * kBlockSize, c.by * kBlockSize, kBlockSize, mode, b.y);
  predict_plane(recon.cb, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, mode,
                b.cb);
  predict_plane(recon.cr, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, mode,
                b.cr);
  return b;
}

std::uint32_t luma_sad(const Block32& a, const Block32& b) {
  std::uint32_t sad = 0;
  for (int i = 0; i < kLumaSamples; ++i) sad += static_cast<std::uint32_t>(std::abs(a.y[i] - b.y[i]));
  return sad;
}

std::uint64_t block_ssd(const Block32& a, const Block32& b) {
  std::uint64_t ssd = 0;
  for (int i = 0; i < kBlockSamples; ++i) {
    const int d = a.sample(i) - b.sample(i);
    ssd += static_cast<std::uint64_t>(d * d);
  }
  return ssd;
}

MotionSearchResult motion_search(const Block32& cur, const Frame& ref, BlockCoord c, int range) {
  if (range < 0) throw UsageError("search range must be non-negative");
  if (!grid_of(ref).contains(c)) throw UsageError("motion_search: coordinate outside grid");
  const int x0 = c.bx * kBlockSize;
  const int y0 = c.by * kBlockSize;
  const int dx_lo = std::max(-range, -x0);
  const int dx_hi = std::min(range, ref.width - kBlockSize - x0);
  const int dy_lo = std::max(-range, -y0);
  const int dy_hi = std::min(range, ref.height - kBlockSize - y0);

  MotionSearchResult best{{0, 0}, std::numeric_limits<std::uint32_t>::max()};
  int best_len = std::numeric_limits<int>::max();
  // Raster scan (dy outer, dx inner) so the first of equal (sad, length) wins.
  for (int dy = dy_lo; dy <= dy_hi; ++dy) {
    for (int dx = dx_lo; dx <= dx_hi; ++dx) {
      std::uint32_t sad = 0;
      for (int y = 0; y < kBlockSize && sad <= best.sad; ++y) {
        const std::uint8_t* r = &ref.y.data[static_cast<std::size_t>(y0 + y + dy) * ref.width +
                                            x0 + dx];
        const std::uint8_t* s = &cur.y[y * kBlockSize];
        for (int x = 0; x < kBlockSize; ++x) sad += static_cast<std::uint32_t>(std::abs(s[x] - r[x]));
      }
      const int len = std::abs(dx) + std::abs(dy);
      if (sad < best.sad || (sad == best.sad && len < best_len)) {
        best = {{dx, dy}, sad};
        best_len = len;
      }
    }
  }
  return best;
}

Block32 motion_compensate(const Frame& ref, BlockCoord c, MotionVector mv) {
  if (!grid_of(ref).contains(c)) throw UsageError("motion_compensate: coordinate outside grid");
  Block32 b;
  displaced_plane(ref.y, c.bx * kBlockSize, c.by * kBlockSize, kBlockSize, mv.dx, mv.dy, b.y);
  const int cdx = mv.dx / 2;
  const int cdy = mv.dy / 2;
  displaced_plane(ref.cb, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, cdx,
                  cdy, b.cb);
  displaced_plane(ref.cr, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, cdx,
                  cdy, b.cr);
  return b;
}

}  // namespace nbv
