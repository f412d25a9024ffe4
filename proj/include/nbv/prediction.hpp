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

#include <cstdint>

#include "nbv/frame.hpp"

namespace nbv {

enum class IntraMode : std::uint8_t { kDc, kHorizontal, kVertical };

// Integer-pel displacement. Prediction reads ref(32*bx + x + dx, 32*by + y + dy);
// chroma uses (dx/2, dy/2) truncated toward zero.
struct MotionVector {
  int dx = 0;
  int dy = 0;
  bool operator==(const MotionVector&) const = default;
};

// Reads only the reconstructed row above and column left of the block.
Block32 intra_predict(const Frame& recon, BlockCoord c, IntraMode mode);

std::uint32_t luma_sad(const Block32& a, const Block32& b);
// Sum of squared differences over all 1536 samples.
std::uint64_t block_ssd(const Block32& a, const Block32& b);

struct MotionSearchResult {
  MotionVector mv;
  std::uint32_t sad = 0;
};

// Exhaustive integer-pel search over [-range, range]^2, restricted to windows
// inside the frame. Ties go to smaller |dx|+|dy|, then smaller dy, then smaller dx.
MotionSearchResult motion_search(const Block32& cur, const Frame& ref, BlockCoord c, int range);

// Displaced copy with edge clamping outside the frame.
Block32 motion_compensate(const Frame& ref, BlockCoord c, MotionVector mv);

}  // namespace nbv
