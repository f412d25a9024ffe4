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
#include <string_view>
#include <vector>

#include "nbv/frame.hpp"

namespace nbv {

enum class SynthKind { kStatic, kPan, kZoomOut, kZoomIn };

SynthKind parse_synth_kind(std::string_view name);

struct SynthParams {
  SynthKind kind = SynthKind::kPan;
  int width = 320;
  int height = 192;
  int frames = 16;
  // Pan velocity in pels per frame. The window moves by (vx, vy) each frame.
  int vx = 4;
  int vy = 0;
  // Relative change of the zoom window size per frame.
  double zoom_rate = 0.02;
  std::uint64_t seed = 1;
};

// Procedural canvas at three times the frame size: gradients, sinusoidal
// textures and anti-aliased disks. Frames are crops (pan, static) or
// bilinear resamplings (zoom) of it, padded to whole blocks.
std::vector<Frame> synth_sequence(const SynthParams& params);

}  // namespace nbv
