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

#include "nbv/frame.hpp"

namespace nbv {

inline constexpr double kPsnrCap = 99.0;

// 10 log10(255^2 / MSE); identical planes report kPsnrCap.
double psnr(const Plane& a, const Plane& b);

struct FramePsnr {
  double y = 0.0;
  double cb = 0.0;
  double cr = 0.0;
};

FramePsnr frame_psnr(const Frame& a, const Frame& b);

double block_psnr(const Block32& a, const Block32& b);

}  // namespace nbv
