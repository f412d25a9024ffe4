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

#include "nbv/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nbv/error.hpp"
#include "nbv/prediction.hpp"

namespace nbv {
namespace {

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

}  // namespace

double psnr(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) throw UsageError("psnr: plane size mismatch");
  if (a.data.empty()) throw UsageError("psnr: empty plane");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sse += d * d;
  }
  return psnr_from_mse(sse / static_cast<double>(a.data.size()));
}

FramePsnr frame_psnr(const Frame& a, const Frame& b) {
  return {psnr(a.y, b.y), psnr(a.cb, b.cb), psnr(a.cr, b.cr)};
}

double block_psnr(const Block32& a, const Block32& b) {
  return psnr_from_mse(static_cast<double>(block_ssd(a, b)) / kBlockSamples);
}

}  // namespace nbv
