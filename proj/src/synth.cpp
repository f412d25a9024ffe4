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

#include "nbv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nbv/error.hpp"

namespace nbv {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

struct Wave {
  double fx, fy, phase, amp;
};

struct Disk {
  double cx, cy, r;
  double y, cb, cr;
};

struct Canvas {
  int width = 0;  // luma
  int height = 0;
  Plane y, cb, cr;
};

std::uint8_t to_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

Canvas render_canvas(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double gx = uniform(rng, -60, 60);
  const double gy = uniform(rng, -40, 40);
  const double base_cb = uniform(rng, 100, 156);
  const double base_cr = uniform(rng, 100, 156);

  std::vector<Wave> waves;
  for (int i = 0; i < 4; ++i) {
    const double period = uniform(rng, 12, 96);
    const double angle = uniform(rng, 0, std::numbers::pi);
    waves.push_back({std::cos(angle) / period, std::sin(angle) / period,
                     uniform(rng, 0, 2 * std::numbers::pi), uniform(rng, 6, 22)});
  }
  std::vector<Disk> disks;
  const int disk_count = std::max(8, width * height / (48 * 48));
  for (int i = 0; i < disk_count; ++i)
    disks.push_back({uniform(rng, 0, width), uniform(rng, 0, height), uniform(rng, 4, 40),
                     uniform(rng, 20, 235), uniform(rng, 60, 196), uniform(rng, 60, 196)});

  auto luma_at = [&](double x, double y) {
    double v = 128 + gx * (x / width - 0.5) + gy * (y / height - 0.5);
    for (const Wave& w : waves)
      v += w.amp * std::sin(2 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
    for (const Disk& d : disks) {
      const double cov = std::clamp(d.r + 0.5 - std::hypot(x - d.cx, y - d.cy), 0.0, 1.0);
      v += cov * (d.y - v);
    }
    return v;
  };
  auto chroma_at = [&](double x, double y, bool red) {
    double v = red ? base_cr : base_cb;
    v += (red ? 10.0 : -10.0) * std::sin(2 * std::numbers::pi * (waves[0].fy * x + waves[1].fx * y));
    for (const Disk& d : disks) {
      const double cov = std::clamp(d.r + 0.5 - std::hypot(x - d.cx, y - d.cy), 0.0, 1.0);
      v += cov * ((red ? d.cr : d.cb) - v);
    }
    return v;
  };

  Canvas c;
  c.width = width;
  c.height = height;
  c.y = Plane(width, height);
  c.cb = Plane(width / 2, height / 2);
  c.cr = Plane(width / 2, height / 2);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) c.y.at(x, y) = to_pixel(luma_at(x, y));
  for (int y = 0; y < height / 2; ++y)
    for (int x = 0; x < width / 2; ++x) {
      const double lx = 2 * x + 0.5;
      const double ly = 2 * y + 0.5;
      c.cb.at(x, y) = to_pixel(chroma_at(lx, ly, false));
      c.cr.at(x, y) = to_pixel(chroma_at(lx, ly, true));
    }
  return c;
}

Plane crop_at(const Plane& p, int x0, int y0, int w, int h) {
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = p.at(x0 + x, y0 + y);
  return out;
}

// Bilinear resample of a (w*scale x h*scale) window centered at (cx, cy).
Plane resample(const Plane& p, double cx, double cy, double scale, int w, int h) {
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double sx = cx + (x + 0.5 - w / 2.0) * scale - 0.5;
      const double sy = cy + (y + 0.5 - h / 2.0) * scale - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double v = (1 - fy) * ((1 - fx) * p.clamped(x0, y0) + fx * p.clamped(x0 + 1, y0)) +
                       fy * ((1 - fx) * p.clamped(x0, y0 + 1) + fx * p.clamped(x0 + 1, y0 + 1));
      out.at(x, y) = to_pixel(v);
    }
  return out;
}

}  // namespace

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "static") return SynthKind::kStatic;
  if (name == "pan") return SynthKind::kPan;
  if (name == "zoom_out" || name == "zoom-out") return SynthKind::kZoomOut;
  if (name == "zoom_in" || name == "zoom-in") return SynthKind::kZoomIn;
  throw UsageError("unknown synth kind '" + std::string(name) + "'");
}

std::vector<Frame> synth_sequence(const SynthParams& params) {
  const int w = params.width;
  const int h = params.height;
  if (w < 2 || h < 2 || w % 2 != 0 || h % 2 != 0)
    throw UsageError("synth dimensions must be even and at least 2x2");
  if (params.frames < 1) throw UsageError("synth needs at least one frame");
  const Canvas canvas = render_canvas(3 * w, 3 * h, params.seed);

  std::vector<Frame> frames;
  for (int t = 0; t < params.frames; ++t) {
    Frame f(w, h);
    if (params.kind == SynthKind::kStatic || params.kind == SynthKind::kPan) {
      const int dx = params.kind == SynthKind::kPan ? params.vx * t : 0;
      const int dy = params.kind == SynthKind::kPan ? params.vy * t : 0;
      const int x0 = w + dx;
      const int y0 = h + dy;
      if (x0 < 0 || y0 < 0 || x0 + w > canvas.width || y0 + h > canvas.height)
        throw UsageError("pan window leaves the canvas at frame " + std::to_string(t));
      f.y = crop_at(canvas.y, x0, y0, w, h);
      // Floor division keeps chroma aligned for even velocities.
      const int cx0 = x0 >> 1;
      const int cy0 = y0 >> 1;
      f.cb = crop_at(canvas.cb, cx0, cy0, w / 2, h / 2);
      f.cr = crop_at(canvas.cr, cx0, cy0, w / 2, h / 2);
    } else {
      const double growth = 1.0 + params.zoom_rate;
      const double scale = std::pow(growth, params.kind == SynthKind::kZoomOut ? t : -t);
      if (scale * w > canvas.width || scale * h > canvas.height)
        throw UsageError("zoom window leaves the canvas at frame " + std::to_string(t));
      f.y = resample(canvas.y, canvas.width / 2.0, canvas.height / 2.0, scale, w, h);
      f.cb = resample(canvas.cb, canvas.width / 4.0, canvas.height / 4.0, scale, w / 2, h / 2);
      f.cr = resample(canvas.cr, canvas.width / 4.0, canvas.height / 4.0, scale, w / 2, h / 2);
    }
    frames.push_back(pad_to_blocks(f));
  }
  return frames;
}

}  // namespace nbv
