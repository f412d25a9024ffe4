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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nbv/accounting.hpp"
#include "nbv/encoder.hpp"
#include "nbv/error.hpp"
#include "nbv/metrics.hpp"
#include "nbv/synth.hpp"
#include "test_util.hpp"

using namespace nbv;

TEST_SUITE("tools") {

TEST_CASE("static sequences repeat one picture") {
  SynthParams p;
  p.kind = SynthKind::kStatic;
  p.width = 96;
  p.height = 64;
  p.frames = 4;
  const auto f = synth_sequence(p);
  REQUIRE(f.size() == 4);
  for (const Frame& x : f) CHECK(x == f[0]);
}

TEST_CASE("pan frames are shifted crops") {
  SynthParams p;
  p.kind = SynthKind::kPan;
  p.width = 320;
  p.height = 192;
  p.frames = 3;
  p.vx = 4;
  p.vy = 2;
  const auto f = synth_sequence(p);
  for (int t = 0; t + 1 < 3; ++t) {
    for (int y = 0; y < 190; ++y)
      for (int x = 0; x < 316; ++x) CHECK(f[t + 1].y.at(x, y) == f[t].y.at(x + 4, y + 2));
    for (int y = 0; y < 95; ++y)
      for (int x = 0; x < 158; ++x) CHECK(f[t + 1].cb.at(x, y) == f[t].cb.at(x + 2, y + 1));
  }
  CHECK(f[0] != f[1]);
}

TEST_CASE("synthesis is seeded and textured") {
  SynthParams p;
  p.width = 128;
  p.height = 64;
  p.frames = 2;
  CHECK(synth_sequence(p) == synth_sequence(p));
  SynthParams q = p;
  q.seed = 2;
  CHECK(synth_sequence(q) != synth_sequence(p));
  const Frame f = synth_sequence(p)[0];
  std::vector<int> hist(256);
  for (auto v : f.y.data) ++hist[v];
  int used = 0;
  for (int h : hist) used += h > 0;
  CHECK(used > 64);
}

TEST_CASE("zoom sequences change scale") {
  for (SynthKind k : {SynthKind::kZoomOut, SynthKind::kZoomIn}) {
    SynthParams p;
    p.kind = k;
    p.width = 128;
    p.height = 96;
    p.frames = 3;
    const auto f = synth_sequence(p);
    CHECK(f.size() == 3);
    CHECK(f[0] != f[1]);
    CHECK(f[1] != f[2]);
  }
  CHECK(parse_synth_kind("zoom_out") == SynthKind::kZoomOut);
  CHECK(parse_synth_kind("pan") == SynthKind::kPan);
  CHECK_THROWS_AS(parse_synth_kind("tilt"), UsageError);
}

TEST_CASE("windows leaving the canvas are errors") {
  SynthParams p;
  p.width = 64;
  p.height = 64;
  p.frames = 10;
  p.vx = 100;
  CHECK_THROWS_AS(synth_sequence(p), UsageError);
  p.vx = 4;
  p.kind = SynthKind::kZoomOut;
  p.zoom_rate = 0.5;
  CHECK_THROWS_AS(synth_sequence(p), UsageError);
}

TEST_CASE("psnr values") {
  std::mt19937_64 rng(191);
  const Frame a = test::random_frame(64, 64, rng);
  CHECK(psnr(a.y, a.y) == kPsnrCap);
  Plane b = a.y;
  for (auto& v : b.data) v = static_cast<std::uint8_t>(v < 128 ? v + 16 : v - 16);
  CHECK(psnr(a.y, b) == doctest::Approx(20 * std::log10(255.0 / 16)));
  CHECK(psnr(a.y, b) == doctest::Approx(24.0484).epsilon(1e-5));
  const Frame c = test::random_frame(64, 64, rng);
  CHECK(psnr(a.y, c.y) == psnr(c.y, a.y));
  const FramePsnr fp = frame_psnr(a, a);
  CHECK(fp.y == kPsnrCap);
  CHECK(fp.cb == kPsnrCap);
  CHECK(fp.cr == kPsnrCap);
  CHECK(block_psnr(Block32::filled(10), Block32::filled(10)) == kPsnrCap);
  CHECK_THROWS_AS(psnr(Plane(4, 4), Plane(4, 2)), UsageError);
}

TEST_CASE("bandwidth arithmetic") {
  CHECK(parameter_bandwidth_share(100000, 10, 40e6, 1.0) == 0.025);
  const GridDims uhd = block_grid_dims(3840, 2160);
  CHECK(uhd.block_count() == 8160);
  CHECK(half_edge_blocks(uhd) == 94.0);
  const double share = generated_block_share(94, uhd);
  CHECK(share == doctest::Approx(94.0 / 8160));
  CHECK(std::abs(share * 100 - 1.2) <= 0.1);
  CHECK(gnn_calls_per_second(94, 30) == 2820.0);
}

TEST_CASE("accounting covers every bit") {
  SynthParams sp;
  sp.width = 128;
  sp.height = 96;
  sp.frames = 3;
  const auto frames = synth_sequence(sp);
  EncoderConfig cfg;
  cfg.seq.width = 128;
  cfg.seq.height = 96;
  cfg.seq.frame_count = 3;
  cfg.seq.gnn_interval = 3;
  cfg.seq.gnn_arch = GnnArchitecture::from_hidden(std::vector<int>{4});
  cfg.train.steps = 20;
  cfg.force_generation = true;
  const EncodeResult r = encode_sequence(frames, cfg);
  const BitAccounting a = bit_accounting(r.bytes);
  CHECK(a.stream_bits == r.bytes.size() * 8);
  CHECK(a.bits.total() == a.stream_bits);
  CHECK(a.bits == r.report.bits);
  CHECK(a.param_sets == 1);
  CHECK(a.frames == 3);
  double shares = 0.0;
  for (int c = 0; c < kBitCategoryCount; ++c) shares += a.share(static_cast<BitCategory>(c));
  CHECK(shares == doctest::Approx(1.0));

  std::ostringstream os;
  write_accounting_csv(os, a);
  CHECK(os.str().rfind("category,bits,share\nheader,", 0) == 0);
  CHECK(os.str().find("param_sets,") != std::string::npos);
  CHECK(os.str().find("total," + std::to_string(a.stream_bits)) != std::string::npos);
}

}  // TEST_SUITE
