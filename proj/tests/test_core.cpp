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

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "nbv/error.hpp"
#include "nbv/frame.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace nbv;

namespace {

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / ("nbv_core_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("block grid of common sizes") {
  CHECK(block_grid_dims(3840, 2160) == GridDims{120, 68});
  CHECK(block_grid_dims(32, 32) == GridDims{1, 1});
  CHECK(block_grid_dims(33, 33) == GridDims{2, 2});
  CHECK_THROWS_AS(block_grid_dims(0, 16), UsageError);
}

TEST_CASE("block grid is the tightest cover") {
  for (int w = 1; w <= 300; ++w) {
    const GridDims g = block_grid_dims(w, 301 - w);
    CHECK(g.cols * 32 >= w);
    CHECK((g.cols - 1) * 32 < w);
    CHECK(g.rows * 32 >= 301 - w);
    CHECK((g.rows - 1) * 32 < 301 - w);
  }
}

TEST_CASE("extract from uniform and ramp frames") {
  CHECK(extract_block(Frame(64, 64, 128), {0, 0}) == Block32::filled(128));

  Frame ramp(128, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 128; ++x) ramp.y.at(x, y) = static_cast<std::uint8_t>(x % 256);
  const Block32 b = extract_block(ramp, {1, 0});
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) CHECK(b.y[y * 32 + x] == 32 + x);
}

TEST_CASE("chroma windows are co-located") {
  std::mt19937_64 rng(3);
  const Frame f = test::random_frame(96, 64, rng);
  const Block32 b = extract_block(f, {2, 1});
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      CHECK(b.cb[y * 16 + x] == f.cb.at(32 + x, 16 + y));
      CHECK(b.cr[y * 16 + x] == f.cr.at(32 + x, 16 + y));
    }
  CHECK(b.sample(0) == b.y[0]);
  CHECK(b.sample(1024) == b.cb[0]);
  CHECK(b.sample(1280) == b.cr[0]);
}

TEST_CASE("insert and extract are inverse") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Frame f = test::random_frame(96, 64, rng);
    Frame g(96, 64);
    for (int by = 0; by < 2; ++by)
      for (int bx = 0; bx < 3; ++bx) {
        const Block32 b = extract_block(f, {bx, by});
        insert_block(g, {bx, by}, b);
        CHECK(extract_block(g, {bx, by}) == b);
      }
    CHECK(g == f);
  }
}

TEST_CASE("insert touches exactly one window") {
  Frame f(96, 64, 77);
  insert_block(f, {2, 1}, Block32::filled(0));
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 96; ++x) {
      const bool inside = x >= 64 && y >= 32;
      CHECK(f.y.at(x, y) == (inside ? 0 : 77));
    }
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 48; ++x) CHECK(f.cb.at(x, y) == ((x >= 32 && y >= 16) ? 0 : 77));

  Frame g(96, 64, 9);
  insert_block(g, {0, 0}, Block32::filled(200));
  CHECK(g.y.at(31, 31) == 200);
  CHECK(g.y.at(32, 31) == 9);
  CHECK(g.y.at(31, 32) == 9);
}

TEST_CASE("out-of-grid coordinates are rejected") {
  Frame f(64, 64);
  CHECK_THROWS_AS(extract_block(f, {2, 0}), UsageError);
  CHECK_THROWS_AS(extract_block(f, {0, -1}), UsageError);
  CHECK_THROWS_AS(insert_block(f, {0, 2}, Block32{}), UsageError);
  Frame unpadded(48, 48);
  CHECK_THROWS_AS(extract_block(unpadded, {0, 0}), UsageError);
}

TEST_CASE("padding replicates edges") {
  Frame f(34, 18);
  for (int y = 0; y < 18; ++y)
    for (int x = 0; x < 34; ++x) f.y.at(x, y) = static_cast<std::uint8_t>(x + 10 * y);
  const Frame p = pad_to_blocks(f);
  CHECK(p.width == 64);
  CHECK(p.height == 32);
  CHECK(p.y.at(63, 0) == f.y.at(33, 0));
  CHECK(p.y.at(5, 31) == f.y.at(5, 17));
  CHECK(p.y.at(63, 31) == f.y.at(33, 17));
  CHECK(crop(p, 34, 18) == f);
}

TEST_CASE("yuv files round trip") {
  const fs::path dir = scratch_dir();
  std::mt19937_64 rng(11);
  std::vector<Frame> frames;
  for (int i = 0; i < 3; ++i) frames.push_back(test::random_frame(64, 64, rng));
  const fs::path p = dir / "three.yuv";
  CHECK(write_yuv(p, frames, 64, 64) == 3 * 64 * 64 * 3 / 2);
  CHECK(fs::file_size(p) == 3 * 64 * 64 * 3 / 2);
  CHECK(read_yuv(p, 64, 64, 3) == frames);
  CHECK(read_yuv(p, 64, 64, 0) == frames);
  CHECK(read_yuv(p, 64, 64, 2).size() == 2);

  std::vector<std::uint8_t> bytes(fs::file_size(p));
  std::ifstream(p, std::ios::binary).read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  CHECK(encode_i420(frames, 64, 64) == bytes);
  fs::remove_all(dir);
}

TEST_CASE("short or ragged files are errors") {
  const fs::path dir = scratch_dir();
  const fs::path p = dir / "short.yuv";
  std::ofstream(p, std::ios::binary) << std::string(100, 'x');
  CHECK_THROWS_AS(read_yuv(p, 64, 64, 1), IoError);
  CHECK_THROWS_AS(read_yuv(p, 64, 64, 0), IoError);
  CHECK_THROWS_AS(read_yuv(dir / "missing.yuv", 64, 64, 1), IoError);
  fs::remove_all(dir);
}

TEST_CASE("odd sizes are padded on read and cropped on write") {
  const fs::path dir = scratch_dir();
  std::mt19937_64 rng(13);
  const Frame src = test::random_frame(48, 48, rng);
  const fs::path p = dir / "small.yuv";
  write_yuv(p, std::vector<Frame>{src}, 48, 48);
  CHECK(fs::file_size(p) == 48 * 48 * 3 / 2);
  const std::vector<Frame> back = read_yuv(p, 48, 48, 1);
  REQUIRE(back.size() == 1);
  CHECK(back[0].width == 64);
  CHECK(back[0].height == 64);
  CHECK(back[0].y.at(63, 63) == src.y.at(47, 47));
  CHECK(crop(back[0], 48, 48) == src);
  const fs::path q = dir / "again.yuv";
  write_yuv(q, back, 48, 48);
  CHECK(read_yuv(q, 48, 48, 1) == back);
  fs::remove_all(dir);
}

}  // TEST_SUITE
