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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nbv {

inline constexpr int kBlockSize = 32;
inline constexpr int kChromaBlockSize = kBlockSize / 2;
inline constexpr int kLumaSamples = kBlockSize * kBlockSize;
inline constexpr int kChromaSamples = kChromaBlockSize * kChromaBlockSize;
inline constexpr int kBlockSamples = kLumaSamples + 2 * kChromaSamples;  // 1536

// One 8-bit sample plane, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Plane() = default;
  Plane(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  // Sample with coordinates clamped into the plane.
  std::uint8_t clamped(int x, int y) const;

  bool operator==(const Plane&) const = default;
};

// 8-bit 4:2:0 picture. Chroma planes are half resolution in both directions.
struct Frame {
  int width = 0;
  int height = 0;
  Plane y;
  Plane cb;
  Plane cr;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0);

  bool operator==(const Frame&) const = default;
};

// 32x32 luma + two co-located 16x16 chroma blocks; the generation unit.
struct Block32 {
  std::array<std::uint8_t, kLumaSamples> y{};
  std::array<std::uint8_t, kChromaSamples> cb{};
  std::array<std::uint8_t, kChromaSamples> cr{};

  static Block32 filled(std::uint8_t v);

  // Flat view in generation order: luma raster, then Cb, then Cr.
  std::uint8_t sample(int i) const;
  void set_sample(int i, std::uint8_t v);

  bool operator==(const Block32&) const = default;
};

struct BlockCoord {
  int bx = 0;
  int by = 0;
  bool operator==(const BlockCoord&) const = default;
};

struct GridDims {
  int cols = 0;
  int rows = 0;
  int block_count() const { return cols * rows; }
  bool contains(BlockCoord c) const { return c.bx >= 0 && c.by >= 0 && c.bx < cols && c.by < rows; }
  bool operator==(const GridDims&) const = default;
};

GridDims block_grid_dims(int width, int height);

// Grid of an already padded frame.
inline GridDims grid_of(const Frame& f) { return block_grid_dims(f.width, f.height); }

Block32 extract_block(const Frame& frame, BlockCoord c);
void insert_block(Frame& frame, BlockCoord c, const Block32& block);

// Edge-replicate to the next multiple of 32 in each dimension.
Frame pad_to_blocks(const Frame& frame);
// Top-left crop; width and height must be even and not exceed the frame.
Frame crop(const Frame& frame, int width, int height);

// Raw planar I420, frame-sequential, no header. Frames come back padded.
std::vector<Frame> decode_i420(std::span<const std::uint8_t> bytes, int width, int height,
                               int frame_count);
std::vector<std::uint8_t> encode_i420(std::span<const Frame> frames, int width, int height);

// frame_count == 0 reads every frame in the file.
std::vector<Frame> read_yuv(const std::filesystem::path& path, int width, int height,
                            int frame_count);
std::size_t write_yuv(const std::filesystem::path& path, std::span<const Frame> frames, int width,
                      int height);

std::size_t i420_frame_bytes(int width, int height);

}  // namespace nbv
