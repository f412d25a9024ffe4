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

#include "nbv/frame.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "nbv/error.hpp"

namespace nbv {

std::uint8_t Plane::clamped(int x, int y) const {
  x = std::clamp(x, 0, width - 1);
  y = std::clamp(y, 0, height - 1);
  return at(x, y);
}

Frame::Frame(int w, int h, std::uint8_t fill)
    : width(w), height(h), y(w, h, fill), cb(w / 2, h / 2, fill), cr(w / 2, h / 2, fill) {}

Block32 Block32::filled(std::uint8_t v) {
  Block32 b;
  b.y.fill(v);
  b.cb.fill(v);
  b.cr.fill(v);
  return b;
}

std::uint8_t Block32::sample(int i) const {
  if (i < kLumaSamples) return y[i];
  i -= kLumaSamples;
  if (i < kChromaSamples) return cb[i];
  return cr[i - kChromaSamples];
}

void Block32::set_sample(int i, std::uint8_t v) {
  if (i < kLumaSamples) {
    y[i] = v;
    return;
  }
  i -= kLumaSamples;
  if (i < kChromaSamples) {
    cb[i] = v;
    return;
  }
  cr[i - kChromaSamples] = v;
}

GridDims block_grid_dims(int width, int height) {
  if (width < 1 || height < 1) throw UsageError("frame dimensions must be positive");
  return {(width + kBlockSize - 1) / kBlockSize, (height + kBlockSize - 1) / kBlockSize};
}

namespace {

void check_coord(const Frame& frame, BlockCoord c) {
  if (frame.width % kBlockSize != 0 || frame.height % kBlockSize != 0)
    throw UsageError("frame is not padded to whole blocks");
  if (!grid_of(frame).contains(c))
    throw UsageError("block coordinate (" + std::to_string(c.bx) + "," + std::to_string(c.by) +
                     ") outside grid");
}

template <std::size_t N>
void copy_window(const Plane& p, int x0, int y0, int size, std::array<std::uint8_t, N>& out) {
  for (int y = 0; y < size; ++y)
    std::copy_n(&p.data[static_cast<std::size_t>(y0 + y) * p.width + x0], size, &out[y * size]);
}

template <std::size_t N>
void paste_window(Plane& p, int x0, int y0, int size, const std::array<std::uint8_t, N>& in) {
  for (int y = 0; y < size; ++y)
    std::copy_n(&in[y * size], size, &p.data[static_cast<std::size_t>(y0 + y) * p.width + x0]);
}

Plane pad_plane(const Plane& p, int w, int h) {
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = p.clamped(x, y);
  return out;
}

Plane crop_plane(const Plane& p, int w, int h) {
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    std::copy_n(&p.data[static_cast<std::size_t>(y) * p.width], w,
                &out.data[static_cast<std::size_t>(y) * w]);
  return out;
}

void check_i420_dims(int width, int height) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0)
    throw UsageError("I420 dimensions must be even and at least 2x2");
  if (width > 65535 || height > 65535) throw UsageError("dimensions exceed 16 bits");
}

}  // namespace

Block32 extract_block(const Frame& frame, BlockCoord c) {
  check_coord(frame, c);
  Block32 b;
  copy_window(frame.y, c.bx * kBlockSize, c.by * kBlockSize, kBlockSize, b.y);
  copy_window(frame.cb, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, b.cb);
  copy_window(frame.cr, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize, b.cr);
  return b;
}

void insert_block(Frame& frame, BlockCoord c, const Block32& block) {
  check_coord(frame, c);
  paste_window(frame.y, c.bx * kBlockSize, c.by * kBlockSize, kBlockSize, block.y);
  paste_window(frame.cb, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize,
               block.cb);
  paste_window(frame.cr, c.bx * kChromaBlockSize, c.by * kChromaBlockSize, kChromaBlockSize,
               block.cr);
}

Frame pad_to_blocks(const Frame& frame) {
  const GridDims g = block_grid_dims(frame.width, frame.height);
  const int w = g.cols * kBlockSize;
  const int h = g.rows * kBlockSize;
  if (w == frame.width && h == frame.height) return frame;
  Frame out;
  out.width = w;
  out.height = h;
  out.y = pad_plane(frame.y, w, h);
  out.cb = pad_plane(frame.cb, w / 2, h / 2);
  out.cr = pad_plane(frame.cr, w / 2, h / 2);
  return out;
}

Frame crop(const Frame& frame, int width, int height) {
  check_i420_dims(width, height);
  if (width > frame.width || height > frame.height) throw UsageError("crop exceeds frame");
  if (width == frame.width && height == frame.height) return frame;
  Frame out;
  out.width = width;
  out.height = height;
  out.y = crop_plane(frame.y, width, height);
  out.cb = crop_plane(frame.cb, width / 2, height / 2);
  out.cr = crop_plane(frame.cr, width / 2, height / 2);
  return out;
}

std::size_t i420_frame_bytes(int width, int height) {
  return static_cast<std::size_t>(width) * height * 3 / 2;
}

std::vector<Frame> decode_i420(std::span<const std::uint8_t> bytes, int width, int height,
                               int frame_count) {
  check_i420_dims(width, height);
  if (frame_count < 0) throw UsageError("frame count must be non-negative");
  const std::size_t fb = i420_frame_bytes(width, height);
  if (frame_count == 0) {
    if (bytes.size() % fb != 0)
      throw IoError("file length " + std::to_string(bytes.size()) +
                    " is not a whole number of " + std::to_string(width) + "x" +
                    std::to_string(height) + " frames");
    frame_count = static_cast<int>(bytes.size() / fb);
  } else if (bytes.size() < fb * frame_count) {
    throw IoError("truncated input: need " + std::to_string(fb * frame_count) + " bytes, have " +
                  std::to_string(bytes.size()));
  } else if (bytes.size() % fb != 0) {
    throw IoError("file length does not match frame dimensions");
  }

  std::vector<Frame> frames;
  frames.reserve(frame_count);
  const std::uint8_t* p = bytes.data();
  for (int i = 0; i < frame_count; ++i) {
    Frame f(width, height);
    std::copy_n(p, f.y.data.size(), f.y.data.begin());
    p += f.y.data.size();
    std::copy_n(p, f.cb.data.size(), f.cb.data.begin());
    p += f.cb.data.size();
    std::copy_n(p, f.cr.data.size(), f.cr.data.begin());
    p += f.cr.data.size();
    frames.push_back(pad_to_blocks(f));
  }
  return frames;
}

std::vector<std::uint8_t> encode_i420(std::span<const Frame> frames, int width, int height) {
  std::vector<std::uint8_t> out;
  out.reserve(i420_frame_bytes(width, height) * frames.size());
  for (const Frame& f : frames) {
    const Frame c = crop(f, width, height);
    out.insert(out.end(), c.y.data.begin(), c.y.data.end());
    out.insert(out.end(), c.cb.data.begin(), c.cb.data.end());
    out.insert(out.end(), c.cr.data.begin(), c.cr.data.end());
  }
  return out;
}

std::vector<Frame> read_yuv(const std::filesystem::path& path, int width, int height,
                            int frame_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_i420(bytes, width, height, frame_count);
}

std::size_t write_yuv(const std::filesystem::path& path, std::span<const Frame> frames, int width,
                      int height) {
  const std::vector<std::uint8_t> bytes = encode_i420(frames, width, height);
  // Write beside the target and rename so a failure never leaves a partial file.
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
  return bytes.size();
}

}  // namespace nbv
