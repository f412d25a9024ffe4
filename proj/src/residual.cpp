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

#include "nbv/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nbv/error.hpp"

namespace nbv {
namespace {

using Matrix8 = std::array<std::array<double, kTileSize>, kTileSize>;

// basis[k][n] = c(k) * cos((2n+1) k pi / 16)
const Matrix8& dct_basis() {
  static const Matrix8 basis = [] {
    Matrix8 m{};
    for (int k = 0; k < kTileSize; ++k) {
      const double c = k == 0 ? std::sqrt(1.0 / kTileSize) : std::sqrt(2.0 / kTileSize);
      for (int n = 0; n < kTileSize; ++n)
        m[k][n] = c * std::cos((2 * n + 1) * k * std::numbers::pi / (2.0 * kTileSize));
    }
    return m;
  }();
  return basis;
}

struct TilePlacement {
  int plane;  // 0 = Y, 1 = Cb, 2 = Cr
  int x0;
  int y0;
};

TilePlacement placement(int tile) {
  if (tile < 16) return {0, (tile % 4) * kTileSize, (tile / 4) * kTileSize};
  tile -= 16;
  return {1 + tile / 4, (tile % 2) * kTileSize, ((tile % 4) / 2) * kTileSize};
}

int stride_of(int plane) { return plane == 0 ? kBlockSize : kChromaBlockSize; }

const std::uint8_t* plane_ptr(const Block32& b, int plane) {
  return plane == 0 ? b.y.data() : plane == 1 ? b.cb.data() : b.cr.data();
}

std::uint8_t* plane_ptr(Block32& b, int plane) {
  return plane == 0 ? b.y.data() : plane == 1 ? b.cb.data() : b.cr.data();
}

}  // namespace

const std::array<int, kTileCoeffs>& zigzag_order() {
  static const std::array<int, kTileCoeffs> order = [] {
    std::array<int, kTileCoeffs> o{};
    int i = 0;
    for (int s = 0; s < 2 * kTileSize - 1; ++s) {
      // Odd diagonals run top-right to bottom-left, even ones the other way.
      for (int k = 0; k <= s; ++k) {
        const int row = (s % 2 == 1) ? k : s - k;
        const int col = s - row;
        if (row < kTileSize && col < kTileSize) o[i++] = row * kTileSize + col;
      }
    }
    return o;
  }();
  return order;
}

Tile dct8_forward(const Tile& tile) {
  const Matrix8& c = dct_basis();
  Tile tmp{};
  for (int y = 0; y < kTileSize; ++y)
    for (int k = 0; k < kTileSize; ++k) {
      double acc = 0.0;
      for (int n = 0; n < kTileSize; ++n) acc += c[k][n] * tile[y * kTileSize + n];
      tmp[y * kTileSize + k] = acc;
    }
  Tile out{};
  for (int k = 0; k < kTileSize; ++k)
    for (int x = 0; x < kTileSize; ++x) {
      double acc = 0.0;
      for (int n = 0; n < kTileSize; ++n) acc += c[k][n] * tmp[n * kTileSize + x];
      out[k * kTileSize + x] = acc;
    }
  return out;
}

Tile dct8_inverse(const Tile& coeffs) {
  const Matrix8& c = dct_basis();
  Tile tmp{};
  for (int n = 0; n < kTileSize; ++n)
    for (int x = 0; x < kTileSize; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kTileSize; ++k) acc += c[k][n] * coeffs[k * kTileSize + x];
      tmp[n * kTileSize + x] = acc;
    }
  Tile out{};
  for (int y = 0; y < kTileSize; ++y)
    for (int n = 0; n < kTileSize; ++n) {
      double acc = 0.0;
      for (int k = 0; k < kTileSize; ++k) acc += c[k][n] * tmp[y * kTileSize + k];
      out[y * kTileSize + n] = acc;
    }
  return out;
}

void check_qp(int qp) {
  if (qp < kMinQp || qp > kMaxQp)
    throw UsageError("qp " + std::to_string(qp) + " outside [0,51]");
}

double qstep(int qp) {
  check_qp(qp);
  return std::exp2(qp / 6.0);
}

CoeffBlock quantize(const Tile& coeffs, int qp) {
  const double step = qstep(qp);
  const auto& zz = zigzag_order();
  CoeffBlock levels{};
  for (int i = 0; i < kTileCoeffs; ++i) {
    const double l = std::clamp(round_half_away(coeffs[zz[i]] / step), -32767.0, 32767.0);
    levels[i] = static_cast<std::int16_t>(l);
  }
  return levels;
}

Tile dequantize(const CoeffBlock& levels, int qp) {
  const double step = qstep(qp);
  const auto& zz = zigzag_order();
  Tile out{};
  for (int i = 0; i < kTileCoeffs; ++i) out[zz[i]] = levels[i] * step;
  return out;
}

void code_coeffs(BitWriter& w, const CoeffBlock& levels) {
  const auto nonzero = std::count_if(levels.begin(), levels.end(), [](auto l) { return l != 0; });
  write_ue(w, static_cast<std::uint32_t>(nonzero));
  int run = 0;
  for (std::int16_t l : levels) {
    if (l == 0) {
      ++run;
      continue;
    }
    // Levels are symmetric 16-bit; -32768 has no decodable counterpart.
    if (l == std::numeric_limits<std::int16_t>::min())
      throw UsageError("coefficient level -32768 is outside the coded range");
    write_ue(w, static_cast<std::uint32_t>(run));
    write_se(w, l);
    run = 0;
  }
}

CoeffBlock decode_coeffs(BitReader& r) {
  CoeffBlock levels{};
  const std::uint32_t count = read_ue(r);
  if (count > kTileCoeffs) throw StreamError("coefficient count exceeds 64");
  int pos = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t run = read_ue(r);
    if (run >= static_cast<std::uint32_t>(kTileCoeffs - pos))
      throw StreamError("coefficient run exceeds block");
    pos += static_cast<int>(run);
    const std::int32_t level = read_se(r);
    if (level == 0) throw StreamError("zero level in coefficient pair");
    if (level < -32767 || level > 32767) throw StreamError("coefficient level exceeds 16 bits");
    levels[pos++] = static_cast<std::int16_t>(level);
  }
  return levels;
}

BlockCoeffs residual_coeffs(const Block32& source, const Block32& basis, int qp) {
  BlockCoeffs out{};
  for (int t = 0; t < kTilesPerBlock; ++t) {
    const TilePlacement p = placement(t);
    const int stride = stride_of(p.plane);
    const std::uint8_t* s = plane_ptr(source, p.plane);
    const std::uint8_t* b = plane_ptr(basis, p.plane);
    Tile diff{};
    for (int y = 0; y < kTileSize; ++y)
      for (int x = 0; x < kTileSize; ++x) {
        const int idx = (p.y0 + y) * stride + p.x0 + x;
        diff[y * kTileSize + x] = static_cast<double>(s[idx]) - b[idx];
      }
    out[t] = quantize(dct8_forward(diff), qp);
  }
  return out;
}

Block32 reconstruct(const Block32& basis, const BlockCoeffs& coeffs, int qp) {
  Block32 rec = basis;
  for (int t = 0; t < kTilesPerBlock; ++t) {
    const auto& levels = coeffs[t];
    if (std::all_of(levels.begin(), levels.end(), [](auto l) { return l == 0; })) continue;
    const Tile res = dct8_inverse(dequantize(levels, qp));
    const TilePlacement p = placement(t);
    const int stride = stride_of(p.plane);
    const std::uint8_t* b = plane_ptr(basis, p.plane);
    std::uint8_t* out = plane_ptr(rec, p.plane);
    for (int y = 0; y < kTileSize; ++y)
      for (int x = 0; x < kTileSize; ++x) {
        const int idx = (p.y0 + y) * stride + p.x0 + x;
        const double v = round_half_away(b[idx] + res[y * kTileSize + x]);
        out[idx] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
  }
  return rec;
}

void write_block_coeffs(BitWriter& w, const BlockCoeffs& coeffs) {
  for (const CoeffBlock& c : coeffs) code_coeffs(w, c);
}

BlockCoeffs read_block_coeffs(BitReader& r) {
  BlockCoeffs out{};
  for (CoeffBlock& c : out) c = decode_coeffs(r);
  return out;
}

ResidualResult code_block_residual(BitWriter& w, const Block32& source, const Block32& basis,
                                   int qp) {
  ResidualResult res;
  res.coeffs = residual_coeffs(source, basis, qp);
  const std::uint64_t start = w.bit_count();
  write_block_coeffs(w, res.coeffs);
  res.bits = w.bit_count() - start;
  res.recon = reconstruct(basis, res.coeffs, qp);
  return res;
}

Block32 decode_block_residual(BitReader& r, const Block32& basis, int qp) {
  return reconstruct(basis, read_block_coeffs(r), qp);
}

}  // namespace nbv
