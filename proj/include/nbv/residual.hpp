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
#include <cmath>
#include <cstdint>

#include "nbv/bit_io.hpp"
#include "nbv/frame.hpp"

namespace nbv {

inline constexpr int kTileSize = 8;
inline constexpr int kTileCoeffs = kTileSize * kTileSize;
// 16 luma tiles, then 4 Cb, then 4 Cr, each group in raster order.
inline constexpr int kTilesPerBlock = 24;
inline constexpr int kMinQp = 0;
inline constexpr int kMaxQp = 51;

// 8x8 real tile, raster order.
using Tile = std::array<double, kTileCoeffs>;
// 64 quantized levels in zigzag scan order.
using CoeffBlock = std::array<std::int16_t, kTileCoeffs>;
using BlockCoeffs = std::array<CoeffBlock, kTilesPerBlock>;

// Raster index of the i-th zigzag position.
const std::array<int, kTileCoeffs>& zigzag_order();

// Orthonormal 2-D DCT-II and its inverse.
Tile dct8_forward(const Tile& tile);
Tile dct8_inverse(const Tile& coeffs);

double qstep(int qp);
void check_qp(int qp);

// Round half away from zero. Used for every real-to-integer conversion.
inline double round_half_away(double v) { return std::round(v); }

CoeffBlock quantize(const Tile& coeffs, int qp);
Tile dequantize(const CoeffBlock& levels, int qp);

// ue(nonzero count), then per nonzero: ue(zero run before it), se(level).
void code_coeffs(BitWriter& w, const CoeffBlock& levels);
CoeffBlock decode_coeffs(BitReader& r);

// Forward path: transform and quantize source - basis for all 24 tiles.
BlockCoeffs residual_coeffs(const Block32& source, const Block32& basis, int qp);
// Shared by encoder and decoder: basis + dequantized residual, clamped.
Block32 reconstruct(const Block32& basis, const BlockCoeffs& coeffs, int qp);

void write_block_coeffs(BitWriter& w, const BlockCoeffs& coeffs);
BlockCoeffs read_block_coeffs(BitReader& r);

struct ResidualResult {
  Block32 recon;
  BlockCoeffs coeffs{};
  std::uint64_t bits = 0;
};

ResidualResult code_block_residual(BitWriter& w, const Block32& source, const Block32& basis,
                                   int qp);
Block32 decode_block_residual(BitReader& r, const Block32& basis, int qp);

}  // namespace nbv
