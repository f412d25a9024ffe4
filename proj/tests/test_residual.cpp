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
#include <numbers>
#include <random>

#include "nbv/error.hpp"
#include "nbv/prediction.hpp"
#include "nbv/residual.hpp"
#include "test_util.hpp"

using namespace nbv;

namespace {

// Direct evaluation of the orthonormal 2-D DCT-II definition.
Tile naive_dct(const Tile& x) {
  Tile out{};
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      const double cv = v == 0 ? std::sqrt(0.125) : 0.5;
      double s = 0.0;
      for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i)
          s += x[j * 8 + i] * std::cos((2 * i + 1) * u * std::numbers::pi / 16) *
               std::cos((2 * j + 1) * v * std::numbers::pi / 16);
      out[v * 8 + u] = cu * cv * s;
    }
  return out;
}

Tile random_tile(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Tile t;
  for (double& v : t) v = d(rng);
  return t;
}

CoeffBlock random_sparse(std::mt19937_64& rng) {
  CoeffBlock c{};
  const int nonzero = static_cast<int>(rng() % 65);
  std::uniform_int_distribution<int> lvl(-32767, 32767);
  std::uniform_int_distribution<int> small(-20, 20);
  for (int k = 0; k < nonzero; ++k) {
    const int pos = static_cast<int>(rng() % 64);
    int v = (rng() % 4 == 0) ? lvl(rng) : small(rng);
    c[pos] = static_cast<std::int16_t>(v);
  }
  return c;
}

std::uint64_t total_ssd(const Block32& a, const Block32& b) { return block_ssd(a, b); }

}  // namespace

TEST_SUITE("residual") {

TEST_CASE("dct of constant and zero tiles") {
  Tile sixteen;
  sixteen.fill(16.0);
  const Tile c = dct8_forward(sixteen);
  CHECK(c[0] == doctest::Approx(128.0).epsilon(1e-12));
  for (int i = 1; i < 64; ++i) CHECK(std::abs(c[i]) < 1e-12);
  const Tile z = dct8_forward(Tile{});
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("dct matches the definition") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Tile x = random_tile(rng, -255, 255);
    const Tile a = dct8_forward(x);
    const Tile b = naive_dct(x);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }
}

TEST_CASE("dct inverse and energy") {
  std::mt19937_64 rng(37);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Tile x = random_tile(rng, -255, 255);
    const Tile c = dct8_forward(x);
    const Tile back = dct8_inverse(c);
    double ex = 0.0;
    double ec = 0.0;
    for (int i = 0; i < 64; ++i) {
      worst = std::max(worst, std::abs(back[i] - x[i]));
      ex += x[i] * x[i];
      ec += c[i] * c[i];
    }
    CHECK(std::abs(ex - ec) <= 1e-9 * ex);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("zigzag follows anti-diagonals") {
  std::array<int, 64> expect{};
  int k = 0;
  for (int s = 0; s < 15; ++s) {
    const int lo = std::max(0, s - 7);
    const int hi = std::min(s, 7);
    if (s % 2 == 1)
      for (int r = lo; r <= hi; ++r) expect[k++] = r * 8 + (s - r);
    else
      for (int r = hi; r >= lo; --r) expect[k++] = r * 8 + (s - r);
  }
  CHECK(zigzag_order() == expect);
  CHECK(zigzag_order()[2] == 8);
  CHECK(zigzag_order()[63] == 63);
}

TEST_CASE("quantizer step sizes") {
  CHECK(qstep(0) == 1.0);
  CHECK(qstep(6) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(qstep(12) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(qstep(51) == doctest::Approx(362.0387).epsilon(1e-7));
  CHECK_THROWS_AS(check_qp(-1), UsageError);
  CHECK_THROWS_AS(check_qp(52), UsageError);
}

TEST_CASE("quantization rounds half away from zero") {
  Tile t{};
  t[0] = 5.0;
  t[1] = -5.0;
  t[8] = 4.9;
  CoeffBlock q = quantize(t, 6);
  CHECK(q[0] == 3);
  CHECK(q[1] == -3);
  CHECK(q[2] == 2);  // zigzag position 2 is raster 8

  Tile u{};
  u[0] = -0.4;
  u[1] = 0.5;
  u[8] = -0.5;
  q = quantize(u, 0);
  CHECK(q[0] == 0);
  CHECK(q[1] == 1);
  CHECK(q[2] == -1);
  CHECK(round_half_away(-2.5) == -3.0);
  CHECK(round_half_away(2.5) == 3.0);
}

TEST_CASE("step-one quantizer error bound") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const Tile c = random_tile(rng, -2000, 2000);
    const Tile d = dequantize(quantize(c, 0), 0);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(d[i] - c[i]) <= 0.5);
  }
}

TEST_CASE("dequantize scales levels back in raster order") {
  CoeffBlock q{};
  q[0] = 3;
  q[2] = -1;
  const Tile d = dequantize(q, 12);
  CHECK(d[0] == doctest::Approx(12.0));
  CHECK(d[8] == doctest::Approx(-4.0));
  CHECK(d[1] == 0.0);
}

TEST_CASE("coefficient codewords") {
  BitWriter w;
  code_coeffs(w, CoeffBlock{});
  CHECK(test::bit_string(w) == "1");

  BitWriter dc;
  CoeffBlock c{};
  c[0] = 3;
  code_coeffs(dc, c);
  CHECK(test::bit_string(dc) == "010" "1" "00110");

  BitWriter last;
  CoeffBlock e{};
  e[63] = -1;
  code_coeffs(last, e);
  BitWriter expect;
  write_ue(expect, 1);
  write_ue(expect, 63);
  write_se(expect, -1);
  CHECK(test::bit_string(last) == test::bit_string(expect));
}

TEST_CASE("coefficient blocks round trip") {
  std::mt19937_64 rng(43);
  std::vector<CoeffBlock> blocks;
  BitWriter w;
  for (int i = 0; i < 10000; ++i) {
    blocks.push_back(random_sparse(rng));
    code_coeffs(w, blocks.back());
  }
  BitReader r(w.bytes());
  for (const CoeffBlock& b : blocks) CHECK(decode_coeffs(r) == b);
  CHECK(r.position() == w.bit_count());

  CoeffBlock bad{};
  bad[5] = -32768;
  BitWriter reject;
  CHECK_THROWS_AS(code_coeffs(reject, bad), UsageError);
}

TEST_CASE("malformed coefficient data") {
  auto decode = [](auto&& fill) {
    BitWriter w;
    fill(w);
    w.align();
    BitReader r(w.bytes());
    return decode_coeffs(r);
  };
  CHECK_THROWS_AS(decode([](BitWriter& w) { write_ue(w, 65); }), StreamError);
  CHECK_THROWS_AS(decode([](BitWriter& w) {
                    write_ue(w, 1);
                    write_ue(w, 64);
                    write_se(w, 1);
                  }),
                  StreamError);
  CHECK_THROWS_AS(decode([](BitWriter& w) {
                    write_ue(w, 2);
                    write_ue(w, 60);
                    write_se(w, 1);
                    write_ue(w, 3);
                    write_se(w, 1);
                  }),
                  StreamError);
  CHECK_THROWS_AS(decode([](BitWriter& w) {
                    write_ue(w, 1);
                    write_ue(w, 0);
                    write_se(w, 0);
                  }),
                  StreamError);
  CHECK_THROWS_AS(decode([](BitWriter& w) {
                    write_ue(w, 1);
                    write_ue(w, 0);
                    write_se(w, 40000);
                  }),
                  StreamError);
}

TEST_CASE("zero residual codes as empty tiles") {
  std::mt19937_64 rng(47);
  const Block32 src = test::random_block(rng);
  for (int qp : {0, 20, 51}) {
    BitWriter w;
    const ResidualResult r = code_block_residual(w, src, src, qp);
    CHECK(r.recon == src);
    CHECK(r.bits == 24);
    CHECK(test::bit_string(w) == std::string(24, '1'));
  }
}

TEST_CASE("lossless-step residual stays within two levels") {
  std::mt19937_64 rng(53);
  int worst = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Block32 src = test::random_block(rng);
    const Block32 basis = test::random_block(rng);
    BitWriter w;
    const ResidualResult r = code_block_residual(w, src, basis, 0);
    for (int i = 0; i < kBlockSamples; ++i)
      worst = std::max(worst, std::abs(int(r.recon.sample(i)) - int(src.sample(i))));
  }
  CHECK(worst <= 2);
}

TEST_CASE("decoder consumes exactly the encoder's bits") {
  std::mt19937_64 rng(59);
  for (int qp : {0, 8, 22, 37, 51}) {
    const Block32 src = test::random_block(rng);
    Block32 basis = Block32::filled(128);
    BitWriter w;
    w.write_bits(5, 3);
    const ResidualResult r = code_block_residual(w, src, basis, qp);
    CHECK(r.bits + 3 == w.bit_count());
    w.align();
    BitReader rd(w.bytes());
    rd.read_bits(3);
    const Block32 dec = decode_block_residual(rd, basis, qp);
    CHECK(rd.position() == r.bits + 3);
    CHECK(dec == r.recon);
    CHECK(reconstruct(basis, r.coeffs, qp) == r.recon);
    CHECK(residual_coeffs(src, basis, qp) == r.coeffs);
  }
}

TEST_CASE("coarser quantization never reduces error on a fixture") {
  std::mt19937_64 rng(61);
  const Block32 src = test::random_block(rng);
  Block32 basis;
  for (int i = 0; i < kBlockSamples; ++i) basis.set_sample(i, static_cast<std::uint8_t>(i % 200));
  std::uint64_t prev = 0;
  for (int qp : {0, 12, 24, 36}) {
    BitWriter w;
    const std::uint64_t e = total_ssd(code_block_residual(w, src, basis, qp).recon, src);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("block coefficient layout") {
  std::mt19937_64 rng(67);
  BlockCoeffs all{};
  for (CoeffBlock& c : all) c = random_sparse(rng);
  BitWriter w;
  write_block_coeffs(w, all);
  BitReader r(w.bytes());
  CHECK(read_block_coeffs(r) == all);

  // Tile 16 is the first Cb tile.
  Block32 src = Block32::filled(100);
  src.cb[0] = 200;
  const BlockCoeffs c = residual_coeffs(src, Block32::filled(100), 10);
  for (int t = 0; t < 24; ++t) CHECK((c[t] != CoeffBlock{}) == (t == 16));
}

}  // TEST_SUITE
