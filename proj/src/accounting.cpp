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

#include "nbv/accounting.hpp"

#include <iomanip>

#include "nbv/error.hpp"

namespace nbv {

BitAccounting bit_accounting(std::span<const std::uint8_t> stream) {
  StreamParser parser(stream);
  BitAccounting acct;
  while (auto u = parser.next()) {
    if (std::holds_alternative<ParamSetUnit>(*u))
      ++acct.param_sets;
    else
      ++acct.frames;
  }
  acct.bits = parser.breakdown();
  acct.stream_bits = static_cast<std::uint64_t>(stream.size()) * 8;
  return acct;
}

void write_accounting_csv(std::ostream& os, const BitAccounting& acct) {
  os << "category,bits,share\n" << std::fixed << std::setprecision(6);
  for (int i = 0; i < kBitCategoryCount; ++i) {
    const auto c = static_cast<BitCategory>(i);
    os << category_name(c) << ',' << acct.bits[c] << ',' << acct.share(c) << '\n';
  }
  os << "total," << acct.bits.total() << ',' << (acct.stream_bits ? 1.0 : 0.0) << '\n';
}

double parameter_bandwidth_share(std::size_t params, int bits_per_param, double bitrate_bps,
                                 double seconds_per_set) {
  if (!(bitrate_bps > 0.0) || !(seconds_per_set > 0.0))
    throw UsageError("bitrate and set period must be positive");
  return static_cast<double>(params) * bits_per_param / (bitrate_bps * seconds_per_set);
}

double half_edge_blocks(GridDims grid) { return 0.5 * (grid.cols + grid.rows); }

double generated_block_share(double generated_per_frame, GridDims grid) {
  if (grid.block_count() <= 0) throw UsageError("empty block grid");
  return generated_per_frame / grid.block_count();
}

double gnn_calls_per_second(double generated_per_frame, double fps) {
  return generated_per_frame * fps;
}

}  // namespace nbv
