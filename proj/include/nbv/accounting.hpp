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

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>

#include "nbv/bitstream.hpp"
#include "nbv/frame.hpp"

namespace nbv {

struct BitAccounting {
  BitBreakdown bits;
  std::uint64_t stream_bits = 0;
  int param_sets = 0;
  int frames = 0;

  double share(BitCategory c) const {
    return stream_bits == 0 ? 0.0 : static_cast<double>(bits[c]) / stream_bits;
  }
};

// Parses the stream and tags every bit with its category.
BitAccounting bit_accounting(std::span<const std::uint8_t> stream);

// category,bits,share
void write_accounting_csv(std::ostream& os, const BitAccounting& acct);

// Fraction of a channel taken by one parameter set per `seconds_per_set`.
double parameter_bandwidth_share(std::size_t params, int bits_per_param, double bitrate_bps,
                                 double seconds_per_set);

// Half the blocks of one full column plus one full row of the grid.
double half_edge_blocks(GridDims grid);

double generated_block_share(double generated_per_frame, GridDims grid);

double gnn_calls_per_second(double generated_per_frame, double fps);

}  // namespace nbv
