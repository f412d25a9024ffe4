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

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nbv/bitstream.hpp"
#include "nbv/frame.hpp"
#include "nbv/gnn.hpp"

namespace nbv {

// Parameter set in force: the most recent one in stream order.
class ParamSetState {
 public:
  void activate(QuantizedGnnParams q, int first_frame);
  bool has_active() const { return active_.has_value(); }
  // Throws StreamError when no set has been received yet.
  const QuantizedGnnParams& active_param_set() const;
  const GnnParams& active_generator() const;
  // Index of the first frame the active set applies to.
  int set_start_frame() const { return start_; }
  int sets_received() const { return received_; }

 private:
  std::optional<QuantizedGnnParams> active_;
  GnnParams dequantized_;
  int start_ = 0;
  int received_ = 0;
};

struct DecodeReportRow {
  int frame = 0;
  int n_intra = 0;
  int n_inter = 0;
  int n_gen = 0;
  int gnn_calls = 0;
};

struct DecodeResult {
  StreamHeader header;
  std::vector<Frame> frames;  // padded; crop with header.width/height
  std::vector<DecodeReportRow> rows;
  std::uint64_t gnn_calls = 0;
  int param_sets = 0;
};

// Reconstructs one frame unit from its reference and the parameter state.
Frame decode_frame(const FrameUnit& unit, const Frame* ref, int frame_index,
                   const StreamHeader& header, const ParamSetState& params,
                   DecodeReportRow* row = nullptr);

DecodeResult decode_sequence(std::span<const std::uint8_t> bytes);

// frame,n_intra,n_inter,n_gen,gnn_calls
void write_decode_report_csv(std::ostream& os, std::span<const DecodeReportRow> rows);

}  // namespace nbv
