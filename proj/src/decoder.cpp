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

#include "nbv/decoder.hpp"

#include <string>

#include "nbv/error.hpp"
#include "nbv/prediction.hpp"
#include "nbv/residual.hpp"

namespace nbv {

void ParamSetState::activate(QuantizedGnnParams q, int first_frame) {
  dequantized_ = dequantize_params(q);
  active_ = std::move(q);
  start_ = first_frame;
  ++received_;
}

const QuantizedGnnParams& ParamSetState::active_param_set() const {
  if (!active_) throw StreamError("generated block before any parameter set");
  return *active_;
}

const GnnParams& ParamSetState::active_generator() const {
  if (!active_) throw StreamError("generated block before any parameter set");
  return dequantized_;
}

Frame decode_frame(const FrameUnit& unit, const Frame* ref, int frame_index,
                   const StreamHeader& header, const ParamSetState& params,
                   DecodeReportRow* row) {
  const GridDims g = header.grid();
  if (unit.type == FrameType::kPredicted && ref == nullptr)
    throw StreamError("P frame without a reference frame");
  if (unit.blocks.size() != static_cast<std::size_t>(g.block_count()))
    throw StreamError("frame unit has the wrong block count");

  Frame recon(g.cols * kBlockSize, g.rows * kBlockSize);
  const SetContext ctx{g, params.set_start_frame(), header.gnn_interval};
  DecodeReportRow counts;
  counts.frame = frame_index;
  for (int by = 0; by < g.rows; ++by)
    for (int bx = 0; bx < g.cols; ++bx) {
      const BlockCoord c{bx, by};
      const CodedBlock& b = unit.blocks[by * g.cols + bx];
      Block32 basis;
      switch (b.mode.kind) {
        case BlockModeKind::kGenerate:
          basis = generate_block(params.active_generator(), c, frame_index, ctx);
          ++counts.n_gen;
          ++counts.gnn_calls;
          break;
        case BlockModeKind::kInter:
          if (ref == nullptr) throw StreamError("inter block without a reference frame");
          basis = motion_compensate(*ref, c, b.mode.mv);
          ++counts.n_inter;
          break;
        default:
          basis = intra_predict(recon, c, b.mode.intra_mode());
          ++counts.n_intra;
          break;
      }
      insert_block(recon, c, reconstruct(basis, b.coeffs, header.qp));
    }
  if (row != nullptr) *row = counts;
  return recon;
}

DecodeResult decode_sequence(std::span<const std::uint8_t> bytes) {
  StreamParser parser(bytes);
  DecodeResult out;
  out.header = parser.header();
  ParamSetState params;
  bool expect_intra = false;
  while (auto unit = parser.next()) {
    const int index = static_cast<int>(out.frames.size());
    if (auto* ps = std::get_if<ParamSetUnit>(&*unit)) {
      if (!out.header.gnn_enabled)
        throw StreamError("parameter set in a stream with generation disabled");
      params.activate(std::move(ps->params), index);
      expect_intra = true;
      continue;
    }
    const FrameUnit& f = std::get<FrameUnit>(*unit);
    if (expect_intra && f.type != FrameType::kIntra)
      throw StreamError("parameter set not followed by an I frame");
    expect_intra = false;
    DecodeReportRow row;
    Frame rec = decode_frame(f, out.frames.empty() ? nullptr : &out.frames.back(), index,
                             out.header, params, &row);
    out.gnn_calls += row.gnn_calls;
    out.rows.push_back(row);
    out.frames.push_back(std::move(rec));
  }
  if (expect_intra) throw StreamError("parameter set at end of stream");
  out.param_sets = params.sets_received();
  return out;
}

void write_decode_report_csv(std::ostream& os, std::span<const DecodeReportRow> rows) {
  os << "frame,n_intra,n_inter,n_gen,gnn_calls\n";
  for (const DecodeReportRow& r : rows)
    os << r.frame << ',' << r.n_intra << ',' << r.n_inter << ',' << r.n_gen << ','
       << r.gnn_calls << '\n';
}

}  // namespace nbv
