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

#include "nbv/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

#include "nbv/error.hpp"
#include "nbv/prediction.hpp"
#include "nbv/residual.hpp"

namespace nbv {

void SequenceConfig::validate() const {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0 || width > 65535 ||
      height > 65535)
    throw UsageError("width and height must be even and in [2, 65535]");
  if (frame_count < 1) throw UsageError("need at least one frame");
  check_qp(qp);
  if (gnn_interval < 1 || gnn_interval > kMaxGnnInterval)
    throw UsageError("gnn interval " + std::to_string(gnn_interval) + " outside [1,120]");
  if (search_range < 0 || search_range > 256) throw UsageError("search range outside [0,256]");
  if (gnn_enabled) gnn_arch.validate_generator();
}

double lambda(int qp) {
  check_qp(qp);
  return 0.85 * std::exp2((qp - 12) / 3.0);
}

RdCost RdCost::make(std::uint64_t distortion, std::uint64_t bits, double lambda) {
  return {distortion, bits, static_cast<double>(distortion) + lambda * static_cast<double>(bits)};
}

BlockMode choose_block_mode(std::span<const ModeCandidate> candidates) {
  if (candidates.empty()) throw UsageError("choose_block_mode: no candidates");
  const ModeCandidate* best = &candidates[0];
  for (const ModeCandidate& c : candidates.subspan(1)) {
    if (c.cost.j < best->cost.j || (c.cost.j == best->cost.j && c.mode.kind < best->mode.kind))
      best = &c;
  }
  return best->mode;
}

Dataset build_period_dataset(std::span<const Frame> period_frames,
                             std::span<const std::vector<RegionSpec>> regions,
                             const SetContext& ctx) {
  if (regions.size() != period_frames.size())
    throw UsageError("need one region list per period frame");
  Dataset data(kGnnInputs, kGnnOutputs);
  for (std::size_t f = 0; f < period_frames.size(); ++f) {
    const GridDims g = grid_of(period_frames[f]);
    const std::vector<int> member = region_membership(regions[f], g);
    for (int by = 0; by < g.rows; ++by)
      for (int bx = 0; bx < g.cols; ++bx) {
        if (member[by * g.cols + bx] < 0) continue;
        const BlockCoord c{bx, by};
        const GnnInput in = make_input(c, ctx.set_start_frame + static_cast<int>(f), ctx);
        const double x[kGnnInputs] = {in.bx, in.by, in.frame};
        data.add(x, normalized_block(extract_block(period_frames[f], c)));
      }
  }
  return data;
}

std::optional<TrainedSet> train_param_set(std::span<const Frame> period_frames,
                                          std::span<const std::vector<RegionSpec>> regions,
                                          const SetContext& ctx, const GnnArchitecture& arch,
                                          const TrainOptions& options) {
  const Dataset data = build_period_dataset(period_frames, regions, ctx);
  if (data.empty()) return std::nullopt;
  arch.validate_generator();
  TrainResult r = train(arch, data, options);
  return TrainedSet{quantize_params(r.params), data.size(), r.final_loss};
}

namespace {

struct FrameEncoding {
  FrameUnit unit;
  Frame recon;
  std::uint64_t ssd = 0;
  BitBreakdown bits;
  int n_gen = 0;
};

struct Generator {
  GnnParams params;  // dequantized, exactly what the decoder evaluates
  SetContext ctx;
};

class FrameEncoder {
 public:
  FrameEncoder(const EncoderConfig& cfg, double lambda) : cfg_(cfg), lambda_(lambda) {}

  FrameEncoding encode(const Frame& src, const Frame* ref, int frame_index,
                       const std::vector<RegionSpec>& regions, const Generator* gen) const {
    const GridDims g = grid_of(src);
    const FrameType type = ref == nullptr ? FrameType::kIntra : FrameType::kPredicted;
    FrameEncoding out;
    out.unit.type = type;
    out.unit.regions = regions;
    out.unit.blocks.resize(g.block_count());
    out.recon = Frame(src.width, src.height);
    const std::vector<int> member = region_membership(regions, g);
    const int qp = cfg_.seq.qp;

    for (int by = 0; by < g.rows; ++by) {
      MotionVector pred{};
      for (int bx = 0; bx < g.cols; ++bx) {
        const BlockCoord c{bx, by};
        const int idx = by * g.cols + bx;
        const Block32 source = extract_block(src, c);
        const int reg = member[idx];
        const bool forced = reg >= 0 && regions[reg].kind == RegionKind::kForced;
        const bool selectable = reg >= 0 && !forced;
        if (reg >= 0 && gen == nullptr) throw UsageError("regions present without a generator");

        struct Trial {
          BlockMode mode;
          ResidualResult res;
        };
        std::vector<Trial> trials;
        std::vector<ModeCandidate> candidates;
        auto evaluate = [&](BlockMode mode, const Block32& basis) {
          BitWriter scratch;
          if (selectable) scratch.write_bit(mode.kind == BlockModeKind::kGenerate);
          if (mode.kind != BlockModeKind::kGenerate) write_block_header(scratch, mode, type, pred);
          ResidualResult res = code_block_residual(scratch, source, basis, qp);
          candidates.push_back({mode, RdCost::make(block_ssd(res.recon, source),
                                                   scratch.bit_count(), lambda_)});
          trials.push_back({mode, std::move(res)});
        };

        if (reg >= 0) evaluate(BlockMode::generate(), generate_block(gen->params, c, frame_index, gen->ctx));
        if (!forced) {
          if (ref != nullptr) {
            const MotionSearchResult ms = motion_search(source, *ref, c, cfg_.seq.search_range);
            evaluate(BlockMode::inter(ms.mv), motion_compensate(*ref, c, ms.mv));
          }
          for (IntraMode m : {IntraMode::kDc, IntraMode::kHorizontal, IntraMode::kVertical})
            evaluate(BlockMode::intra(m), intra_predict(out.recon, c, m));
        }

        const BlockMode chosen = choose_block_mode(candidates);
        const auto it = std::find_if(trials.begin(), trials.end(),
                                     [&](const Trial& t) { return t.mode == chosen; });
        out.unit.blocks[idx] = {chosen, it->res.coeffs};
        insert_block(out.recon, c, it->res.recon);
        out.ssd += block_ssd(it->res.recon, source);
        if (chosen.kind == BlockModeKind::kGenerate) ++out.n_gen;
        pred = chosen.kind == BlockModeKind::kInter ? chosen.mv : MotionVector{};
      }
    }
    BitWriter w;
    write_frame(w, out.unit, g, &out.bits);
    return out;
  }

 private:
  const EncoderConfig& cfg_;
  double lambda_;
};

struct PeriodEncoding {
  std::vector<Unit> units;
  std::vector<FrameEncoding> frames;
  std::uint64_t param_bits = 0;
  std::uint64_t ssd = 0;
  std::uint64_t bits = 0;
  double j = 0.0;
};

PeriodEncoding encode_period(std::span<const Frame> frames, int start,
                             const std::vector<std::vector<RegionSpec>>& regions,
                             const std::optional<TrainedSet>& trained, const EncoderConfig& cfg,
                             double lam) {
  PeriodEncoding p;
  std::optional<Generator> gen;
  if (trained) {
    gen = Generator{dequantize_params(trained->params),
                    SetContext{grid_of(frames[0]), start, cfg.seq.gnn_interval}};
    p.param_bits = param_set_bits(trained->params.architecture());
    p.units.push_back(ParamSetUnit{trained->params});
  }
  const FrameEncoder fe(cfg, lam);
  static const std::vector<RegionSpec> kNoRegions;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame* ref = f == 0 ? nullptr : &p.frames.back().recon;
    FrameEncoding enc = fe.encode(frames[f], ref, start + static_cast<int>(f),
                                  gen ? regions[f] : kNoRegions, gen ? &*gen : nullptr);
    p.ssd += enc.ssd;
    p.bits += enc.bits.total();
    p.units.push_back(enc.unit);
    p.frames.push_back(std::move(enc));
  }
  p.bits += p.param_bits;
  p.j = static_cast<double>(p.ssd) + lam * static_cast<double>(p.bits);
  return p;
}

}  // namespace

EncodeResult encode_sequence(std::span<const Frame> frames, const EncoderConfig& cfg) {
  cfg.seq.validate();
  if (frames.empty()) throw UsageError("no frames to encode");
  if (static_cast<int>(frames.size()) != cfg.seq.frame_count)
    throw UsageError("frame count does not match configuration");
  const GridDims grid = block_grid_dims(cfg.seq.width, cfg.seq.height);
  for (const Frame& f : frames)
    if (f.width != grid.cols * kBlockSize || f.height != grid.rows * kBlockSize)
      throw UsageError("input frames must be padded to the configured block grid");

  const double lam = lambda(cfg.seq.qp);
  StreamHeader header;
  header.width = static_cast<std::uint16_t>(cfg.seq.width);
  header.height = static_cast<std::uint16_t>(cfg.seq.height);
  header.frame_count = static_cast<std::uint32_t>(frames.size());
  header.qp = static_cast<std::uint8_t>(cfg.seq.qp);
  header.gnn_enabled = cfg.seq.gnn_enabled;
  header.gnn_interval = static_cast<std::uint8_t>(cfg.seq.gnn_interval);

  EncodeResult result;
  EncodeReport& report = result.report;
  report.lambda = lam;
  std::vector<Unit> units;
  const int n = static_cast<int>(frames.size());

  for (int start = 0; start < n; start += cfg.seq.gnn_interval) {
    const int end = std::min(n, start + cfg.seq.gnn_interval);
    const auto period = frames.subspan(start, end - start);

    PeriodReport pr;
    pr.start = start;
    pr.frames = end - start;

    std::vector<std::vector<RegionSpec>> regions(period.size());
    std::optional<TrainedSet> trained;
    if (cfg.seq.gnn_enabled) {
      for (int t = start; t < end; ++t) {
        regions[t - start] = plan_frame_regions(frames, t, start, cfg);
        for (const RegionSpec& r : regions[t - start]) pr.region_blocks += r.block_count();
      }
      trained = train_param_set(period, regions, SetContext{grid, start, cfg.seq.gnn_interval},
                                cfg.seq.gnn_arch, cfg.train);
    }

    PeriodEncoding chosen = encode_period(period, start, regions, std::nullopt, cfg, lam);
    pr.j_without_gnn = chosen.j;
    pr.j_with_gnn = chosen.j;
    if (trained) {
      pr.dataset_size = trained->dataset_size;
      PeriodEncoding with = encode_period(period, start, regions, trained, cfg, lam);
      pr.j_with_gnn = with.j;
      if (with.j < chosen.j || cfg.force_generation) {
        chosen = std::move(with);
        pr.used_gnn = true;
        ++report.param_sets;
      }
    }
    report.periods.push_back(pr);

    for (std::size_t f = 0; f < chosen.frames.size(); ++f) {
      FrameEncoding& enc = chosen.frames[f];
      FrameReport fr;
      fr.frame = start + static_cast<int>(f);
      fr.type = enc.unit.type;
      fr.psnr = frame_psnr(enc.recon, period[f]);
      fr.bits = enc.bits;
      if (f == 0) fr.bits[BitCategory::kParams] += chosen.param_bits;
      if (fr.frame == 0) fr.bits[BitCategory::kHeader] += kStreamHeaderBytes * 8;
      fr.n_gen = enc.n_gen;
      fr.ssd = enc.ssd;
      for (const CodedBlock& b : enc.unit.blocks)
        ++report.mode_histogram[static_cast<int>(b.mode.kind)];
      report.bits += fr.bits;
      report.total_ssd += fr.ssd;
      report.frames.push_back(fr);
      result.recon.push_back(std::move(enc.recon));
    }
    for (Unit& u : chosen.units) units.push_back(std::move(u));
  }

  BitBreakdown written;
  result.bytes = write_stream(header, units, &written);
  if (written != report.bits || written.total() != result.bytes.size() * 8)
    throw Error("internal error: bit accounting does not match the written stream");
  report.total_j =
      static_cast<double>(report.total_ssd) + lam * static_cast<double>(written.total());
  return result;
}

void write_encode_report_csv(std::ostream& os, const EncodeReport& report) {
  os << "frame,type,psnr_y,psnr_cb,psnr_cr,bits_header,bits_params,bits_modes,bits_mv,"
        "bits_residual,n_gen_blocks\n";
  os << std::fixed << std::setprecision(4);
  for (const FrameReport& f : report.frames) {
    os << f.frame << ',' << (f.type == FrameType::kIntra ? 'I' : 'P') << ',' << f.psnr.y << ','
       << f.psnr.cb << ',' << f.psnr.cr << ',' << f.bits[BitCategory::kHeader] << ','
       << f.bits[BitCategory::kParams] << ',' << f.bits[BitCategory::kModes] << ','
       << f.bits[BitCategory::kMv] << ',' << f.bits[BitCategory::kResidual] << ',' << f.n_gen
       << '\n';
  }
}

}  // namespace nbv
