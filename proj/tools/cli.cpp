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

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <sstream>

#include "nbv/accounting.hpp"
#include "nbv/bitstream.hpp"
#include "nbv/decoder.hpp"
#include "nbv/encoder.hpp"
#include "nbv/error.hpp"
#include "nbv/metrics.hpp"
#include "nbv/synth.hpp"

namespace nbv::cli {
namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Write via a temporary and rename so failures never leave partial files.
void write_file(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path);
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  write_file(path, std::string(data.begin(), data.end()));
}

struct CodecOptions {
  std::string input;
  int width = 0;
  int height = 0;
  int frames = 0;
  int qp = 32;
  std::string gnn = "on";
  int gnn_interval = 16;
  std::string gnn_arch = "25,40,60";
  int gnn_steps = 5000;
  double gnn_lr = 1e-3;
  std::uint64_t seed = 1;
  int search_range = 16;
  std::string zoom_hint = "none";
  std::string region_kind = "selectable";
  bool force_gnn = false;
};

void add_codec_options(CLI::App* cmd, CodecOptions& o, bool with_qp) {
  cmd->add_option("--input", o.input, "Raw I420 input")->required();
  cmd->add_option("--width", o.width, "Frame width in pixels")->required();
  cmd->add_option("--height", o.height, "Frame height in pixels")->required();
  cmd->add_option("--frames", o.frames, "Frames to read (0 = all)");
  if (with_qp) cmd->add_option("--qp", o.qp, "Quantizer parameter 0..51")->check(CLI::Range(0, 51));
  cmd->add_option("--gnn", o.gnn, "Neural generation on|off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--gnn-interval", o.gnn_interval, "Frames per parameter set (1..120)")
      ->check(CLI::Range(1, 120));
  cmd->add_option("--gnn-arch", o.gnn_arch, "Hidden layer sizes, comma separated");
  cmd->add_option("--gnn-steps", o.gnn_steps, "Training steps per parameter set")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gnn-lr", o.gnn_lr, "Adam learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Training seed");
  cmd->add_option("--search-range", o.search_range, "Motion search range in pels")
      ->check(CLI::Range(0, 256));
  cmd->add_option("--zoom-hint", o.zoom_hint, "Zoom region layout: out|in|none")
      ->check(CLI::IsMember({"out", "in", "none"}));
  cmd->add_option("--region-kind", o.region_kind, "Generation regions: selectable|forced")
      ->check(CLI::IsMember({"selectable", "forced"}));
  cmd->add_flag("--force-gnn", o.force_gnn, "Keep trained parameter sets even when J is worse");
}

EncoderConfig make_config(const CodecOptions& o, int frame_count, int qp) {
  EncoderConfig cfg;
  cfg.seq.width = o.width;
  cfg.seq.height = o.height;
  cfg.seq.frame_count = frame_count;
  cfg.seq.qp = qp;
  cfg.seq.gnn_enabled = o.gnn == "on";
  cfg.seq.gnn_interval = o.gnn_interval;
  cfg.seq.gnn_arch = GnnArchitecture::parse_hidden(o.gnn_arch);
  cfg.seq.search_range = o.search_range;
  cfg.train.steps = o.gnn_steps;
  cfg.train.learning_rate = o.gnn_lr;
  cfg.train.seed = o.seed;
  cfg.zoom = parse_zoom_hint(o.zoom_hint);
  cfg.region_kind = o.region_kind == "forced" ? RegionKind::kForced : RegionKind::kSelectable;
  cfg.force_generation = o.force_gnn;
  cfg.seq.validate();
  return cfg;
}

double mean_psnr_y(const EncodeReport& r) {
  double sum = 0.0;
  for (const FrameReport& f : r.frames) sum += f.psnr.y;
  return r.frames.empty() ? 0.0 : sum / r.frames.size();
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad integer list '" + csv + "'");
    }
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

void describe_stream(std::ostream& out, std::span<const std::uint8_t> bytes) {
  StreamParser parser(bytes);
  const StreamHeader& h = parser.header();
  out << "# NBV1 " << h.width << "x" << h.height << " frames=" << h.frame_count
      << " qp=" << int(h.qp) << " gnn=" << (h.gnn_enabled ? "on" : "off")
      << " interval=" << int(h.gnn_interval) << "\n";
  out << "unit,index,kind,detail\n";
  int unit = 0;
  int frame = 0;
  while (auto u = parser.next()) {
    if (auto* ps = std::get_if<ParamSetUnit>(&*u)) {
      const GnnArchitecture a = ps->params.architecture();
      out << unit++ << ",-,param_set,arch=" << a.to_string() << " params=" << param_count(a)
          << "\n";
      continue;
    }
    const FrameUnit& f = std::get<FrameUnit>(*u);
    std::array<int, 5> hist{};
    for (const CodedBlock& b : f.blocks) ++hist[static_cast<int>(b.mode.kind)];
    out << unit++ << ',' << frame++ << ',' << (f.type == FrameType::kIntra ? "I" : "P")
        << ",regions=" << f.regions.size();
    for (int k = 0; k < 5; ++k)
      out << ' ' << mode_name(static_cast<BlockModeKind>(k)) << '=' << hist[k];
    out << "\n";
  }
}

int encode_cmd(const CodecOptions& o, const std::string& output, const std::string& report,
               std::ostream& out) {
  const std::vector<Frame> frames = read_yuv(o.input, o.width, o.height, o.frames);
  const EncoderConfig cfg = make_config(o, static_cast<int>(frames.size()), o.qp);
  const EncodeResult r = encode_sequence(frames, cfg);
  write_file(output, r.bytes);
  if (!report.empty()) {
    std::ostringstream csv;
    write_encode_report_csv(csv, r.report);
    write_file(report, csv.str());
  }
  out << "wrote " << r.bytes.size() << " bytes, " << r.report.param_sets
      << " parameter set(s), " << r.report.mode_histogram[static_cast<int>(BlockModeKind::kGenerate)]
      << " generated block(s), mean PSNR-Y " << std::fixed << std::setprecision(3)
      << mean_psnr_y(r.report) << " dB\n";
  return 0;
}

int decode_cmd(const std::string& input, const std::string& output, const std::string& report,
               std::ostream& out) {
  const std::vector<std::uint8_t> bytes = read_file(input);
  const DecodeResult r = decode_sequence(bytes);
  write_yuv(output, r.frames, r.header.width, r.header.height);
  if (!report.empty()) {
    std::ostringstream csv;
    write_decode_report_csv(csv, r.rows);
    write_file(report, csv.str());
  }
  out << "decoded " << r.frames.size() << " frame(s), " << r.gnn_calls << " GNN call(s)\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-based video codec with neural block generation"};
  app.require_subcommand(1);

  CodecOptions enc;
  std::string enc_output;
  std::string enc_report;
  auto* encode = app.add_subcommand("encode", "Encode raw I420 into an NBV1 stream");
  add_codec_options(encode, enc, true);
  encode->add_option("--output", enc_output, "NBV1 output")->required();
  encode->add_option("--report", enc_report, "Per-frame CSV report");

  std::string dec_input;
  std::string dec_output;
  std::string dec_report;
  auto* decode = app.add_subcommand("decode", "Decode an NBV1 stream to raw I420");
  decode->add_option("--input", dec_input, "NBV1 input")->required();
  decode->add_option("--output", dec_output, "Raw I420 output")->required();
  decode->add_option("--report", dec_report, "Per-frame CSV report");

  std::string synth_kind = "pan";
  SynthParams sp;
  std::string synth_output;
  auto* synth = app.add_subcommand("synth", "Write a procedural test sequence");
  synth->add_option("--kind", synth_kind, "static|pan|zoom_out|zoom_in");
  synth->add_option("--width", sp.width, "Width in pixels");
  synth->add_option("--height", sp.height, "Height in pixels");
  synth->add_option("--frames", sp.frames, "Frame count");
  synth->add_option("--vx", sp.vx, "Horizontal pan velocity, pels/frame");
  synth->add_option("--vy", sp.vy, "Vertical pan velocity, pels/frame");
  synth->add_option("--zoom-rate", sp.zoom_rate, "Relative zoom per frame");
  synth->add_option("--seed", sp.seed, "Canvas seed");
  synth->add_option("--output", synth_output, "Raw I420 output")->required();

  std::string met_a;
  std::string met_b;
  int met_w = 0;
  int met_h = 0;
  int met_frames = 0;
  auto* metrics = app.add_subcommand("metrics", "Per-frame PSNR between two I420 files");
  metrics->add_option("--a", met_a, "Reference I420")->required();
  metrics->add_option("--b", met_b, "Test I420")->required();
  metrics->add_option("--width", met_w, "Width")->required();
  metrics->add_option("--height", met_h, "Height")->required();
  metrics->add_option("--frames", met_frames, "Frames (0 = all)");

  std::string insp_input;
  auto* inspect = app.add_subcommand("inspect", "Dump stream units and bit accounting");
  inspect->add_option("--input", insp_input, "NBV1 input")->required();

  CodecOptions sw;
  std::string sweep_qps = "8,20,32";
  std::string sweep_output;
  auto* sweep = app.add_subcommand("sweep", "Encode across QPs with generation on and off");
  add_codec_options(sweep, sw, false);
  sweep->add_option("--qps", sweep_qps, "Comma-separated QP list");
  sweep->add_option("--output", sweep_output, "CSV output (default stdout)");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("nbv");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*encode) return encode_cmd(enc, enc_output, enc_report, out);
    if (*decode) return decode_cmd(dec_input, dec_output, dec_report, out);
    if (*synth) {
      sp.kind = parse_synth_kind(synth_kind);
      const std::vector<Frame> frames = synth_sequence(sp);
      const std::size_t n = write_yuv(synth_output, frames, sp.width, sp.height);
      out << "wrote " << frames.size() << " frame(s), " << n << " bytes\n";
      return 0;
    }
    if (*metrics) {
      const auto a = read_yuv(met_a, met_w, met_h, met_frames);
      const auto b = read_yuv(met_b, met_w, met_h, met_frames);
      if (a.size() != b.size()) throw UsageError("inputs have different frame counts");
      out << "frame,psnr_y,psnr_cb,psnr_cr\n" << std::fixed << std::setprecision(4);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const FramePsnr p = frame_psnr(crop(a[i], met_w, met_h), crop(b[i], met_w, met_h));
        out << i << ',' << p.y << ',' << p.cb << ',' << p.cr << '\n';
      }
      return 0;
    }
    if (*inspect) {
      const std::vector<std::uint8_t> bytes = read_file(insp_input);
      describe_stream(out, bytes);
      write_accounting_csv(out, bit_accounting(bytes));
      return 0;
    }
    if (*sweep) {
      const std::vector<int> qps = parse_int_list(sweep_qps);
      const std::vector<Frame> frames = read_yuv(sw.input, sw.width, sw.height, sw.frames);
      std::ostringstream csv;
      csv << "qp,mode,total_bits,mean_psnr_y\n" << std::fixed << std::setprecision(4);
      for (int qp : qps) {
        for (const char* mode : {"on", "off"}) {
          CodecOptions o = sw;
          o.gnn = mode;
          const EncodeResult r =
              encode_sequence(frames, make_config(o, static_cast<int>(frames.size()), qp));
          csv << qp << ",gnn_" << mode << ',' << r.bytes.size() * 8 << ','
              << mean_psnr_y(r.report) << '\n';
        }
      }
      if (sweep_output.empty())
        out << csv.str();
      else
        write_file(sweep_output, csv.str());
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const StreamError& e) {
    err << "stream error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nbv::cli
