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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "nbv/accounting.hpp"
#include "nbv/bitstream.hpp"
#include "nbv/frame.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nbv");
  std::ostringstream out, err;
  const int code = nbv::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return lines(ss.str());
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("nbv_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const Run s = run({"synth", "--kind", "pan", "--width", "96", "--height", "64", "--frames",
                       "4", "--output", path("in.yuv")});
    REQUIRE(s.code == 0);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::vector<std::string> encode_args(const std::string& out) const {
    return {"encode", "--input", path("in.yuv"), "--width", "96", "--height", "64",
            "--qp", "28", "--gnn-steps", "20", "--gnn-arch", "4", "--gnn-interval", "2",
            "--output", path(out)};
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("encode and decode round trip") {
  Workspace ws;
  std::vector<std::string> enc = ws.encode_args("a.nbv");
  enc.insert(enc.end(), {"--report", ws.path("enc.csv")});
  const Run e = run(enc);
  REQUIRE(e.code == 0);
  CHECK(read_lines(ws.path("enc.csv")).size() == 5);

  const Run d = run({"decode", "--input", ws.path("a.nbv"), "--output", ws.path("out.yuv"),
                     "--report", ws.path("dec.csv")});
  REQUIRE(d.code == 0);
  CHECK(fs::file_size(ws.path("out.yuv")) == 4 * 96 * 64 * 3 / 2);
  CHECK(read_lines(ws.path("dec.csv")).size() == 5);

  const Run m = run({"metrics", "--a", ws.path("in.yuv"), "--b", ws.path("out.yuv"), "--width",
                     "96", "--height", "64"});
  REQUIRE(m.code == 0);
  const auto rows = lines(m.out);
  CHECK(rows.size() == 5);
  CHECK(rows[0] == "frame,psnr_y,psnr_cb,psnr_cr");
  CHECK(std::stod(rows[1].substr(2)) > 25.0);
}

TEST_CASE("encodes are reproducible") {
  Workspace ws;
  REQUIRE(run(ws.encode_args("a.nbv")).code == 0);
  REQUIRE(run(ws.encode_args("b.nbv")).code == 0);
  std::ifstream a(ws.path("a.nbv"), std::ios::binary), b(ws.path("b.nbv"), std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("generation off means no parameter sets") {
  Workspace ws;
  std::vector<std::string> enc = ws.encode_args("off.nbv");
  enc.insert(enc.end(), {"--gnn", "off"});
  REQUIRE(run(enc).code == 0);
  const Run i = run({"inspect", "--input", ws.path("off.nbv")});
  REQUIRE(i.code == 0);
  CHECK(i.out.find("param_set,arch") == std::string::npos);
  CHECK(i.out.find("gnn=off") != std::string::npos);
}

TEST_CASE("forced generation shows the default architecture") {
  Workspace ws;
  const Run e = run({"encode", "--input", ws.path("in.yuv"), "--width", "96", "--height", "64",
                     "--frames", "2", "--gnn-steps", "2", "--force-gnn", "--region-kind",
                     "forced", "--output", ws.path("f.nbv")});
  REQUIRE(e.code == 0);
  const Run i = run({"inspect", "--input", ws.path("f.nbv")});
  REQUIRE(i.code == 0);
  CHECK(i.out.find("arch=[3,25,40,60,1536] params=97296") != std::string::npos);
}

TEST_CASE("inspect accounts for the whole file") {
  Workspace ws;
  REQUIRE(run(ws.encode_args("a.nbv")).code == 0);
  const Run i = run({"inspect", "--input", ws.path("a.nbv")});
  REQUIRE(i.code == 0);
  std::uint64_t sum = 0;
  std::uint64_t total = 0;
  bool in_table = false;
  for (const std::string& l : lines(i.out)) {
    if (l == "category,bits,share") {
      in_table = true;
      continue;
    }
    if (!in_table) continue;
    const auto comma = l.find(',');
    const std::uint64_t bits = std::stoull(l.substr(comma + 1));
    if (l.rfind("total,", 0) == 0)
      total = bits;
    else
      sum += bits;
  }
  CHECK(sum == fs::file_size(ws.path("a.nbv")) * 8);
  CHECK(total == sum);
}

TEST_CASE("sweep emits two rows per qp") {
  Workspace ws;
  const Run s = run({"sweep", "--input", ws.path("in.yuv"), "--width", "96", "--height", "64",
                     "--frames", "2", "--qps", "10,30,50", "--gnn-steps", "5", "--gnn-arch", "4",
                     "--output", ws.path("sweep.csv")});
  REQUIRE(s.code == 0);
  const auto rows = read_lines(ws.path("sweep.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "qp,mode,total_bits,mean_psnr_y");
  CHECK(rows[1].rfind("10,gnn_on,", 0) == 0);
  CHECK(rows[2].rfind("10,gnn_off,", 0) == 0);
  const Run bad = run({"sweep", "--input", ws.path("in.yuv"), "--width", "96", "--height", "64",
                       "--qps", "10,x"});
  CHECK(bad.code == 1);
}

TEST_CASE("metrics of identical files hit the cap") {
  Workspace ws;
  const Run m = run({"metrics", "--a", ws.path("in.yuv"), "--b", ws.path("in.yuv"), "--width",
                     "96", "--height", "64"});
  REQUIRE(m.code == 0);
  const auto rows = lines(m.out);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i] == std::to_string(i - 1) + ",99.0000,99.0000,99.0000");
}

TEST_CASE("usage errors leave no output") {
  Workspace ws;
  std::vector<std::string> enc = ws.encode_args("bad.nbv");
  enc[8] = "60";
  const Run e = run(enc);
  CHECK(e.code == 1);
  CHECK(!e.err.empty());
  CHECK(!fs::exists(ws.path("bad.nbv")));

  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"encode", "--input", ws.path("in.yuv")}).code == 1);
  std::vector<std::string> arch = ws.encode_args("arch.nbv");
  arch[12] = "0,5";
  CHECK(run(arch).code == 1);
  CHECK(!fs::exists(ws.path("arch.nbv")));
  std::vector<std::string> hint = ws.encode_args("hint.nbv");
  hint.insert(hint.end(), {"--zoom-hint", "diagonal"});
  CHECK(run(hint).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("io and stream errors map to their exit codes") {
  Workspace ws;
  const Run missing = run({"decode", "--input", ws.path("nope.nbv"), "--output", ws.path("o.yuv")});
  CHECK(missing.code == 2);
  CHECK(!fs::exists(ws.path("o.yuv")));

  std::vector<std::string> wrong_size = ws.encode_args("ws.nbv");
  wrong_size[4] = "100";
  CHECK(run(wrong_size).code == 2);
  CHECK(!fs::exists(ws.path("ws.nbv")));

  std::ofstream(ws.path("junk.nbv"), std::ios::binary) << "NBV1 certainly not a stream";
  const Run junk = run({"decode", "--input", ws.path("junk.nbv"), "--output", ws.path("j.yuv")});
  CHECK(junk.code == 3);
  CHECK(!fs::exists(ws.path("j.yuv")));
  CHECK(run({"inspect", "--input", ws.path("junk.nbv")}).code == 3);

  REQUIRE(run(ws.encode_args("t.nbv")).code == 0);
  fs::resize_file(ws.path("t.nbv"), fs::file_size(ws.path("t.nbv")) - 3);
  CHECK(run({"decode", "--input", ws.path("t.nbv"), "--output", ws.path("t.yuv")}).code == 3);
  CHECK(!fs::exists(ws.path("t.yuv")));
  for (const auto& entry : fs::directory_iterator(ws.dir))
    CHECK(entry.path().extension() != ".partial");
}

}  // TEST_SUITE
