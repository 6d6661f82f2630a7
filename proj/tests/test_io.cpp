// Copyright 2026 The mmidict Authors.
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
#include <random>
#include <sstream>

#include "mmidict/csv_io.hpp"
#include "mmidict/synth.hpp"

using namespace mmidict;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mmidict_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

FeatureDataset parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_feature_table(in, "t.csv");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("numbers are written in shortest round-trip form") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.0) == "1");
  CHECK(io::format_number(-2.25e-10) == "-2.25e-10");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double v = g(rng) * std::pow(10.0, i % 20 - 10);
    CHECK(std::stod(io::format_number(v)) == v);
  }
}

TEST_CASE("feature table parsing") {
  const FeatureDataset d = parse(
      "seq,frame,label,f0,f1\n"
      "a,0,2,1.5,-2\n"
      "a,3,2,1e-3,4E2\n"
      "\n"
      "b,1,1,0,0\n");
  REQUIRE(d.sequences().size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.num_classes() == 2);
  const Sequence& a = d.sequences()[0];
  CHECK(a.id == "a");
  CHECK(a.label == 2);
  CHECK(a.frame_ids == std::vector<std::int64_t>{0, 3});
  CHECK(a.frames(1, 0) == 1e-3);
  CHECK(a.frames(1, 1) == 400.0);

  const FeatureDataset u = parse("seq,frame,label,f0\ns,0,,1\ns,1,,2\n");
  CHECK_FALSE(u.labeled());
  CHECK_FALSE(u.sequences()[0].label.has_value());

  const FeatureDataset g = parse("seq,frame,label,group,f0\ns,0,1,actor1,1\nt,0,1,actor2,2\n");
  CHECK(g.sequences()[1].group == "actor2");
}

TEST_CASE("feature table errors name the offending line") {
  CHECK(parse_error("") == "t.csv: empty file");
  CHECK(parse_error("seq,frame,label,f0\n") == "t.csv: no rows");
  CHECK(parse_error("seq,frame,lbl,f0\na,0,1,1\n").starts_with("t.csv:1: "));
  CHECK(parse_error("seq,frame,label\na,0,1\n").starts_with("t.csv:1: "));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,1\na,1,1,x\n").starts_with("t.csv:3: malformed number"));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,1\na,1,1\n").starts_with("t.csv:3: expected 4 fields"));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,1\na,0,1,2\n").starts_with("t.csv:3: frame ids"));
  CHECK(parse_error("seq,frame,label,f0\na,-1,1,1\n").starts_with("t.csv:2: "));
  CHECK(parse_error("seq,frame,label,f0\na,0,0,1\n").starts_with("t.csv:2: label"));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,1\na,1,2,1\n").starts_with("t.csv:3: label changes"));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,nan\n").starts_with("t.csv:2: "));
  CHECK(parse_error("seq,frame,label,f0\na,0,1,inf\n").starts_with("t.csv:2: "));
  CHECK_FALSE(parse_error("seq,frame,label,f0\na,0,1,1\nb,0,,1\n").empty());
}

TEST_CASE("feature table round trip") {
  TempDir dir;
  std::mt19937_64 rng(5);
  synth::ActionOptions opts;
  opts.actors = 3;
  const FeatureDataset d = synth::action_sequences(opts, rng);
  io::write_feature_table(dir / "f.csv", d);
  const std::string header = first_line(dir / "f.csv");
  CHECK(header.starts_with("seq,frame,label,group,f0,f1,"));
  const FeatureDataset back = io::read_feature_table(dir / "f.csv");
  REQUIRE(back.sequences().size() == d.sequences().size());
  for (std::size_t s = 0; s < d.sequences().size(); ++s) {
    CHECK(back.sequences()[s].id == d.sequences()[s].id);
    CHECK(back.sequences()[s].label == d.sequences()[s].label);
    CHECK(back.sequences()[s].group == d.sequences()[s].group);
    CHECK(back.sequences()[s].frame_ids == d.sequences()[s].frame_ids);
    CHECK(back.sequences()[s].frames == d.sequences()[s].frames);
  }
  io::write_feature_table(dir / "g.csv", back);
  CHECK(slurp(dir / "f.csv") == slurp(dir / "g.csv"));
  CHECK_THROWS_AS(io::read_feature_table(dir / "missing.csv"), ValidationError);
}

TEST_CASE("dictionary round trip with class distribution sidecar") {
  TempDir dir;
  std::mt19937_64 rng(7);
  const Dictionary plain = synth::random_dictionary(5, 4, rng);
  const Dictionary labeled = plain.with_class_dist({{1, 0}, {0.25, 0.75}, {0.5, 0.5}, {0, 1}});

  io::write_dictionary(dir / "d.csv", labeled);
  CHECK(first_line(dir / "d.csv") == "atom,f0,f1,f2,f3,f4");
  REQUIRE(fs::exists(dir / "d.classdist.csv"));
  CHECK(io::classdist_sidecar(dir / "d.csv") == dir / "d.classdist.csv");
  CHECK(slurp(dir / "d.classdist.csv") == "atom,p1,p2\n0,1,0\n1,0.25,0.75\n2,0.5,0.5\n3,0,1\n");
  const Dictionary back = io::read_dictionary(dir / "d.csv");
  CHECK(back.atoms() == labeled.atoms());
  CHECK(back.class_dist() == labeled.class_dist());

  // Rewriting without distributions drops the stale sidecar.
  io::write_dictionary(dir / "d.csv", plain);
  CHECK_FALSE(fs::exists(dir / "d.classdist.csv"));
  CHECK_FALSE(io::read_dictionary(dir / "d.csv").has_class_dist());
}

TEST_CASE("dictionary errors") {
  TempDir dir;
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  auto message = [&](const fs::path& p) -> std::string {
    try {
      io::read_dictionary(p);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(write("a.csv", "atom,f0,f1\n0,1,0\n1,0.5,0.5\n")).find("norm") != std::string::npos);
  CHECK(message(write("b.csv", "atom,f0,f1\n0,1,0\n2,0,1\n")).find("b.csv:3:") != std::string::npos);
  CHECK(message(write("c.csv", "atom,x0\n0,1\n")).find("c.csv:1:") != std::string::npos);
  write("d.csv", "atom,f0,f1\n0,1,0\n1,0,1\n");
  write("d.classdist.csv", "atom,p1,p2\n0,0.5,0.5\n1,0.7,0.7\n");
  CHECK_FALSE(message(dir / "d.csv").empty());
}

TEST_CASE("codes round trip keyed by sequence and frame") {
  TempDir dir;
  const FeatureDataset d = parse("seq,frame,label,f0,f1\na,0,1,1,0\na,5,1,0,1\nb,2,2,1,1\n");
  const FlatSignals flat = flatten(d);
  SparseCodeTable codes(3, 3, 2);
  codes.set_signal(0, {{0, 1.0}});
  codes.set_signal(1, {{2, -0.5}, {1, 0.25}});
  codes.set_signal(2, {});
  io::write_codes(dir / "c.csv", codes, d, flat);
  CHECK(slurp(dir / "c.csv") == "seq,frame,atom,value\na,0,0,1\na,5,2,-0.5\na,5,1,0.25\n");
  const SparseCodeTable back = io::read_codes(dir / "c.csv", d, flat, 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(back.dense_signal(j) == codes.dense_signal(j));

  std::ofstream(dir / "bad.csv") << "seq,frame,atom,value\na,0,0,1\nz,0,0,1\n";
  try {
    io::read_codes(dir / "bad.csv", d, flat, 3);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("bad.csv:3:") != std::string::npos);
  }
  std::ofstream(dir / "range.csv") << "seq,frame,atom,value\na,0,3,1\n";
  CHECK_THROWS_AS(io::read_codes(dir / "range.csv", d, flat, 3), ValidationError);
}

TEST_CASE("output headers") {
  TempDir dir;
  io::write_error_history(dir / "h.csv", {0.5, 0.25});
  CHECK(slurp(dir / "h.csv") == "iteration,rmse\n1,0.5\n2,0.25\n");

  SelectionTrace t;
  t.method = "mmi1";
  t.atoms = {3, 1};
  t.objective = {0.5, 0.125};
  t.seconds = {0.1, 0.2};
  io::write_trace(dir / "t.csv", t, false);
  CHECK(slurp(dir / "t.csv") == "step,atom,objective,seconds\n1,3,0.5,0\n2,1,0.125,0\n");
  io::write_trace(dir / "tt.csv", t, true);
  CHECK(slurp(dir / "tt.csv") == "step,atom,objective,seconds\n1,3,0.5,0.1\n2,1,0.125,0.2\n");

  io::write_merge_trace(dir / "m.csv", {{0, 2, 0.0, 0.0}, {1, 3, 0.5, 0.0}}, false);
  CHECK(slurp(dir / "m.csv") == "step,atom,objective,seconds\n1,2,0,0\n2,3,0.5,0\n");

  Histogram h;
  h.frequency[9] = 1.0;
  io::write_histogram(dir / "hist.csv", h);
  const std::string hist = slurp(dir / "hist.csv");
  CHECK(hist.starts_with("bin_low,bin_high,frequency\n0,0.1,0\n"));
  CHECK(hist.ends_with("0.9,1,1\n"));

  io::write_predictions(dir / "p.csv", {{"a", 1, 2, 0.5}, {"b", std::nullopt, 1, 0.25}});
  CHECK(slurp(dir / "p.csv") == "seq,true_label,predicted_label,distance\na,1,2,0.5\nb,,1,0.25\n");

  const FeatureDataset d = parse("seq,frame,label,f0\na,10,1,1\na,20,1,2\na,30,1,3\n");
  Summary s;
  s.sequence_id = "a";
  s.frames = {0, 2};
  s.steps = {{2, 0, 1.5, -0.5}, {1, 2, 2.5, -1.5}};
  io::write_summaries(dir / "s.csv", {s}, d);
  CHECK(slurp(dir / "s.csv") == "seq,rank,frame,diversity_term,coverage_term\na,2,10,1.5,-0.5\na,1,30,2.5,-1.5\n");

  const KernelMatrix k = KernelMatrix::from_dense(Matrix::from_columns({{2, 0}, {0, 3}}));
  io::write_kernel(dir / "k.csv", k);
  CHECK(first_line(dir / "k.csv") == "i,j,value");
}
