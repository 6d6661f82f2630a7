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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mmidict::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mmidict_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// A small labeled mixture with a trained dictionary, shared by several cases.
struct Trained {
  TempDir dir;
  Trained() {
    REQUIRE(run({"gen", "--kind", "mixture", "--seed", "3", "--count", "4", "--frames", "8", "--out",
                 dir / "f.csv"}).code == 0);
    REQUIRE(run({"train", "--features", dir / "f.csv", "--atoms", "24", "--sparsity", "3", "--iters", "5",
                 "--seed", "1", "--out", dir / "d.csv"}).code == 0);
  }
};

}  // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"train", "--help"}).code == 0);
  CHECK(run({"train", "--atoms", "4"}).code == 2);
  CHECK(run({"--threads", "0", "gen", "--kind", "sparse", "--out", "x.csv"}).code == 2);
  TempDir dir;
  CHECK(run({"gen", "--kind", "nonsense", "--out", dir / "x.csv"}).code == 2);
}

TEST_CASE("malformed feature table reports the line and exits with 2") {
  TempDir dir;
  write(dir / "bad.csv", "seq,frame,label,f0,f1\na,0,1,1,2\na,1,1,3,oops\n");
  const Result r = run({"train", "--features", dir / "bad.csv", "--atoms", "2", "--sparsity", "1", "--out",
                        dir / "d.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.csv:3:") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "d.csv"));

  CHECK(run({"train", "--features", dir / "missing.csv", "--atoms", "2", "--sparsity", "1", "--out",
             dir / "d.csv"}).code == 2);
}

TEST_CASE("classify with an empty test file exits with 2") {
  Trained t;
  write(t.dir / "empty.csv", "");
  const Result r = run({"classify", "--dict", t.dir / "d.csv", "--train", t.dir / "f.csv", "--test",
                        t.dir / "empty.csv", "--out", t.dir / "p.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("empty") != std::string::npos);
}

TEST_CASE("select validates the target size") {
  Trained t;
  auto sel = [&](const std::string& method, const std::string& k) {
    return run({"select", "--dict", t.dir / "d.csv", "--codes", t.dir / "d.codes.csv", "--features",
                t.dir / "f.csv", "--method", method, "--k", k, "--out", t.dir / "s.csv"})
        .code;
  };
  CHECK(sel("mmi1", "24") == 2);
  CHECK(sel("mmi1", "0") == 2);
  CHECK(sel("me", "25") == 2);
  CHECK(sel("mmi1", "23") == 0);
  CHECK(sel("kmeans", "4") == 0);
  CHECK(sel("mmi3", "4") == 0);
  CHECK(sel("mmi9", "4") == 2);
}

TEST_CASE("mmi2 with zero lambda matches mmi1") {
  Trained t;
  const std::vector<std::string> common = {"--dict", t.dir / "d.csv", "--codes", t.dir / "d.codes.csv",
                                           "--features", t.dir / "f.csv", "--k", "8"};
  std::vector<std::string> a = {"select", "--method", "mmi1", "--out", t.dir / "a.csv"};
  std::vector<std::string> b = {"select", "--method", "mmi2", "--lambda", "0", "--out", t.dir / "b.csv"};
  a.insert(a.end(), common.begin(), common.end());
  b.insert(b.end(), common.begin(), common.end());
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(slurp(t.dir / "a.csv") == slurp(t.dir / "b.csv"));
  CHECK(slurp(t.dir / "a.classdist.csv") == slurp(t.dir / "b.classdist.csv"));
  CHECK(slurp(t.dir / "a.trace.csv") == slurp(t.dir / "b.trace.csv"));

  std::vector<std::string> est = {"select", "--method", "mmi2", "--out", t.dir / "c.csv"};
  est.insert(est.end(), common.begin(), common.end());
  const Result r = run(est);
  CHECK(r.code == 0);
  CHECK(r.out.find("lambda ") != std::string::npos);
}

TEST_CASE("run configurations replay byte-identically") {
  Trained t;
  const std::vector<std::string> outputs = {"d.csv", "d.codes.csv", "d.history.csv", "d.classdist.csv"};
  std::map<std::string, std::string> before;
  for (const auto& f : outputs) before[f] = slurp(t.dir / f);
  const std::string config = slurp(t.dir / "d.run.json");
  CHECK(config.find("\"command\": \"train\"") != std::string::npos);
  CHECK(config.find("\"iters\": \"5\"") != std::string::npos);
  // Defaults are recorded too.
  CHECK(config.find("\"min-improvement\"") != std::string::npos);

  fs::copy_file(t.dir / "d.run.json", t.dir / "replay.json");
  for (const auto& f : outputs) fs::remove(t.dir / f);
  REQUIRE(run({"--config", t.dir / "replay.json"}).code == 0);
  for (const auto& f : outputs) CHECK(slurp(t.dir / f) == before[f]);
  CHECK(slurp(t.dir / "d.run.json") == config);

  for (const auto& f : outputs) fs::remove(t.dir / f);
  REQUIRE(run({"train", "--config", t.dir / "replay.json"}).code == 0);
  for (const auto& f : outputs) CHECK(slurp(t.dir / f) == before[f]);

  CHECK(run({"select", "--config", t.dir / "replay.json"}).code == 2);
  write(t.dir / "broken.json", "{not json");
  CHECK(run({"--config", t.dir / "broken.json"}).code == 2);

  REQUIRE(run({"summarize", "--features", t.dir / "f.csv", "--k", "3", "--out", t.dir / "s.csv"}).code == 0);
  const std::string summary = slurp(t.dir / "s.csv");
  fs::remove(t.dir / "s.csv");
  REQUIRE(run({"--config", t.dir / "s.run.json"}).code == 0);
  CHECK(slurp(t.dir / "s.csv") == summary);
}

TEST_CASE("thread count does not change results") {
  Trained t;
  auto train = [&](const std::string& out) {
    return run({"train", "--features", t.dir / "f.csv", "--atoms", "24", "--sparsity", "3", "--iters", "5",
                "--seed", "1", "--out", t.dir / out})
        .code;
  };
  ::setenv("MMIDICT_THREADS", "1", 1);
  REQUIRE(train("one.csv") == 0);
  ::setenv("MMIDICT_THREADS", "3", 1);
  REQUIRE(train("three.csv") == 0);
  ::setenv("MMIDICT_THREADS", "0", 1);
  CHECK(train("zero.csv") == 2);
  ::unsetenv("MMIDICT_THREADS");
  REQUIRE(run({"--threads", "2", "train", "--features", t.dir / "f.csv", "--atoms", "24", "--sparsity", "3",
               "--iters", "5", "--seed", "1", "--out", t.dir / "two.csv"}).code == 0);
  CHECK(slurp(t.dir / "one.csv") == slurp(t.dir / "three.csv"));
  CHECK(slurp(t.dir / "one.csv") == slurp(t.dir / "two.csv"));
  CHECK(slurp(t.dir / "one.csv") == slurp(t.dir / "d.csv"));
}

TEST_CASE("eval on an orthonormal dictionary and a single class") {
  TempDir dir;
  write(dir / "d.csv", "atom,f0,f1,f2\n0,1,0,0\n1,0,1,0\n2,0,0,1\n");
  write(dir / "f.csv", "seq,frame,label,f0,f1,f2\na,0,1,1,0,0\na,1,1,0,2,0\nb,0,1,0,0,-3\n");
  REQUIRE(run({"encode", "--dict", dir / "d.csv", "--features", dir / "f.csv", "--sparsity", "1", "--out",
               dir / "c.csv"}).code == 0);
  CHECK(slurp(dir / "c.csv") == "seq,frame,atom,value\na,0,0,1\na,1,1,2\nb,0,2,-3\n");
  const Result r = run({"eval", "--dict", dir / "d.csv", "--codes", dir / "c.csv", "--features", dir / "f.csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "purity_mass_0.6 1\ncompactness_mass_0.8 0\n");
  const std::string compact = slurp(dir / "d.compactness.csv");
  CHECK(compact.starts_with("bin_low,bin_high,frequency\n0,0.1,1\n"));
  const std::string purity = slurp(dir / "d.purity.csv");
  CHECK(purity.ends_with("0.9,1,1\n"));
  CHECK(fs::exists(dir / "d.purity.run.json"));

  CHECK(run({"eval", "--dict", dir / "d.csv"}).code == 2);
  CHECK(run({"eval", "--dict", dir / "d.csv", "--codes", dir / "c.csv"}).code == 2);
}

TEST_CASE("generators and the recognition pipeline") {
  TempDir dir;
  for (const std::string kind : {"sparse", "clusters", "mixture", "actions"}) {
    const Result r = run({"gen", "--kind", kind, "--seed", "2", "--out", dir / (kind + ".csv")});
    CHECK(r.code == 0);
    CHECK(slurp(dir / (kind + ".csv")).starts_with("seq,frame,label"));
  }
  REQUIRE(run({"train", "--features", dir / "actions.csv", "--atoms", "40", "--sparsity", "4", "--iters", "8",
               "--out", dir / "d.csv"}).code == 0);
  REQUIRE(run({"select", "--dict", dir / "d.csv", "--codes", dir / "d.codes.csv", "--features",
               dir / "actions.csv", "--method", "mmi2", "--k", "16", "--out", dir / "s.csv"}).code == 0);
  const Result r = run({"classify", "--dict", dir / "s.csv", "--train", dir / "actions.csv",
                        "--leave-group-out", "--scheme", "hist", "--sparsity", "4", "--out", dir / "p.csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("accuracy ") != std::string::npos);
  CHECK(slurp(dir / "p.csv").starts_with("seq,true_label,predicted_label,distance\n"));

  const Result s = run({"summarize", "--features", dir / "clusters.csv", "--k", "10", "--out", dir / "sum.csv"});
  REQUIRE(s.code == 0);
  CHECK(slurp(dir / "sum.csv").starts_with("seq,rank,frame,diversity_term,coverage_term\n"));
  CHECK(slurp(dir / "sum.report.csv").starts_with("seq,diversity,coverage\n"));
}
