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

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "mmidict/summarize.hpp"
#include "mmidict/synth.hpp"
#include "oracles.hpp"

using namespace mmidict;

namespace {

Matrix random_frames(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, count);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < count; ++j) m(i, j) = g(rng);
  return m;
}

oracle::Dense linear_kernel_oracle(const Matrix& frames) {
  const Matrix unit = l2_normalize_columns(frames).matrix;
  oracle::Dense k(unit.cols(), std::vector<double>(unit.cols()));
  for (std::size_t i = 0; i < unit.cols(); ++i)
    for (std::size_t j = 0; j < unit.cols(); ++j) {
      double s = i == j ? kDefaultJitter : 0.0;
      for (std::size_t r = 0; r < unit.rows(); ++r) s += unit(r, i) * unit(r, j);
      k[i][j] = s;
    }
  return k;
}

}  // namespace

TEST_CASE("two identical frames and one distinct") {
  const Matrix frames = Matrix::from_columns({{1, 0, 0}, {1, 0, 0}, {0, 0.6, 0.8}});
  const Summary s = summarize_sequence(frames, 2);
  REQUIRE(s.frames.size() == 2);
  CHECK(s.frames[1] == 2);
  CHECK(s.frames[0] < 2);
  // exhaustive check over all 2-subsets
  const auto k = linear_kernel_oracle(frames);
  double best = -1e300;
  oracle::Index arg;
  oracle::for_each_subset(3, 2, [&](const oracle::Index& sub) {
    const double v = oracle::gaussian_mi(k, sub);
    if (v > best + 1e-9) best = v, arg = sub;
  });
  CHECK(std::find(arg.begin(), arg.end(), 2) != arg.end());
  CHECK(oracle::gaussian_mi(k, s.frames) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("identical frames fall back to index order") {
  const Matrix frames = Matrix::from_columns(std::vector<std::vector<double>>(6, {0.3, -0.2, 0.9}));
  const Summary s = summarize_sequence(frames, 3);
  CHECK(s.frames == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("planted clusters: one frame per cluster, matching the exhaustive optimum") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    const synth::PlantedClusters pc = synth::planted_clusters(24, 10, 2, 0.05, rng);
    const Summary s = summarize_sequence(pc.frames, 10);
    std::set<std::size_t> covered;
    for (std::size_t f : s.frames) covered.insert(pc.cluster[f]);
    CHECK(covered.size() == 10);

    const auto k = linear_kernel_oracle(pc.frames);
    double best = -1e300;
    oracle::Index arg;
    oracle::for_each_subset(20, 10, [&](const oracle::Index& sub) {
      const double v = oracle::gaussian_mi(k, sub);
      if (v > best) best = v, arg = sub;
    });
    std::set<std::size_t> best_covered;
    for (std::size_t f : arg) best_covered.insert(pc.cluster[f]);
    CHECK(best_covered.size() == 10);
    CHECK(oracle::gaussian_mi(k, s.frames) >= (1 - 1 / std::numbers::e) * best);
  }
}

TEST_CASE("greedy summary is within 1-1/e of the optimum") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix frames = random_frames(20, 15, rng);
    const Summary s = summarize_sequence(frames, 3);
    const auto k = linear_kernel_oracle(frames);
    CHECK(oracle::gaussian_mi(k, s.frames) >= (1 - 1 / std::numbers::e) * oracle::best_subset_mi(k, 3));
  }
}

TEST_CASE("summary structure, determinism and scale invariance") {
  std::mt19937_64 rng(43);
  const Matrix frames = random_frames(16, 12, rng);
  const Summary s = summarize_sequence(frames, 5);
  CHECK(std::is_sorted(s.frames.begin(), s.frames.end()));
  CHECK(std::set<std::size_t>(s.frames.begin(), s.frames.end()).size() == 5);
  std::set<std::size_t> ranks;
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    CHECK(s.steps[i].frame == s.frames[i]);
    ranks.insert(s.steps[i].rank);
  }
  CHECK(ranks == std::set<std::size_t>{1, 2, 3, 4, 5});
  const auto& first = *std::find_if(s.steps.begin(), s.steps.end(), [](const SummaryStep& x) { return x.rank == 1; });
  CHECK(first.diversity_term == doctest::Approx(gaussian_entropy(1.0 + kDefaultJitter)));

  const Summary again = summarize_sequence(frames, 5);
  CHECK(again.frames == s.frames);

  Matrix scaled = frames;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 12; ++j) scaled(i, j) *= 4.5;
  CHECK(summarize_sequence(scaled, 5).frames == s.frames);
  SummarizeOptions raw;
  raw.normalize_frames = false;
  raw.jitter = 0.0;
  CHECK(summarize_sequence(scaled, 5, raw).frames == summarize_sequence(frames, 5, raw).frames);
  raw.eval = Evaluation::kDense;
  CHECK(summarize_sequence(scaled, 5, raw).frames == summarize_sequence(frames, 5, raw).frames);
}

TEST_CASE("summary size preconditions") {
  const Matrix frames = Matrix::identity(4);
  CHECK_THROWS_AS(summarize_sequence(frames, 4), ValidationError);
  CHECK_THROWS_AS(summarize_sequence(frames, 0), ValidationError);
  CHECK(summarize_sequence(frames, 3).frames.size() == 3);
}

TEST_CASE("coverage and diversity report") {
  // Two clusters of three frames, distance 2 apart.
  const Matrix frames = Matrix::from_columns({{0, 0}, {0, 0}, {0, 0}, {2, 0}, {2, 0}, {2, 0}});
  Summary one;
  one.frames = {0};
  const SummaryReport r1 = coverage_diversity_report(one, frames);
  CHECK(r1.coverage == doctest::Approx(1.0));
  CHECK(r1.diversity == 0.0);
  Summary all;
  all.frames = {0, 1, 2, 3, 4, 5};
  CHECK(coverage_diversity_report(all, frames).coverage == 0.0);
  Summary two;
  two.frames = {1, 4};
  const SummaryReport r2 = coverage_diversity_report(two, frames);
  CHECK(r2.diversity == doctest::Approx(2.0));
  CHECK(r2.coverage == 0.0);
}

TEST_CASE("feature blocks are normalized separately") {
  const Matrix frames = Matrix::from_columns({{3, 4, 0, 5}, {0, 0, 1, 0}});
  const Matrix out = normalize_feature_blocks(frames, std::vector<std::size_t>{2, 2});
  CHECK(out(0, 0) == doctest::Approx(0.6));
  CHECK(out(1, 0) == doctest::Approx(0.8));
  CHECK(out(3, 0) == doctest::Approx(1.0));
  CHECK(out(0, 1) == 0.0);
  CHECK(out(2, 1) == 1.0);
  CHECK_THROWS_AS(normalize_feature_blocks(frames, std::vector<std::size_t>{3}), ValidationError);
}
