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

#include <atomic>
#include <cmath>
#include <random>
#include <set>

#include "mmidict/linalg.hpp"
#include "mmidict/numcore.hpp"
#include "mmidict/parallel.hpp"
#include "oracles.hpp"

using namespace mmidict;

namespace {

Sequence make_seq(std::string id, std::optional<int> label, std::vector<std::vector<double>> frames) {
  Sequence s;
  s.id = std::move(id);
  s.label = label;
  s.frames = Matrix(frames.size(), frames.front().size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    s.frame_ids.push_back(static_cast<std::int64_t>(f));
    for (std::size_t i = 0; i < frames[f].size(); ++i) s.frames(f, i) = frames[f][i];
  }
  return s;
}

}  // namespace

TEST_CASE("matrix basics") {
  Matrix m = Matrix::from_columns({{1, 2}, {3, 4}, {5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.column(1) == std::vector<double>{3, 4});
  const Matrix t = m.transposed();
  CHECK(t.rows() == 3);
  CHECK(t(2, 1) == 6);
  CHECK(t.transposed() == m);
  m.set_column(0, std::vector<double>{7, 8});
  CHECK(m(1, 0) == 8);
  CHECK(Matrix::identity(3)(1, 1) == 1.0);
  CHECK(Matrix::identity(3)(1, 2) == 0.0);
  m(0, 0) = std::nan("");
  CHECK_FALSE(m.all_finite());
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ValidationError);
}

TEST_CASE("l2_normalize_columns examples") {
  SUBCASE("3-4-5") {
    const auto r = l2_normalize_columns(Matrix::from_columns({{3, 4}}));
    CHECK(r.matrix(0, 0) == doctest::Approx(0.6));
    CHECK(r.matrix(1, 0) == doctest::Approx(0.8));
    CHECK(r.zero_columns.empty());
  }
  SUBCASE("unit column unchanged") {
    const auto r = l2_normalize_columns(Matrix::from_columns({{0, 1}}));
    CHECK(r.matrix(0, 0) == 0.0);
    CHECK(r.matrix(1, 0) == 1.0);
  }
  SUBCASE("zero column flagged") {
    const auto r = l2_normalize_columns(Matrix::from_columns({{1, 0}, {0, 0}}));
    CHECK(r.matrix(0, 1) == 0.0);
    CHECK(r.matrix(1, 1) == 0.0);
    CHECK(r.zero_columns == std::vector<std::size_t>{1});
  }
}

TEST_CASE("l2_normalize_columns is idempotent") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(7, 5);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 5; ++j) m(i, j) = g(rng) * 10;
    const Matrix once = l2_normalize_columns(m).matrix;
    const Matrix twice = l2_normalize_columns(once).matrix;
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(once(i, j) - twice(i, j)) <= 1e-12);
    for (std::size_t j = 0; j < 5; ++j) CHECK(norm2(once.column(j)) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("flatten examples") {
  SUBCASE("one sequence of 3 frames in R^2") {
    const FeatureDataset ds({make_seq("a", std::nullopt, {{1, 2}, {3, 4}, {5, 6}})});
    const FlatSignals f = flatten(ds);
    CHECK(f.signals.rows() == 2);
    CHECK(f.signals.cols() == 3);
    CHECK(f.index.size() == 3);
    CHECK(f.signals(1, 2) == 6);
    CHECK(f.labels.empty());
  }
  SUBCASE("sequence-major, frame-ascending") {
    const FeatureDataset ds({make_seq("s1", 1, {{1}, {2}}), make_seq("s2", 2, {{3}})});
    const FlatSignals f = flatten(ds);
    CHECK(f.signals.cols() == 3);
    CHECK(f.signals.values() == std::vector<double>{1, 2, 3});
    CHECK(f.index[1].sequence == 0);
    CHECK(f.index[1].position == 1);
    CHECK(f.index[2].sequence == 1);
    CHECK(f.labels == std::vector<int>{1, 1, 2});
  }
  SUBCASE("fourteen gesture classes") {
    std::vector<Sequence> seqs;
    for (int c = 1; c <= 14; ++c) seqs.push_back(make_seq("g" + std::to_string(c), c, {{double(c), 0.5}}));
    const FeatureDataset ds(std::move(seqs));
    CHECK(ds.num_classes() == 14);
    CHECK_NOTHROW(ds.require_class_coverage());
  }
  SUBCASE("empty dataset") {
    CHECK_THROWS_WITH_AS(flatten(FeatureDataset()), "no signals", ValidationError);
  }
}

TEST_CASE("flatten then unflatten reproduces the dataset bit-exactly") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<Sequence> seqs;
  for (int s = 0; s < 6; ++s) {
    std::vector<std::vector<double>> frames(2 + s, std::vector<double>(4));
    for (auto& f : frames)
      for (double& v : f) v = g(rng) * 1e3;
    auto seq = make_seq("seq" + std::to_string(s), 1 + s % 3, frames);
    seq.group = "g" + std::to_string(s % 2);
    for (auto& id : seq.frame_ids) id = id * 3 + 1;
    seqs.push_back(seq);
  }
  const FeatureDataset ds(seqs);
  const FeatureDataset back = unflatten(flatten(ds), ds);
  REQUIRE(back.sequences().size() == ds.sequences().size());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const Sequence& a = ds.sequences()[i];
    const Sequence& b = back.sequences()[i];
    CHECK(a.id == b.id);
    CHECK(a.label == b.label);
    CHECK(a.group == b.group);
    CHECK(a.frame_ids == b.frame_ids);
    CHECK(a.frames == b.frames);
  }
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(FeatureDataset({make_seq("a", 1, {{1}}), make_seq("a", 1, {{2}})}), ValidationError);
  CHECK_THROWS_AS(FeatureDataset({make_seq("a", 1, {{1}}), make_seq("b", 1, {{2, 3}})}), ValidationError);
  CHECK_THROWS_AS(FeatureDataset({make_seq("a", 1, {{1}}), make_seq("b", std::nullopt, {{2}})}), ValidationError);
  CHECK_THROWS_AS(FeatureDataset({make_seq("a", 0, {{1}})}), ValidationError);
  auto bad_order = make_seq("a", 1, {{1}, {2}});
  bad_order.frame_ids = {3, 3};
  CHECK_THROWS_AS(FeatureDataset({bad_order}), ValidationError);
  CHECK_THROWS_AS(FeatureDataset({make_seq("a", 1, {{std::nan("")}})}), ValidationError);
  const FeatureDataset gap({make_seq("a", 1, {{1}}), make_seq("b", 3, {{2}})});
  CHECK(gap.num_classes() == 3);
  CHECK_THROWS_AS(gap.require_class_coverage(), ValidationError);
}

TEST_CASE("cholesky and inverse diagonal match the Gauss-Jordan oracle") {
  std::mt19937_64 rng(21);
  for (std::size_t n : {1u, 2u, 5u, 9u, 17u}) {
    const Matrix k = oracle::random_pd(n, rng);
    Matrix l = k;
    REQUIRE(linalg::cholesky(l));
    // L L^T == K
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0;
        for (std::size_t t = 0; t <= j; ++t) s += l(i, t) * l(j, t);
        CHECK(s == doctest::Approx(k(i, j)).epsilon(1e-10));
      }
    const auto inv = oracle::inverse(oracle::to_dense(k));
    const auto diag = linalg::inverse_diagonal(l);
    for (std::size_t i = 0; i < n; ++i) CHECK(diag[i] == doctest::Approx(inv[i][i]).epsilon(1e-9));
  }
  Matrix indefinite = Matrix::from_columns({{1, 2}, {2, 1}});
  CHECK_FALSE(linalg::cholesky(indefinite));
}

TEST_CASE("parallel_for visits every index once for any worker count") {
  const std::size_t before = thread_count();
  for (std::size_t t : {1u, 2u, 3u, 8u}) {
    set_thread_count(t);
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_for(n, [&](std::size_t i) { hits[i]++; });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
  }
  set_thread_count(2);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 77) throw ValidationError("boom");
                  }),
                  ValidationError);
  set_thread_count(before);
}
