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

#include "mmidict/recognize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mmidict/parallel.hpp"
#include "mmidict/simd.hpp"

namespace mmidict {

std::vector<CodeSequence> encode_sequences(const Dictionary& dict, const FeatureDataset& dataset,
                                           std::size_t sparsity) {
  if (dataset.dim() != dict.dim())
    throw ValidationError("feature dimension " + std::to_string(dataset.dim()) +
                          " != dictionary dimension " + std::to_string(dict.dim()));
  std::vector<CodeSequence> out;
  out.reserve(dataset.sequences().size());
  for (const Sequence& s : dataset.sequences()) {
    const SparseCodeTable codes = omp_encode(dict, s.frames.transposed(), sparsity);
    CodeSequence cs{s.id, s.label, s.group, Matrix(s.frames.rows(), dict.size())};
    for (std::size_t f = 0; f < codes.num_signals(); ++f)
      for (const CodeEntry& e : codes.signal(f)) cs.codes(f, e.atom) = e.value;
    out.push_back(std::move(cs));
  }
  return out;
}

double dtw_distance(const CodeSequence& a, const CodeSequence& b, bool absolute_codes) {
  const std::size_t n = a.codes.rows(), m = b.codes.rows(), dim = a.codes.cols();
  if (n == 0 || m == 0) throw ValidationError("dtw needs non-empty sequences");
  if (b.codes.cols() != dim) throw ValidationError("code dimension mismatch");
  Matrix lhs = a.codes, rhs = b.codes;
  if (absolute_codes) {
    for (std::size_t i = 0; i < n; ++i)
      for (double& x : lhs.row(i)) x = std::abs(x);
    for (std::size_t j = 0; j < m; ++j)
      for (double& x : rhs.row(j)) x = std::abs(x);
  }
  // cost/length of the best path ending at (i, j); row-by-row DP.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost_prev(m + 1, kInf), cost_cur(m + 1, kInf);
  std::vector<std::size_t> len_prev(m + 1, 0), len_cur(m + 1, 0);
  cost_prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cost_cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double local = std::sqrt(simd::squared_distance(lhs.row(i - 1).data(), rhs.row(j - 1).data(), dim));
      // Candidates: match (diagonal), insertion, deletion.
      double best = cost_prev[j - 1];
      std::size_t len = len_prev[j - 1];
      auto consider = [&](double c, std::size_t l) {
        if (c < best || (c == best && l < len)) {
          best = c;
          len = l;
        }
      };
      consider(cost_prev[j], len_prev[j]);
      consider(cost_cur[j - 1], len_cur[j - 1]);
      cost_cur[j] = best + local;
      len_cur[j] = len + 1;
    }
    std::swap(cost_prev, cost_cur);
    std::swap(len_prev, len_cur);
    cost_prev[0] = kInf;
  }
  return cost_prev[m] / static_cast<double>(len_prev[m]);
}

std::vector<double> histogram_descriptor(const CodeSequence& c) {
  if (c.codes.rows() == 0) throw ValidationError("empty code sequence");
  std::vector<double> h(c.codes.cols(), 0.0);
  for (std::size_t f = 0; f < c.codes.rows(); ++f)
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += std::abs(c.codes(f, i));
  for (double& v : h) v /= static_cast<double>(c.codes.rows());
  return h;
}

Scheme parse_scheme(std::string_view name) {
  if (name == "dtw") return Scheme::kDtw;
  if (name == "hist") return Scheme::kHistogram;
  throw ValidationError("unknown scheme '" + std::string(name) + "'");
}

Vote knn_vote(std::span<const double> distances, std::span<const int> labels, std::size_t k) {
  if (distances.empty() || distances.size() != labels.size())
    throw ValidationError("knn needs a non-empty, labeled training set");
  if (k == 0) throw ValidationError("k must be >= 1");
  std::vector<std::size_t> order(distances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
  const std::size_t take = std::min(k, order.size());
  std::map<int, std::size_t> votes;
  for (std::size_t r = 0; r < take; ++r) ++votes[labels[order[r]]];
  int winner = votes.begin()->first;
  std::size_t most = 0;
  for (const auto& [label, count] : votes)  // ascending label order
    if (count > most) {
      most = count;
      winner = label;
    }
  return {winner, distances[order[0]]};
}

Vote knn_classify(std::span<const std::vector<double>> train, std::span<const int> labels,
                  std::span<const double> query, std::size_t k) {
  std::vector<double> d(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].size() != query.size()) throw ValidationError("descriptor dimension mismatch");
    d[i] = std::sqrt(simd::squared_distance(train[i].data(), query.data(), query.size()));
  }
  return knn_vote(d, labels, k);
}

Vote knn_classify(std::span<const CodeSequence> train, const CodeSequence& query, std::size_t k,
                  bool absolute_codes) {
  std::vector<double> d(train.size());
  std::vector<int> labels(train.size());
  parallel_for(train.size(), [&](std::size_t i) { d[i] = dtw_distance(train[i], query, absolute_codes); });
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!train[i].label) throw ValidationError("training sequence '" + train[i].id + "' is unlabeled");
    labels[i] = *train[i].label;
  }
  return knn_vote(d, labels, k);
}

std::vector<Prediction> classify_sequences(std::span<const CodeSequence> train,
                                           std::span<const CodeSequence> test, Scheme scheme,
                                           std::size_t k, bool absolute_codes) {
  std::vector<int> labels;
  std::vector<std::vector<double>> descriptors;
  for (const CodeSequence& s : train) {
    if (!s.label) throw ValidationError("training sequence '" + s.id + "' is unlabeled");
    labels.push_back(*s.label);
    if (scheme == Scheme::kHistogram) descriptors.push_back(histogram_descriptor(s));
  }
  std::vector<Prediction> out;
  out.reserve(test.size());
  for (const CodeSequence& q : test) {
    const Vote v = scheme == Scheme::kDtw
                       ? knn_classify(train, q, k, absolute_codes)
                       : knn_classify(std::span<const std::vector<double>>(descriptors), labels,
                                      histogram_descriptor(q), k);
    out.push_back({q.id, q.label, v.label, v.distance});
  }
  return out;
}

double accuracy(std::span<const Prediction> predictions) {
  std::size_t scored = 0, right = 0;
  for (const Prediction& p : predictions) {
    if (!p.truth) continue;
    ++scored;
    if (*p.truth == p.predicted) ++right;
  }
  return scored == 0 ? 0.0 : static_cast<double>(right) / static_cast<double>(scored);
}

double Histogram::mass_from(double threshold) const {
  double s = 0.0;
  for (std::size_t b = 0; b < kBins; ++b)
    if (bin_low(b) >= threshold - 1e-12) s += frequency[b];
  return s;
}

Histogram histogram_of(std::span<const double> values) {
  Histogram h;
  if (values.empty()) return h;
  for (double v : values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    const std::size_t b = std::min<std::size_t>(Histogram::kBins - 1,
                                                static_cast<std::size_t>(clamped * Histogram::kBins));
    h.frequency[b] += 1.0;
  }
  for (double& f : h.frequency) f /= static_cast<double>(values.size());
  return h;
}

Histogram purity_histogram(const std::vector<ClassDistribution>& dists) {
  if (dists.empty()) throw ValidationError("no class distributions");
  std::vector<double> peaks;
  peaks.reserve(dists.size());
  for (const auto& p : dists) peaks.push_back(*std::max_element(p.begin(), p.end()));
  return histogram_of(peaks);
}

Histogram compactness_histogram(const Dictionary& dict) {
  std::vector<double> sims;
  for (std::size_t i = 0; i < dict.size(); ++i)
    for (std::size_t j = i + 1; j < dict.size(); ++j)
      sims.push_back(std::abs(simd::dot(dict.atom(i).data(), dict.atom(j).data(), dict.dim())));
  return histogram_of(sims);
}

}  // namespace mmidict
