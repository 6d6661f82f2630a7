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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmidict/labeldist.hpp"
#include "mmidict/numcore.hpp"
#include "mmidict/pursuit.hpp"

namespace mmidict {

struct CodeSequence {
  std::string id;
  std::optional<int> label;
  std::string group;
  Matrix codes;  // one dense code vector per row (frames x k)
};

std::vector<CodeSequence> encode_sequences(const Dictionary& dict, const FeatureDataset& dataset,
                                           std::size_t sparsity);

// Classic DTW with Euclidean local cost and no warping band; the cost of the
// optimal path divided by its length (shortest path among equal-cost ones).
// With absolute_codes the local cost compares |codes|.
double dtw_distance(const CodeSequence& a, const CodeSequence& b, bool absolute_codes = false);

// Mean of |code| over frames.
std::vector<double> histogram_descriptor(const CodeSequence& c);

enum class Scheme { kDtw, kHistogram };
Scheme parse_scheme(std::string_view name);

struct Vote {
  int label;
  double distance;  // distance to the nearest neighbour
};

// Majority vote among the k nearest; class ties go to the smallest label,
// distance ties to the lower training index.
Vote knn_vote(std::span<const double> distances, std::span<const int> labels, std::size_t k);

Vote knn_classify(std::span<const std::vector<double>> train, std::span<const int> labels,
                  std::span<const double> query, std::size_t k);
Vote knn_classify(std::span<const CodeSequence> train, const CodeSequence& query, std::size_t k,
                  bool absolute_codes = false);

struct Prediction {
  std::string id;
  std::optional<int> truth;
  int predicted;
  double distance;
};

// Classifies every test sequence against the labeled training sequences.
std::vector<Prediction> classify_sequences(std::span<const CodeSequence> train,
                                           std::span<const CodeSequence> test, Scheme scheme,
                                           std::size_t k, bool absolute_codes = false);

double accuracy(std::span<const Prediction> predictions);

// Ten uniform bins over [0, 1]; value 1.0 falls in the last bin.
struct Histogram {
  static constexpr std::size_t kBins = 10;
  std::vector<double> frequency = std::vector<double>(kBins, 0.0);

  double bin_low(std::size_t b) const { return static_cast<double>(b) / kBins; }
  double bin_high(std::size_t b) const { return static_cast<double>(b + 1) / kBins; }
  // Total frequency of bins whose lower edge is >= threshold.
  double mass_from(double threshold) const;
};

Histogram histogram_of(std::span<const double> values);

// Histogram of max_c P(L = c | d_i) over atoms.
Histogram purity_histogram(const std::vector<ClassDistribution>& dists);
// Histogram of |d_i^T d_j| over pairs i < j.
Histogram compactness_histogram(const Dictionary& dict);

}  // namespace mmidict
