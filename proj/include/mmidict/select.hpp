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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmidict/gp.hpp"
#include "mmidict/labeldist.hpp"
#include "mmidict/pursuit.hpp"

namespace mmidict {

// Greedy scores within this (relative) distance of the running best are
// treated as ties, which go to the lowest atom index.
inline constexpr double kTieTolerance = 1e-7;

struct SelectionTrace {
  std::string method;
  std::vector<std::size_t> atoms;          // in selection order
  std::vector<double> objective;           // greedy score of the chosen atom
  std::vector<double> entropy_selected;    // H(d* | D*)
  std::vector<double> entropy_remaining;   // H(d* | D-bar*), NaN for ME
  std::vector<double> seconds;
  std::optional<double> lambda;
};

// Maximization of entropy: argmax H(d* | D*).
SelectionTrace select_me(const KernelMatrix& kern, std::size_t k, Evaluation eval = Evaluation::kSparse);

// argmax H(d* | D*) - H(d* | D-bar*), D-bar* = remaining atoms minus d*.
// Requires 1 <= k <= K - 1.
SelectionTrace select_mmi1(const KernelMatrix& kern, std::size_t k, Evaluation eval = Evaluation::kSparse);

// Ratio of the best first-step label gain to the best first-step
// appearance gain, clamped at 0.
double estimate_lambda(const KernelMatrix& kern, const std::vector<ClassDistribution>& dists,
                       Evaluation eval = Evaluation::kSparse);

// MMI-1 objective plus lambda [H(L_d* | L_D*) - H(L_d* | L_D-bar*)].
// lambda defaults to estimate_lambda.
SelectionTrace select_mmi2(const KernelMatrix& kern, const std::vector<ClassDistribution>& dists,
                           std::size_t k, std::optional<double> lambda = std::nullopt,
                           Evaluation eval = Evaluation::kSparse);

enum class PriorMode { kMass, kUniform };
PriorMode parse_prior_mode(std::string_view name);

// p(d_i): normalized total |coefficient| mass per atom, or uniform.
std::vector<double> atom_prior(const SparseCodeTable& codes, PriorMode mode = PriorMode::kMass);

// Information lost by merging two atoms with the given priors and class
// distributions.
double merge_information_loss(double prior_a, std::span<const double> dist_a, double prior_b,
                              std::span<const double> dist_b);

struct MergeStep {
  std::size_t kept;      // slot (original atom index) that holds the merged atom
  std::size_t absorbed;  // slot removed by the merge
  double loss;
  double seconds;
};

struct Mmi3Result {
  Dictionary dictionary;          // k atoms with merged class distributions and priors
  std::vector<std::size_t> slots; // original index of the slot behind each output atom
  std::vector<MergeStep> merges;
};

// Agglomerative merging of the pair with the smallest information loss
// until k atoms remain. dists and priors are per atom of dict.
Mmi3Result select_mmi3(const Dictionary& dict, const std::vector<ClassDistribution>& dists,
                       const std::vector<double>& priors, std::size_t k);

// k-means (k-means++ seeding) over the atom vectors; centroids unit-normalized.
Dictionary select_kmeans(const Dictionary& dict, std::size_t k, std::uint64_t seed);

// Dictionary made of the chosen atoms of dict (in trace order), carrying
// their class distributions when dict has them.
Dictionary subset_dictionary(const Dictionary& dict, std::span<const std::size_t> atoms);

}  // namespace mmidict
