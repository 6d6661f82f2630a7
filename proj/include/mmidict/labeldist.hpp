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

#include <span>
#include <string_view>
#include <vector>

#include "mmidict/pursuit.hpp"

namespace mmidict {

// M non-negative probabilities summing to 1; index c holds class c+1.
using ClassDistribution = std::vector<double>;

// How coefficients of one atom are pooled per class.
//   kAbs:    sum of |x_ij| (default)
//   kSigned: sum of x_ij, negative class totals clamped to 0
//   kCount:  number of signals with x_ij != 0
enum class Aggregation { kAbs, kSigned, kCount };

Aggregation parse_aggregation(std::string_view name);

bool is_distribution(std::span<const double> p, double tol = 1e-9);

ClassDistribution uniform_distribution(std::size_t classes);

// P(L | d_i) for every atom. labels[j] in [1, classes] is the class of
// signal j. Atoms without mass get the uniform distribution.
std::vector<ClassDistribution> atom_class_dist(const SparseCodeTable& codes, std::span<const int> labels,
                                               int classes, Aggregation agg = Aggregation::kAbs);

// Mean of the member distributions; uniform for an empty set.
ClassDistribution set_class_dist(const std::vector<ClassDistribution>& dists,
                                 std::span<const std::size_t> members);

// -sum_L P(L_target) P(L_cond) ln P(L_target), with 0 ln 0 = 0.
double label_cond_entropy(std::span<const double> p_target, std::span<const double> p_cond);

}  // namespace mmidict
