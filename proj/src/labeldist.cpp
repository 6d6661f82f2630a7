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

#include "mmidict/labeldist.hpp"

#include <cmath>
#include <string>

namespace mmidict {

Aggregation parse_aggregation(std::string_view name) {
  if (name == "abs") return Aggregation::kAbs;
  if (name == "signed") return Aggregation::kSigned;
  if (name == "count") return Aggregation::kCount;
  throw ValidationError("unknown aggregation '" + std::string(name) + "'");
}

bool is_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return !p.empty() && std::abs(sum - 1.0) <= tol;
}

ClassDistribution uniform_distribution(std::size_t classes) {
  return ClassDistribution(classes, 1.0 / static_cast<double>(classes));
}

std::vector<ClassDistribution> atom_class_dist(const SparseCodeTable& codes, std::span<const int> labels,
                                               int classes, Aggregation agg) {
  if (classes < 1) throw ValidationError("class count must be >= 1");
  if (labels.size() != codes.num_signals())
    throw ValidationError("every signal needs a label (" + std::to_string(labels.size()) + " labels for " +
                          std::to_string(codes.num_signals()) + " signals)");
  for (int l : labels)
    if (l < 1 || l > classes) throw ValidationError("unlabeled or out-of-range signal label");

  const std::size_t m = static_cast<std::size_t>(classes);
  std::vector<ClassDistribution> mass(codes.num_atoms(), ClassDistribution(m, 0.0));
  for (std::size_t j = 0; j < codes.num_signals(); ++j) {
    const std::size_t c = static_cast<std::size_t>(labels[j] - 1);
    for (const CodeEntry& e : codes.signal(j)) {
      switch (agg) {
        case Aggregation::kAbs: mass[e.atom][c] += std::abs(e.value); break;
        case Aggregation::kSigned: mass[e.atom][c] += e.value; break;
        case Aggregation::kCount: mass[e.atom][c] += e.value != 0.0 ? 1.0 : 0.0; break;
      }
    }
  }
  for (ClassDistribution& p : mass) {
    double total = 0.0;
    for (double& v : p) {
      v = std::max(v, 0.0);
      total += v;
    }
    if (total > 0.0) {
      for (double& v : p) v /= total;
    } else {
      p = uniform_distribution(m);
    }
  }
  return mass;
}

ClassDistribution set_class_dist(const std::vector<ClassDistribution>& dists,
                                 std::span<const std::size_t> members) {
  if (dists.empty()) throw ValidationError("no class distributions");
  const std::size_t m = dists.front().size();
  if (members.empty()) return uniform_distribution(m);
  ClassDistribution mean(m, 0.0);
  for (std::size_t i : members)
    for (std::size_t c = 0; c < m; ++c) mean[c] += dists.at(i)[c];
  for (double& v : mean) v /= static_cast<double>(members.size());
  return mean;
}

double label_cond_entropy(std::span<const double> p_target, std::span<const double> p_cond) {
  if (p_target.size() != p_cond.size()) throw ValidationError("class count mismatch");
  double h = 0.0;
  for (std::size_t c = 0; c < p_target.size(); ++c) {
    if (p_target[c] > 0.0) h -= p_target[c] * p_cond[c] * std::log(p_target[c]);
  }
  return h;
}

}  // namespace mmidict
