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

#include "mmidict/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmidict/linalg.hpp"
#include "mmidict/parallel.hpp"
#include "mmidict/simd.hpp"

namespace mmidict {

KernelMatrix KernelMatrix::from_dense(Matrix cov, double threshold, double jitter) {
  if (cov.rows() != cov.cols()) throw ValidationError("kernel must be square");
  if (!(threshold >= 0.0) || !(jitter >= 0.0)) throw ValidationError("threshold and jitter must be >= 0");
  if (!cov.all_finite()) throw ValidationError("kernel has non-finite entries");
  const std::size_t k = cov.rows();
  for (std::size_t i = 0; i < k; ++i) {
    if (cov(i, i) < 0.0) throw ValidationError("kernel diagonal must be non-negative");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * std::max(1.0, std::abs(cov(i, j))))
        throw ValidationError("kernel is not symmetric");
      const double mean = 0.5 * (cov(i, j) + cov(j, i));
      cov(i, j) = cov(j, i) = mean;
    }
  }
  KernelMatrix kern;
  kern.threshold_ = threshold;
  kern.jitter_ = jitter;
  for (std::size_t i = 0; i < k; ++i) cov(i, i) += jitter;
  kern.values_ = std::move(cov);
  kern.support_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (i == j || std::abs(kern.values_(i, j)) >= threshold) kern.support_[i].push_back(j);
  }
  return kern;
}

double KernelMatrix::sparse_value(std::size_t i, std::size_t j) const {
  const auto& row = support_[i];
  return std::binary_search(row.begin(), row.end(), j) ? values_(i, j) : 0.0;
}

double KernelMatrix::sparsity() const {
  if (size() == 0) return 0.0;
  std::size_t kept = 0;
  for (const auto& row : support_) kept += row.size();
  return 1.0 - static_cast<double>(kept) / static_cast<double>(size() * size());
}

KernelMatrix kernel_from_codes(const SparseCodeTable& codes, double threshold, double jitter) {
  const std::size_t num = codes.num_signals();
  if (codes.num_atoms() == 0) throw ValidationError("codes are empty");
  if (num < 2) throw ValidationError("covariance undefined");
  const std::size_t k = codes.num_atoms();
  std::vector<double> mean(k, 0.0);
  Matrix second(k, k);
  for (std::size_t j = 0; j < num; ++j) {
    auto code = codes.signal(j);
    for (const CodeEntry& a : code) {
      mean[a.atom] += a.value;
      for (const CodeEntry& b : code) second(a.atom, b.atom) += a.value * b.value;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(num);
  for (double& m : mean) m *= inv_n;
  Matrix cov(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) = second(i, j) * inv_n - mean[i] * mean[j];
  return KernelMatrix::from_dense(std::move(cov), threshold, jitter);
}

KernelMatrix kernel_linear(const Matrix& frames, double threshold, double jitter) {
  const Matrix rows = frames.transposed();
  const std::size_t f = rows.rows();
  Matrix gram(f, f);
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = simd::dot(rows.row(i).data(), rows.row(j).data(), rows.cols());
  return KernelMatrix::from_dense(std::move(gram), threshold, jitter);
}

double gaussian_entropy(double variance) {
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * std::max(variance, kVarianceFloor));
}

namespace {

Matrix block(const KernelMatrix& kern, std::span<const std::size_t> idx, Evaluation eval) {
  if (eval == Evaluation::kDense) return linalg::principal_submatrix(kern.dense(), idx);
  Matrix b(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) b(r, c) = kern.sparse_value(idx[r], idx[c]);
  return b;
}

double entry(const KernelMatrix& kern, std::size_t i, std::size_t j, Evaluation eval) {
  return eval == Evaluation::kDense ? kern(i, j) : kern.sparse_value(i, j);
}

Matrix factor(Matrix b) {
  if (!linalg::cholesky(b)) throw Error("conditioning block not PD");
  return b;
}

// Connected components of the support graph restricted to `members`.
std::vector<std::vector<std::size_t>> components(const KernelMatrix& kern,
                                                 std::span<const std::size_t> members) {
  std::vector<char> in_set(kern.size(), 0), seen(kern.size(), 0);
  for (std::size_t m : members) in_set[m] = 1;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start : members) {
    if (seen[start]) continue;
    std::vector<std::size_t> comp{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (std::size_t v : kern.support_row(comp[head])) {
        if (in_set[v] && !seen[v]) {
          seen[v] = 1;
          comp.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::vector<std::size_t> connected_conditioning(const KernelMatrix& kern, std::size_t target,
                                                std::span<const std::size_t> cond) {
  std::vector<char> in_set(kern.size(), 0), seen(kern.size(), 0);
  for (std::size_t c : cond) in_set[c] = 1;
  std::vector<std::size_t> frontier{target};
  std::vector<std::size_t> reached;
  seen[target] = 1;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    for (std::size_t v : kern.support_row(frontier[head])) {
      if (in_set[v] && !seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
        reached.push_back(v);
      }
    }
  }
  std::sort(reached.begin(), reached.end());
  return reached;
}

double conditional_variance(const KernelMatrix& kern, std::size_t target,
                            std::span<const std::size_t> cond, Evaluation eval) {
  if (target >= kern.size()) throw ValidationError("target out of range");
  for (std::size_t c : cond) {
    if (c == target) throw ValidationError("target is in the conditioning set");
    if (c >= kern.size()) throw ValidationError("conditioning atom out of range");
  }
  std::vector<std::size_t> used;
  if (eval == Evaluation::kSparse) {
    used = connected_conditioning(kern, target, cond);
  } else {
    used.assign(cond.begin(), cond.end());
  }
  double v = kern(target, target);
  if (!used.empty()) {
    const Matrix lower = factor(block(kern, used, eval));
    std::vector<double> w(used.size());
    for (std::size_t r = 0; r < used.size(); ++r) w[r] = entry(kern, used[r], target, eval);
    linalg::forward_substitute(lower, w);
    v -= simd::dot(w.data(), w.data(), w.size());
  }
  return std::max(v, kVarianceFloor);
}

double conditional_entropy(const KernelMatrix& kern, std::size_t target,
                           std::span<const std::size_t> cond, Evaluation eval) {
  return gaussian_entropy(conditional_variance(kern, target, cond, eval));
}

std::vector<std::size_t> sparse_support_neighbors(const KernelMatrix& kern, std::size_t target) {
  auto row = kern.support_row(target);
  return {row.begin(), row.end()};
}

std::vector<double> conditional_variances(const KernelMatrix& kern, std::span<const std::size_t> targets,
                                          std::span<const std::size_t> cond, Evaluation eval) {
  std::vector<double> out(targets.size());
  if (cond.empty()) {
    for (std::size_t t = 0; t < targets.size(); ++t)
      out[t] = std::max(kern(targets[t], targets[t]), kVarianceFloor);
    return out;
  }

  std::vector<std::vector<std::size_t>> groups;
  if (eval == Evaluation::kDense) {
    groups.emplace_back(cond.begin(), cond.end());
  } else {
    groups = components(kern, cond);
  }
  std::vector<Matrix> factors;
  factors.reserve(groups.size());
  for (const auto& g : groups) factors.push_back(factor(block(kern, g, eval)));
  std::vector<int> group_of(kern.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t a : groups[g]) group_of[a] = static_cast<int>(g);

  parallel_for(targets.size(), [&](std::size_t t) {
    const std::size_t target = targets[t];
    std::vector<std::size_t> touched;
    if (eval == Evaluation::kDense) {
      touched.push_back(0);
    } else {
      for (std::size_t v : kern.support_row(target)) {
        const int g = group_of[v];
        if (g >= 0 && std::find(touched.begin(), touched.end(), std::size_t(g)) == touched.end())
          touched.push_back(static_cast<std::size_t>(g));
      }
    }
    double v = kern(target, target);
    std::vector<double> w;
    for (std::size_t g : touched) {
      const auto& members = groups[g];
      w.resize(members.size());
      for (std::size_t r = 0; r < members.size(); ++r) w[r] = entry(kern, members[r], target, eval);
      linalg::forward_substitute(factors[g], w);
      v -= simd::dot(w.data(), w.data(), w.size());
    }
    out[t] = std::max(v, kVarianceFloor);
  });
  return out;
}

std::vector<double> leave_one_out_variances(const KernelMatrix& kern, std::span<const std::size_t> set,
                                            Evaluation eval) {
  std::vector<std::vector<std::size_t>> groups;
  if (eval == Evaluation::kDense) {
    groups.emplace_back(set.begin(), set.end());
  } else {
    groups = components(kern, set);
  }
  std::vector<double> by_atom(kern.size(), 0.0);
  parallel_for(groups.size(), [&](std::size_t g) {
    const auto& members = groups[g];
    if (members.size() == 1) {
      by_atom[members[0]] = kern(members[0], members[0]);
      return;
    }
    const std::vector<double> inv_diag = linalg::inverse_diagonal(factor(block(kern, members, eval)));
    for (std::size_t r = 0; r < members.size(); ++r) by_atom[members[r]] = 1.0 / inv_diag[r];
  });
  std::vector<double> out(set.size());
  for (std::size_t t = 0; t < set.size(); ++t) out[t] = std::max(by_atom[set[t]], kVarianceFloor);
  return out;
}

}  // namespace mmidict
