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

#include <cstddef>
#include <span>
#include <vector>

#include "mmidict/numcore.hpp"
#include "mmidict/pursuit.hpp"

namespace mmidict {

inline constexpr double kDefaultJitter = 1e-8;
inline constexpr double kDefaultSupportThreshold = 1e-6;
inline constexpr double kVarianceFloor = 1e-12;

// How conditional variances treat entries below the support threshold.
//   kDense:  every entry participates.
//   kSparse: entries with |K(i,j)| < tau are treated as exact zeros, and a
//            query only touches the atoms connected to its target through
//            the remaining (compact-support) entries.
enum class Evaluation { kDense, kSparse };

// Symmetric covariance over dictionary atoms (or frames), stored full, with
// a per-row index of entries whose magnitude reaches the threshold.
class KernelMatrix {
 public:
  KernelMatrix() = default;

  // `cov` must be square and symmetric within 1e-12 (it is symmetrized
  // exactly). `jitter` is added to every diagonal entry.
  static KernelMatrix from_dense(Matrix cov, double threshold = kDefaultSupportThreshold,
                                 double jitter = kDefaultJitter);

  std::size_t size() const { return values_.rows(); }
  double threshold() const { return threshold_; }
  double jitter() const { return jitter_; }

  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  // Entry as seen by sparse evaluation: 0 unless it is in the support index.
  double sparse_value(std::size_t i, std::size_t j) const;
  const Matrix& dense() const { return values_; }

  // Columns j (ascending, the diagonal included) with |K(i,j)| >= threshold.
  std::span<const std::size_t> support_row(std::size_t i) const { return support_[i]; }
  // Fraction of entries outside the support index.
  double sparsity() const;

 private:
  Matrix values_;
  std::vector<std::vector<std::size_t>> support_;
  double threshold_ = 0.0;
  double jitter_ = 0.0;
};

// Population covariance (1/N, mean removed) of the rows of X.
KernelMatrix kernel_from_codes(const SparseCodeTable& codes, double threshold = kDefaultSupportThreshold,
                               double jitter = kDefaultJitter);

// Gram matrix d_i^T d_j of the columns of frames (n x F).
KernelMatrix kernel_linear(const Matrix& frames, double threshold = kDefaultSupportThreshold,
                           double jitter = kDefaultJitter);

// V(target | cond) = K(t,t) - K(t,C)^T K(C,C)^{-1} K(t,C), floored at 1e-12.
// Throws Error("conditioning block not PD") if the Cholesky factorization of
// K(C,C) fails; ValidationError if target is in cond.
double conditional_variance(const KernelMatrix& kern, std::size_t target,
                            std::span<const std::size_t> cond, Evaluation eval = Evaluation::kDense);

// 0.5 * ln(2 pi e V(target | cond)).
double conditional_entropy(const KernelMatrix& kern, std::size_t target,
                           std::span<const std::size_t> cond, Evaluation eval = Evaluation::kDense);

double gaussian_entropy(double variance);

// Atoms j with |K(target, j)| >= threshold (target included).
std::vector<std::size_t> sparse_support_neighbors(const KernelMatrix& kern, std::size_t target);

// Members of cond reachable from target through support entries, walking
// only over atoms in cond. Conditioning on this subset is exact when the
// dropped entries are zero.
std::vector<std::size_t> connected_conditioning(const KernelMatrix& kern, std::size_t target,
                                                std::span<const std::size_t> cond);

// Batched forms used by the greedy selectors. Both agree with calling
// conditional_variance once per target.
//
// V(t | cond) for every t in targets (targets must be disjoint from cond).
std::vector<double> conditional_variances(const KernelMatrix& kern, std::span<const std::size_t> targets,
                                          std::span<const std::size_t> cond, Evaluation eval);
// V(t | set \ {t}) for every t in set, via diag of the inverse block.
std::vector<double> leave_one_out_variances(const KernelMatrix& kern, std::span<const std::size_t> set,
                                            Evaluation eval);

}  // namespace mmidict
