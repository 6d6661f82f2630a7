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
#include <span>
#include <vector>

#include "mmidict/numcore.hpp"

namespace mmidict {

// A dictionary of unit-norm atoms with optional per-atom class
// distributions P(L | d_i) and atom priors p(d_i).
class Dictionary {
 public:
  static constexpr double kNormTolerance = 1e-9;

  Dictionary() = default;
  // atoms: n x K, one atom per column. Throws ValidationError if any atom is
  // not unit norm or the optional tables are malformed.
  explicit Dictionary(Matrix atoms, std::vector<std::vector<double>> class_dist = {},
                      std::vector<double> atom_prior = {});

  std::size_t dim() const { return atoms_.rows(); }
  std::size_t size() const { return atoms_.cols(); }
  const Matrix& atoms() const { return atoms_; }
  // Atom i as a contiguous vector of length dim().
  std::span<const double> atom(std::size_t i) const { return by_row_.row(i); }
  // Atoms as rows (K x n).
  const Matrix& atom_rows() const { return by_row_; }

  bool has_class_dist() const { return !class_dist_.empty(); }
  const std::vector<std::vector<double>>& class_dist() const { return class_dist_; }
  const std::vector<double>& atom_prior() const { return atom_prior_; }

  Dictionary with_class_dist(std::vector<std::vector<double>> dist) const;

 private:
  Matrix atoms_;
  Matrix by_row_;
  std::vector<std::vector<double>> class_dist_;
  std::vector<double> atom_prior_;
};

struct CodeEntry {
  std::size_t atom;
  double value;
  friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

// Sparse coefficients X (K x N), stored per signal.
class SparseCodeTable {
 public:
  SparseCodeTable() = default;
  SparseCodeTable(std::size_t atoms, std::size_t signals, std::size_t sparsity);

  std::size_t num_atoms() const { return atoms_; }
  std::size_t num_signals() const { return codes_.size(); }
  std::size_t sparsity() const { return sparsity_; }

  std::span<const CodeEntry> signal(std::size_t j) const { return codes_[j]; }
  // Replaces the code of signal j; enforces support <= sparsity, indices in
  // range and no duplicates.
  void set_signal(std::size_t j, std::vector<CodeEntry> code);

  // Row i of X: the observation vector of atom i across all signals.
  std::vector<double> atom_row(std::size_t i) const;
  // Column j of X as a dense K-vector.
  std::vector<double> dense_signal(std::size_t j) const;
  bool empty() const;

  friend bool operator==(const SparseCodeTable&, const SparseCodeTable&) = default;

 private:
  std::size_t atoms_ = 0;
  std::size_t sparsity_ = 0;
  std::vector<std::vector<CodeEntry>> codes_;
};

// Orthogonal matching pursuit of every column of signals (n x N) with at
// most `sparsity` atoms. Stops early once the residual norm drops below
// 1e-10. Correlation ties go to the lowest atom index.
SparseCodeTable omp_encode(const Dictionary& dict, const Matrix& signals, std::size_t sparsity);

// OMP of a single signal.
std::vector<CodeEntry> omp_encode_signal(const Dictionary& dict, std::span<const double> y,
                                         std::size_t sparsity);

// ||Y - D X||_F / sqrt(n N).
double reconstruction_rmse(const Dictionary& dict, const SparseCodeTable& codes, const Matrix& signals);

struct KsvdOptions {
  std::size_t atoms = 0;
  std::size_t sparsity = 0;
  std::size_t iterations = 20;
  // Stop once an iteration improves RMSE by less than this. Negative
  // disables early stopping.
  double min_improvement = 1e-6;
  std::uint64_t seed = 0;
};

struct KsvdResult {
  Dictionary dictionary;
  SparseCodeTable codes;
  std::vector<double> error_history;  // RMSE after each completed iteration
};

// K-SVD from K distinct signals (seeded). Atoms left unused are replaced by
// the worst-reconstructed signals. error_history never increases: a pass
// that would raise the error is redone keeping previous codes and atoms
// wherever the new ones fit worse.
KsvdResult ksvd_train(const Matrix& signals, const KsvdOptions& options);

}  // namespace mmidict
