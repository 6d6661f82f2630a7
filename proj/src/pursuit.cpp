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

#include "mmidict/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmidict/parallel.hpp"
#include "mmidict/simd.hpp"

namespace mmidict {
namespace {

constexpr double kResidualStop = 1e-10;
constexpr double kDistTolerance = 1e-9;

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError(what + " has a negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistTolerance) throw ValidationError(what + " does not sum to 1");
}

}  // namespace

Dictionary::Dictionary(Matrix atoms, std::vector<std::vector<double>> class_dist,
                       std::vector<double> atom_prior)
    : atoms_(std::move(atoms)),
      by_row_(atoms_.transposed()),
      class_dist_(std::move(class_dist)),
      atom_prior_(std::move(atom_prior)) {
  if (!atoms_.all_finite()) throw ValidationError("dictionary has non-finite entries");
  for (std::size_t i = 0; i < size(); ++i) {
    const double norm = norm2(atom(i));
    if (std::abs(norm - 1.0) > kNormTolerance)
      throw ValidationError("atom " + std::to_string(i) + " is not unit norm (" +
                            std::to_string(norm) + ")");
  }
  if (!class_dist_.empty()) {
    if (class_dist_.size() != size()) throw ValidationError("class distribution count != atom count");
    const std::size_t m = class_dist_.front().size();
    for (std::size_t i = 0; i < class_dist_.size(); ++i) {
      if (class_dist_[i].size() != m || m == 0) throw ValidationError("ragged class distributions");
      check_distribution(class_dist_[i], "class distribution of atom " + std::to_string(i));
    }
  }
  if (!atom_prior_.empty()) {
    if (atom_prior_.size() != size()) throw ValidationError("atom prior count != atom count");
    check_distribution(atom_prior_, "atom prior");
  }
}

Dictionary Dictionary::with_class_dist(std::vector<std::vector<double>> dist) const {
  return Dictionary(atoms_, std::move(dist), atom_prior_);
}

SparseCodeTable::SparseCodeTable(std::size_t atoms, std::size_t signals, std::size_t sparsity)
    : atoms_(atoms), sparsity_(sparsity), codes_(signals) {}

void SparseCodeTable::set_signal(std::size_t j, std::vector<CodeEntry> code) {
  if (code.size() > sparsity_)
    throw ValidationError("signal " + std::to_string(j) + " support exceeds sparsity " +
                          std::to_string(sparsity_));
  for (std::size_t a = 0; a < code.size(); ++a) {
    if (code[a].atom >= atoms_) throw ValidationError("atom index out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (code[a].atom == code[b].atom) throw ValidationError("duplicate atom in one signal code");
  }
  codes_.at(j) = std::move(code);
}

std::vector<double> SparseCodeTable::atom_row(std::size_t i) const {
  std::vector<double> row(codes_.size(), 0.0);
  for (std::size_t j = 0; j < codes_.size(); ++j)
    for (const CodeEntry& e : codes_[j])
      if (e.atom == i) row[j] = e.value;
  return row;
}

std::vector<double> SparseCodeTable::dense_signal(std::size_t j) const {
  std::vector<double> x(atoms_, 0.0);
  for (const CodeEntry& e : codes_[j]) x[e.atom] = e.value;
  return x;
}

bool SparseCodeTable::empty() const {
  return std::all_of(codes_.begin(), codes_.end(), [](const auto& c) { return c.empty(); });
}

std::vector<CodeEntry> omp_encode_signal(const Dictionary& dict, std::span<const double> y,
                                         std::size_t sparsity) {
  const std::size_t n = dict.dim();
  const std::size_t k_atoms = dict.size();
  const Matrix& atoms = dict.atom_rows();

  std::vector<double> residual(y.begin(), y.end());
  std::vector<std::size_t> support;
  std::vector<bool> chosen(k_atoms, false);
  Matrix chol(sparsity, sparsity);  // Cholesky factor of the support Gram matrix
  std::vector<double> proj;         // D_S^T y
  std::vector<double> coef;

  while (support.size() < sparsity) {
    if (norm2(residual) < kResidualStop) break;
    std::size_t best = k_atoms;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < k_atoms; ++i) {
      if (chosen[i]) continue;
      const double c = std::abs(simd::dot(atoms.row(i).data(), residual.data(), n));
      if (c > best_abs) {
        best_abs = c;
        best = i;
      }
    }
    if (best == k_atoms) break;

    // Grow the Cholesky factor of D_S^T D_S by one row.
    const std::size_t s = support.size();
    const double* a_new = atoms.row(best).data();
    auto row = chol.row(s);
    for (std::size_t p = 0; p < s; ++p) row[p] = simd::dot(atoms.row(support[p]).data(), a_new, n);
    for (std::size_t p = 0; p < s; ++p)
      row[p] = (row[p] - simd::dot(chol.row(p).data(), row.data(), p)) / chol(p, p);
    const double pivot = simd::dot(a_new, a_new, n) - simd::dot(row.data(), row.data(), s);
    if (pivot <= 1e-14) break;  // atom is (numerically) in the span of the support
    row[s] = std::sqrt(pivot);

    support.push_back(best);
    chosen[best] = true;
    proj.push_back(simd::dot(a_new, y.data(), n));

    // Least squares on the support: (L L^T) coef = D_S^T y.
    coef = proj;
    for (std::size_t i = 0; i < coef.size(); ++i)
      coef[i] = (coef[i] - simd::dot(chol.row(i).data(), coef.data(), i)) / chol(i, i);
    for (std::size_t i = coef.size(); i-- > 0;) {
      coef[i] /= chol(i, i);
      for (std::size_t p = 0; p < i; ++p) coef[p] -= chol(i, p) * coef[i];
    }
    std::copy(y.begin(), y.end(), residual.begin());
    for (std::size_t p = 0; p < support.size(); ++p)
      simd::axpy(-coef[p], atoms.row(support[p]).data(), residual.data(), n);
  }

  std::vector<CodeEntry> code;
  code.reserve(support.size());
  for (std::size_t p = 0; p < support.size(); ++p) code.push_back({support[p], coef[p]});
  return code;
}

SparseCodeTable omp_encode(const Dictionary& dict, const Matrix& signals, std::size_t sparsity) {
  if (signals.rows() != dict.dim())
    throw ValidationError("signal dimension " + std::to_string(signals.rows()) +
                          " != dictionary dimension " + std::to_string(dict.dim()));
  if (sparsity == 0 || sparsity > dict.size() || sparsity > dict.dim())
    throw ValidationError("sparsity must be in [1, min(K, n)]");
  const Matrix by_signal = signals.transposed();
  SparseCodeTable table(dict.size(), signals.cols(), sparsity);
  std::vector<std::vector<CodeEntry>> codes(signals.cols());
  parallel_for(signals.cols(), [&](std::size_t j) {
    codes[j] = omp_encode_signal(dict, by_signal.row(j), sparsity);
  });
  for (std::size_t j = 0; j < codes.size(); ++j) table.set_signal(j, std::move(codes[j]));
  return table;
}

namespace {

// Residual rows E_j = y_j - D x_j, one contiguous row per signal.
Matrix residual_rows(const Matrix& atoms, const SparseCodeTable& codes, const Matrix& by_signal) {
  Matrix res = by_signal;
  const std::size_t n = by_signal.cols();
  for (std::size_t j = 0; j < codes.num_signals(); ++j)
    for (const CodeEntry& e : codes.signal(j))
      simd::axpy(-e.value, atoms.row(e.atom).data(), res.row(j).data(), n);
  return res;
}

double rmse_of(const Matrix& residual) {
  double ss = 0.0;
  for (std::size_t j = 0; j < residual.rows(); ++j) {
    const double* r = residual.row(j).data();
    ss += simd::dot(r, r, residual.cols());
  }
  return std::sqrt(ss / static_cast<double>(residual.rows() * residual.cols()));
}

}  // namespace

double reconstruction_rmse(const Dictionary& dict, const SparseCodeTable& codes, const Matrix& signals) {
  if (signals.rows() != dict.dim() || codes.num_signals() != signals.cols() ||
      codes.num_atoms() != dict.size())
    throw ValidationError("shape mismatch between dictionary, codes and signals");
  return rmse_of(residual_rows(dict.atom_rows(), codes, signals.transposed()));
}

KsvdResult ksvd_train(const Matrix& signals, const KsvdOptions& options) {
  const std::size_t n = signals.rows();
  const std::size_t num = signals.cols();
  const std::size_t k_atoms = options.atoms;
  if (k_atoms == 0) throw ValidationError("atom count must be positive");
  if (k_atoms > num) throw ValidationError("over-complete beyond sample count");
  if (options.iterations == 0) throw ValidationError("iterations must be >= 1");
  if (options.sparsity == 0 || options.sparsity > k_atoms || options.sparsity > n)
    throw ValidationError("sparsity must be in [1, min(K, n)]");

  const Matrix by_signal = signals.transposed();

  // Initial atoms: K distinct nonzero signal columns drawn uniformly.
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < num; ++j)
    if (norm2(by_signal.row(j)) > 0.0) candidates.push_back(j);
  if (candidates.size() < k_atoms) throw ValidationError("fewer nonzero signals than atoms");
  Rng rng(options.seed);
  for (std::size_t i = 0; i < k_atoms; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  Matrix learned(k_atoms, n);  // one atom per row while training
  for (std::size_t i = 0; i < k_atoms; ++i) {
    auto src = by_signal.row(candidates[i]);
    const double norm = norm2(src);
    for (std::size_t r = 0; r < n; ++r) learned(i, r) = src[r] / norm;
  }

  // One K-SVD pass from (atoms, codes). With keep_codes, a signal keeps its
  // previous code whenever OMP does not reconstruct it better; together with
  // the keep-better atom update this makes the pass unable to raise the
  // error.
  auto iterate = [&](Matrix& atoms, SparseCodeTable& codes, bool keep_codes) {
    std::vector<double> u(n), v;
    const Dictionary current(atoms.transposed());
    SparseCodeTable fresh = omp_encode(current, signals, options.sparsity);
    if (keep_codes) {
      for (std::size_t j = 0; j < num; ++j) {
        auto err = [&](std::span<const CodeEntry> code) {
          std::vector<double> r(by_signal.row(j).begin(), by_signal.row(j).end());
          for (const CodeEntry& e : code) simd::axpy(-e.value, atoms.row(e.atom).data(), r.data(), n);
          return simd::dot(r.data(), r.data(), n);
        };
        if (err(codes.signal(j)) < err(fresh.signal(j)))
          fresh.set_signal(j, std::vector<CodeEntry>(codes.signal(j).begin(), codes.signal(j).end()));
      }
    }
    codes = std::move(fresh);

    // Which signals use each atom, and where in their code.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> users(k_atoms);
    for (std::size_t j = 0; j < num; ++j) {
      auto code = codes.signal(j);
      for (std::size_t p = 0; p < code.size(); ++p) users[code[p].atom].push_back({j, p});
    }
    std::vector<std::vector<CodeEntry>> mutable_codes(num);
    for (std::size_t j = 0; j < num; ++j)
      mutable_codes[j].assign(codes.signal(j).begin(), codes.signal(j).end());

    Matrix residual = residual_rows(atoms, codes, by_signal);
    std::vector<std::size_t> unused;

    for (std::size_t k = 0; k < k_atoms; ++k) {
      const auto& omega = users[k];
      if (omega.empty()) {
        unused.push_back(k);
        continue;
      }
      double* dk = atoms.row(k).data();
      // Restricted residual E_k: add atom k's contribution back.
      Matrix ek(omega.size(), n);
      for (std::size_t q = 0; q < omega.size(); ++q) {
        const auto [j, p] = omega[q];
        std::copy_n(residual.row(j).data(), n, ek.row(q).data());
        simd::axpy(mutable_codes[j][p].value, dk, ek.row(q).data(), n);
      }
      // Dominant left singular vector by power iteration on E_k E_k^T,
      // started from the current atom; ||E_k^T u|| never decreases.
      std::copy_n(dk, n, u.begin());
      v.assign(omega.size(), 0.0);
      double sigma_prev = -1.0;
      for (int it = 0; it < 100; ++it) {
        for (std::size_t q = 0; q < omega.size(); ++q) v[q] = simd::dot(ek.row(q).data(), u.data(), n);
        std::vector<double> w(n, 0.0);
        for (std::size_t q = 0; q < omega.size(); ++q) simd::axpy(v[q], ek.row(q).data(), w.data(), n);
        const double wn = std::sqrt(simd::dot(w.data(), w.data(), n));
        if (wn == 0.0) break;
        for (std::size_t r = 0; r < n; ++r) u[r] = w[r] / wn;
        const double sigma = std::sqrt(wn);
        if (std::abs(sigma - sigma_prev) <= 1e-12 * sigma) break;
        sigma_prev = sigma;
      }
      for (std::size_t q = 0; q < omega.size(); ++q) v[q] = simd::dot(ek.row(q).data(), u.data(), n);
      // Keep the old atom if the power step could not improve on it.
      double old_gain = 0.0, new_gain = 0.0;
      for (std::size_t q = 0; q < omega.size(); ++q) {
        const double o = simd::dot(ek.row(q).data(), dk, n);
        old_gain += o * o;
        new_gain += v[q] * v[q];
      }
      if (new_gain < old_gain) {
        std::copy_n(dk, n, u.begin());
        for (std::size_t q = 0; q < omega.size(); ++q) v[q] = simd::dot(ek.row(q).data(), dk, n);
      }
      std::copy_n(u.begin(), n, dk);
      for (std::size_t q = 0; q < omega.size(); ++q) {
        const auto [j, p] = omega[q];
        mutable_codes[j][p].value = v[q];
        std::copy_n(ek.row(q).data(), n, residual.row(j).data());
        simd::axpy(-v[q], dk, residual.row(j).data(), n);
      }
    }

    // Unused atoms take the worst-reconstructed signals (lowest index on ties).
    if (!unused.empty()) {
      std::vector<std::pair<double, std::size_t>> worst(num);
      for (std::size_t j = 0; j < num; ++j) {
        const double* r = residual.row(j).data();
        worst[j] = {simd::dot(r, r, n), j};
      }
      std::stable_sort(worst.begin(), worst.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t q = 0; q < unused.size() && q < num; ++q) {
        if (worst[q].first <= 0.0) break;
        auto src = by_signal.row(worst[q].second);
        const double norm = norm2(src);
        for (std::size_t r = 0; r < n; ++r) atoms(unused[q], r) = src[r] / norm;
      }
    }

    // Renormalize against rounding drift; coefficients absorb the scale.
    for (std::size_t k = 0; k < k_atoms; ++k) {
      const double norm = norm2(atoms.row(k));
      if (norm == 1.0) continue;
      for (double& x : atoms.row(k)) x /= norm;
      for (const auto& [j, p] : users[k]) mutable_codes[j][p].value *= norm;
    }

    SparseCodeTable updated(k_atoms, num, options.sparsity);
    for (std::size_t j = 0; j < num; ++j) updated.set_signal(j, std::move(mutable_codes[j]));
    codes = std::move(updated);

    return rmse_of(residual_rows(atoms, codes, by_signal));
  };

  // Plain passes explore better; a pass that would raise the error is redone
  // with kept codes, so the history is non-increasing.
  SparseCodeTable codes;
  std::vector<double> history;
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    Matrix next_atoms = learned;
    SparseCodeTable next_codes = codes;
    double rmse = iterate(next_atoms, next_codes, false);
    if (!history.empty() && rmse > history.back()) {
      next_atoms = learned;
      next_codes = codes;
      rmse = iterate(next_atoms, next_codes, true);
    }
    learned = std::move(next_atoms);
    codes = std::move(next_codes);
    const bool stalled = !history.empty() && options.min_improvement >= 0.0 &&
                         history.back() - rmse < options.min_improvement;
    history.push_back(rmse);
    if (stalled) break;
  }

  return {Dictionary(learned.transposed()), std::move(codes), std::move(history)};
}

}  // namespace mmidict
