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

#include "mmidict/linalg.hpp"

#include <cmath>

#include "mmidict/simd.hpp"

namespace mmidict::linalg {

bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double* ri = a.row(i).data();
    for (std::size_t j = 0; j < i; ++j) {
      const double* rj = a.row(j).data();
      ri[j] = (ri[j] - simd::dot(ri, rj, j)) / rj[j];
    }
    const double pivot = ri[i] - simd::dot(ri, ri, i);
    if (!(pivot > 0.0)) return false;
    ri[i] = std::sqrt(pivot);
    for (std::size_t j = i + 1; j < n; ++j) ri[j] = 0.0;
  }
  return true;
}

void forward_substitute(const Matrix& lower, std::span<double> b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double* ri = lower.row(i).data();
    b[i] = (b[i] - simd::dot(ri, b.data(), i)) / ri[i];
  }
}

void back_substitute(const Matrix& lower, std::span<double> b) {
  for (std::size_t i = b.size(); i-- > 0;) {
    b[i] /= lower(i, i);
    const double bi = b[i];
    for (std::size_t k = 0; k < i; ++k) b[k] -= lower(i, k) * bi;
  }
}

std::vector<double> inverse_diagonal(const Matrix& lower) {
  // X = L^{-1} row by row: X_i = (e_i - sum_{k<i} L_ik X_k) / L_ii, then
  // diag(A^{-1})_j = sum_i X_ij^2.
  const std::size_t n = lower.rows();
  Matrix inv(n, n);
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = inv.row(i).data();
    xi[i] = 1.0;
    const double* li = lower.row(i).data();
    for (std::size_t k = 0; k < i; ++k) {
      if (li[k] != 0.0) simd::axpy(-li[k], inv.row(k).data(), xi, k + 1);
    }
    const double scale = 1.0 / li[i];
    for (std::size_t j = 0; j <= i; ++j) xi[j] *= scale;
    simd::accumulate_squares(xi, diag.data(), i + 1);
  }
  return diag;
}

Matrix principal_submatrix(const Matrix& a, std::span<const std::size_t> idx) {
  Matrix s(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) s(r, c) = a(idx[r], idx[c]);
  return s;
}

}  // namespace mmidict::linalg
