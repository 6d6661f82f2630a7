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
#include <vector>

#include "mmidict/numcore.hpp"

namespace mmidict::linalg {

// In-place lower Cholesky factorization of a symmetric matrix (only the lower
// triangle is read). On success the strict upper triangle is zeroed and true
// is returned; false if a pivot is not strictly positive.
bool cholesky(Matrix& a);

// Solves L x = b in place.
void forward_substitute(const Matrix& lower, std::span<double> b);
// Solves L^T x = b in place.
void back_substitute(const Matrix& lower, std::span<double> b);

// diag(A^{-1}) given the Cholesky factor L of A.
std::vector<double> inverse_diagonal(const Matrix& lower);

// Dense principal submatrix a[idx, idx].
Matrix principal_submatrix(const Matrix& a, std::span<const std::size_t> idx);

}  // namespace mmidict::linalg
