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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mmidict/simd.hpp"

using namespace mmidict;

namespace {

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> v;
  if (const auto* t = simd::avx2_kernels()) v.push_back(t);
  if (const auto* t = simd::neon_kernels()) v.push_back(t);
  return v;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double tol(double scale) { return 1e-13 * std::max(1.0, scale); }

}  // namespace

TEST_CASE("scalar kernels compute the textbook formulas") {
  const auto& s = simd::scalar_kernels();
  const std::vector<double> a{1, 2, 3}, b{4, -5, 6};
  CHECK(s.dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
  CHECK(s.squared_distance(a.data(), b.data(), 3) == doctest::Approx(9 + 49 + 9));
  std::vector<double> y{1, 1, 1};
  s.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3, 5, 7});
  std::vector<double> acc{1, 0, 0};
  s.accumulate_squares(b.data(), acc.data(), 3);
  CHECK(acc == std::vector<double>{17, 25, 36});
  CHECK(s.dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("every vector variant matches the scalar reference on all lengths") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(5);
  for (const simd::KernelTable* t : variants()) {
    CAPTURE(simd::isa_name(t->isa));
    for (std::size_t n = 0; n <= 67; ++n) {
      CAPTURE(n);
      const auto a = random_vector(n, rng), b = random_vector(n, rng);
      const double d_ref = ref.dot(a.data(), b.data(), n);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - d_ref) <= tol(4.0 * n));
      const double q_ref = ref.squared_distance(a.data(), b.data(), n);
      CHECK(std::abs(t->squared_distance(a.data(), b.data(), n) - q_ref) <= tol(16.0 * n));

      auto y_ref = b, y = b;
      ref.axpy(-0.7, a.data(), y_ref.data(), n);
      t->axpy(-0.7, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - y_ref[i]) <= tol(4.0));

      auto s_ref = b, s = b;
      ref.accumulate_squares(a.data(), s_ref.data(), n);
      t->accumulate_squares(a.data(), s.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(s[i] - s_ref[i]) <= tol(8.0));
    }
  }
}

TEST_CASE("variants are deterministic and unaligned-safe") {
  std::mt19937_64 rng(9);
  const auto buf = random_vector(101, rng);
  for (const simd::KernelTable* t : variants()) {
    for (std::size_t off = 0; off < 4; ++off) {
      const double first = t->dot(buf.data() + off, buf.data() + 50, 47);
      CHECK(t->dot(buf.data() + off, buf.data() + 50, 47) == first);
      CHECK(std::abs(first - simd::scalar_kernels().dot(buf.data() + off, buf.data() + 50, 47)) <= tol(200.0));
    }
  }
}

TEST_CASE("active table can be overridden and restored") {
  const simd::KernelTable& before = simd::active();
  simd::set_active(simd::scalar_kernels());
  CHECK(simd::active().isa == simd::Isa::kScalar);
  const std::vector<double> a{3, 4};
  CHECK(simd::dot(a.data(), a.data(), 2) == 25.0);
  simd::set_active(before);
  CHECK(simd::active().isa == before.isa);
  CHECK(simd::isa_name(simd::Isa::kScalar) == "scalar");
}
