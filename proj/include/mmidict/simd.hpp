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

// Data-parallel inner loops shared by every module.
//
// Each kernel has a scalar reference implementation and optional AVX2/FMA
// (x86-64) or NEON (aarch64) variants. The variant is chosen once, at first
// use, from the running CPU; MMIDICT_SIMD=scalar forces the reference path.
// All variants agree with the scalar reference to within rounding (see
// tests/test_simd.cpp); for a fixed variant results are bit-reproducible.

#include <cstddef>
#include <string_view>

namespace mmidict::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // dst[i] += src[i] * src[i]
  void (*accumulate_squares)(const double* src, double* dst, std::size_t n);
};

const KernelTable& scalar_kernels();
// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The table used by the library. Selected on first call.
const KernelTable& active();
// Overrides the active table (tests and benchmarks). Not thread-safe with
// respect to concurrent kernel calls.
void set_active(const KernelTable& table);

std::string_view isa_name(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline double squared_distance(const double* a, const double* b, std::size_t n) {
  return active().squared_distance(a, b, n);
}
inline void accumulate_squares(const double* src, double* dst, std::size_t n) {
  active().accumulate_squares(src, dst, n);
}

}  // namespace mmidict::simd
