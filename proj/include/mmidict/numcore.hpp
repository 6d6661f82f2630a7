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
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmidict/error.hpp"

namespace mmidict {

// All randomness flows from one seeded generator passed down explicitly.
using Rng = std::mt19937_64;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  // Builds a matrix whose columns are the given vectors (all equal length).
  static Matrix from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix transposed() const;

  const std::vector<double>& values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

struct NormalizedColumns {
  Matrix matrix;
  std::vector<std::size_t> zero_columns;
};

// Scales every nonzero column to unit Euclidean norm. Zero columns are left
// as they are and listed in zero_columns.
NormalizedColumns l2_normalize_columns(const Matrix& m);

// One labeled (or unlabeled) sequence of per-frame feature vectors.
struct Sequence {
  std::string id;
  std::optional<int> label;  // class index in [1, M]
  std::string group;         // optional grouping key (e.g. actor), may be empty
  std::vector<std::int64_t> frame_ids;
  Matrix frames;             // one row per frame, n columns
};

class FeatureDataset {
 public:
  FeatureDataset() = default;
  // Validates: non-empty frames, shared dimension, unique ids, strictly
  // increasing frame ids, labels either on every sequence or on none.
  explicit FeatureDataset(std::vector<Sequence> sequences);

  const std::vector<Sequence>& sequences() const { return sequences_; }
  std::size_t dim() const { return dim_; }
  // Largest class index; 0 for unlabeled data.
  int num_classes() const { return num_classes_; }
  bool labeled() const { return num_classes_ > 0; }
  std::size_t num_frames() const;
  bool empty() const { return sequences_.empty(); }

  // Throws ValidationError unless every class in [1, M] occurs.
  void require_class_coverage() const;

 private:
  std::vector<Sequence> sequences_;
  std::size_t dim_ = 0;
  int num_classes_ = 0;
};

struct FrameRef {
  std::size_t sequence;  // index into FeatureDataset::sequences()
  std::size_t position;  // row within Sequence::frames
};

struct FlatSignals {
  Matrix signals;               // n x N, column j is signal j
  std::vector<int> labels;      // length N when labeled, otherwise empty
  std::vector<FrameRef> index;  // length N
};

// Columns follow sequence-major, frame-ascending order.
FlatSignals flatten(const FeatureDataset& dataset);

// Inverse of flatten: reassembles the dataset from the signal columns using
// `layout` for ids, labels, groups and frame ids.
FeatureDataset unflatten(const FlatSignals& flat, const FeatureDataset& layout);

}  // namespace mmidict
