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

#include "mmidict/numcore.hpp"

#include <cmath>
#include <unordered_set>

#include "mmidict/simd.hpp"

namespace mmidict {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("matrix data size " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().size();
  Matrix m(n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) throw ValidationError("ragged columns");
    m.set_column(c, columns[c]);
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return simd::dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

NormalizedColumns l2_normalize_columns(const Matrix& m) {
  NormalizedColumns out{m, {}};
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) ss += m(r, c) * m(r, c);
    if (ss == 0.0) {
      out.zero_columns.push_back(c);
      continue;
    }
    const double norm = std::sqrt(ss);
    for (std::size_t r = 0; r < m.rows(); ++r) out.matrix(r, c) = m(r, c) / norm;
  }
  return out;
}

FeatureDataset::FeatureDataset(std::vector<Sequence> sequences)
    : sequences_(std::move(sequences)) {
  std::unordered_set<std::string> ids;
  std::size_t labeled = 0;
  for (const Sequence& s : sequences_) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sequence id '" + s.id + "'");
    if (s.frames.rows() == 0) throw ValidationError("sequence '" + s.id + "' has no frames");
    if (s.frame_ids.size() != s.frames.rows())
      throw ValidationError("sequence '" + s.id + "' frame id count mismatch");
    if (dim_ == 0) dim_ = s.frames.cols();
    if (s.frames.cols() != dim_ || dim_ == 0)
      throw ValidationError("sequence '" + s.id + "' has feature dimension " +
                            std::to_string(s.frames.cols()) + ", expected " +
                            std::to_string(dim_));
    if (!s.frames.all_finite()) throw ValidationError("sequence '" + s.id + "' has non-finite features");
    for (std::size_t f = 1; f < s.frame_ids.size(); ++f)
      if (s.frame_ids[f] <= s.frame_ids[f - 1])
        throw ValidationError("sequence '" + s.id + "' frame ids not strictly increasing");
    if (s.label) {
      if (*s.label < 1) throw ValidationError("sequence '" + s.id + "' has label < 1");
      num_classes_ = std::max(num_classes_, *s.label);
      ++labeled;
    }
  }
  if (labeled != 0 && labeled != sequences_.size())
    throw ValidationError("labels must be present on every sequence or on none");
}

std::size_t FeatureDataset::num_frames() const {
  std::size_t n = 0;
  for (const Sequence& s : sequences_) n += s.frames.rows();
  return n;
}

void FeatureDataset::require_class_coverage() const {
  if (!labeled()) throw ValidationError("dataset is unlabeled");
  std::vector<bool> seen(num_classes_ + 1, false);
  for (const Sequence& s : sequences_) seen[*s.label] = true;
  for (int c = 1; c <= num_classes_; ++c)
    if (!seen[c]) throw ValidationError("class " + std::to_string(c) + " has no sequences");
}

FlatSignals flatten(const FeatureDataset& dataset) {
  if (dataset.empty()) throw ValidationError("no signals");
  FlatSignals flat;
  const std::size_t n = dataset.dim();
  flat.signals = Matrix(n, dataset.num_frames());
  std::size_t j = 0;
  const auto& seqs = dataset.sequences();
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    for (std::size_t f = 0; f < seqs[s].frames.rows(); ++f, ++j) {
      flat.signals.set_column(j, seqs[s].frames.row(f));
      flat.index.push_back({s, f});
      if (dataset.labeled()) flat.labels.push_back(*seqs[s].label);
    }
  }
  return flat;
}

FeatureDataset unflatten(const FlatSignals& flat, const FeatureDataset& layout) {
  std::vector<Sequence> seqs;
  seqs.reserve(layout.sequences().size());
  for (const Sequence& s : layout.sequences()) {
    seqs.push_back({s.id, s.label, s.group, s.frame_ids, Matrix(s.frames.rows(), flat.signals.rows())});
  }
  for (std::size_t j = 0; j < flat.index.size(); ++j) {
    const FrameRef& ref = flat.index[j];
    auto row = seqs.at(ref.sequence).frames.row(ref.position);
    for (std::size_t r = 0; r < flat.signals.rows(); ++r) row[r] = flat.signals(r, j);
  }
  return FeatureDataset(std::move(seqs));
}

}  // namespace mmidict
