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

#include "mmidict/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmidict/select.hpp"
#include "mmidict/simd.hpp"

namespace mmidict {

Summary summarize_sequence(const Matrix& frames, std::size_t k, const SummarizeOptions& options) {
  const std::size_t count = frames.cols();
  if (k == 0 || k >= count)
    throw ValidationError("summary size " + std::to_string(k) + " must be in [1, " +
                          std::to_string(count) + " - 1]");
  const Matrix prepared = options.normalize_frames ? l2_normalize_columns(frames).matrix : frames;
  const KernelMatrix kern = kernel_linear(prepared, options.threshold, options.jitter);
  const SelectionTrace trace = select_mmi1(kern, k, options.eval);

  Summary out;
  for (std::size_t s = 0; s < trace.atoms.size(); ++s)
    out.steps.push_back({s + 1, trace.atoms[s], trace.entropy_selected[s], -trace.entropy_remaining[s]});
  std::sort(out.steps.begin(), out.steps.end(),
            [](const SummaryStep& a, const SummaryStep& b) { return a.frame < b.frame; });
  for (const SummaryStep& s : out.steps) out.frames.push_back(s.frame);
  return out;
}

Matrix normalize_feature_blocks(const Matrix& frames, std::span<const std::size_t> block_sizes) {
  std::size_t total = 0;
  for (std::size_t b : block_sizes) total += b;
  if (total != frames.rows())
    throw ValidationError("feature block sizes add up to " + std::to_string(total) + ", expected " +
                          std::to_string(frames.rows()));
  Matrix out = frames;
  for (std::size_t c = 0; c < frames.cols(); ++c) {
    std::size_t start = 0;
    for (std::size_t b : block_sizes) {
      double ss = 0.0;
      for (std::size_t r = start; r < start + b; ++r) ss += frames(r, c) * frames(r, c);
      if (ss > 0.0) {
        const double norm = std::sqrt(ss);
        for (std::size_t r = start; r < start + b; ++r) out(r, c) = frames(r, c) / norm;
      }
      start += b;
    }
  }
  return out;
}

SummaryReport coverage_diversity_report(const Summary& summary, const Matrix& frames) {
  const Matrix rows = frames.transposed();
  const std::size_t n = rows.cols();
  auto dist = [&](std::size_t a, std::size_t b) {
    return std::sqrt(simd::squared_distance(rows.row(a).data(), rows.row(b).data(), n));
  };
  SummaryReport report{0.0, 0.0};
  const auto& sel = summary.frames;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sel.size(); ++i)
    for (std::size_t j = i + 1; j < sel.size(); ++j, ++pairs) report.diversity += dist(sel[i], sel[j]);
  if (pairs > 0) report.diversity /= static_cast<double>(pairs);
  for (std::size_t f = 0; f < rows.rows(); ++f) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t s : sel) nearest = std::min(nearest, dist(f, s));
    report.coverage += nearest;
  }
  report.coverage /= static_cast<double>(rows.rows());
  return report;
}

}  // namespace mmidict
