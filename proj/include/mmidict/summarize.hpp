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
#include <string>
#include <vector>

#include "mmidict/gp.hpp"
#include "mmidict/numcore.hpp"

namespace mmidict {

struct SummaryStep {
  std::size_t rank;          // 1-based greedy order
  std::size_t frame;         // column index in the input frames
  double diversity_term;     // H(d* | D*)
  double coverage_term;      // -H(d* | D-bar*)
};

struct Summary {
  std::string sequence_id;
  std::vector<std::size_t> frames;  // ascending
  std::vector<SummaryStep> steps;   // ascending by frame
};

struct SummarizeOptions {
  bool normalize_frames = true;
  Evaluation eval = Evaluation::kSparse;
  double threshold = kDefaultSupportThreshold;
  double jitter = kDefaultJitter;
};

// Greedy MMI-1 over frames (columns of an n x F matrix) with the linear
// kernel d_i^T d_j. Requires 1 <= k <= F - 1.
Summary summarize_sequence(const Matrix& frames, std::size_t k, const SummarizeOptions& options = {});

// Normalizes each consecutive block of rows (one block per feature type)
// within every frame column; the block sizes must add up to n.
Matrix normalize_feature_blocks(const Matrix& frames, std::span<const std::size_t> block_sizes);

struct SummaryReport {
  double diversity;  // mean pairwise distance among selected frames
  double coverage;   // mean distance from each frame to its nearest selected frame
};

SummaryReport coverage_diversity_report(const Summary& summary, const Matrix& frames);

}  // namespace mmidict
