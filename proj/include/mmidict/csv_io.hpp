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

// Readers and writers for every on-disk format. Readers throw
// ValidationError with the file name and 1-based line number on malformed
// input. Numbers are written in shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmidict/gp.hpp"
#include "mmidict/numcore.hpp"
#include "mmidict/pursuit.hpp"
#include "mmidict/recognize.hpp"
#include "mmidict/select.hpp"
#include "mmidict/summarize.hpp"

namespace mmidict::io {

std::string format_number(double v);

// seq,frame,label[,group],f0,...,f{n-1}
FeatureDataset parse_feature_table(std::istream& in, const std::string& source);
FeatureDataset read_feature_table(const std::filesystem::path& path);
void write_feature_table(const std::filesystem::path& path, const FeatureDataset& dataset);

// atom,f0,...,f{n-1}  plus optional sidecar <stem>.classdist.csv with
// atom,p1,...,pM.
std::filesystem::path classdist_sidecar(const std::filesystem::path& dictionary_path);
Dictionary read_dictionary(const std::filesystem::path& path);
void write_dictionary(const std::filesystem::path& path, const Dictionary& dict);

// seq,frame,atom,value triplets; signals are addressed through the
// dataset's (sequence id, frame id) pairs.
void write_codes(const std::filesystem::path& path, const SparseCodeTable& codes,
                 const FeatureDataset& dataset, const FlatSignals& flat);
SparseCodeTable read_codes(const std::filesystem::path& path, const FeatureDataset& dataset,
                           const FlatSignals& flat, std::size_t atoms);

void write_error_history(const std::filesystem::path& path, const std::vector<double>& history);

// step,atom,objective,seconds
void write_trace(const std::filesystem::path& path, const SelectionTrace& trace, bool with_timing);
void write_merge_trace(const std::filesystem::path& path, const std::vector<MergeStep>& merges,
                       bool with_timing);

// bin_low,bin_high,frequency
void write_histogram(const std::filesystem::path& path, const Histogram& h);

// seq,true_label,predicted_label,distance
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);

// seq,rank,frame,diversity_term,coverage_term
void write_summaries(const std::filesystem::path& path, const std::vector<Summary>& summaries,
                     const FeatureDataset& dataset);

// i,j,value for entries in the support index
void write_kernel(const std::filesystem::path& path, const KernelMatrix& kern);

}  // namespace mmidict::io
