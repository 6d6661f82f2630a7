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

#include "mmidict/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace mmidict::io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Line-oriented CSV reader that remembers where it is for error messages.
class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      fields = split(line_);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(source_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  double number(std::string_view field) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
      fail("malformed number '" + std::string(field) + "'");
    if (!std::isfinite(v)) fail("non-finite number '" + std::string(field) + "'");
    return v;
  }

  std::int64_t integer(std::string_view field) const {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
      fail("malformed integer '" + std::string(field) + "'");
    return v;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void expect_header(Reader& r, const std::vector<std::string_view>& fields,
                   const std::vector<std::string>& expected_prefix) {
  if (fields.size() < expected_prefix.size()) r.fail("header too short");
  for (std::size_t i = 0; i < expected_prefix.size(); ++i)
    if (fields[i] != expected_prefix[i]) r.fail("expected column '" + expected_prefix[i] + "'");
}

std::size_t numbered_columns(Reader& r, const std::vector<std::string_view>& fields, std::size_t from,
                             char prefix, std::size_t first_index) {
  for (std::size_t i = from; i < fields.size(); ++i) {
    const std::string want = prefix + std::to_string(i - from + first_index);
    if (fields[i] != want) r.fail("expected column '" + want + "'");
  }
  return fields.size() - from;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

FeatureDataset parse_feature_table(std::istream& in, const std::string& source) {
  Reader r(in, source);
  std::vector<std::string_view> fields;
  if (!r.next(fields)) throw ValidationError(source + ": empty file");
  std::vector<std::string> header(fields.begin(), fields.end());
  std::vector<std::string_view> hv(header.begin(), header.end());
  expect_header(r, hv, {"seq", "frame", "label"});
  std::size_t first_feature = 3;
  const bool has_group = hv.size() > 3 && hv[3] == "group";
  if (has_group) first_feature = 4;
  const std::size_t n = numbered_columns(r, hv, first_feature, 'f', 0);
  if (n == 0) r.fail("no feature columns");

  struct Building {
    Sequence seq;
    std::vector<double> values;
  };
  std::vector<Building> seqs;
  std::unordered_map<std::string, std::size_t> by_id;
  while (r.next(fields)) {
    if (fields.size() != header.size())
      r.fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    const std::string id(fields[0]);
    if (id.empty()) r.fail("empty sequence id");
    const std::int64_t frame = r.integer(fields[1]);
    if (frame < 0) r.fail("frame must be non-negative");
    std::optional<int> label;
    if (!fields[2].empty()) {
      const std::int64_t l = r.integer(fields[2]);
      if (l < 1) r.fail("label must be >= 1");
      label = static_cast<int>(l);
    }
    auto [it, fresh] = by_id.try_emplace(id, seqs.size());
    if (fresh) {
      seqs.push_back({});
      seqs.back().seq.id = id;
      seqs.back().seq.label = label;
      if (has_group) seqs.back().seq.group = std::string(fields[3]);
    }
    Building& b = seqs[it->second];
    if (b.seq.label != label) r.fail("label changes within sequence '" + id + "'");
    if (has_group && b.seq.group != fields[3]) r.fail("group changes within sequence '" + id + "'");
    if (!b.seq.frame_ids.empty() && frame <= b.seq.frame_ids.back())
      r.fail("frame ids must be strictly increasing within sequence '" + id + "'");
    b.seq.frame_ids.push_back(frame);
    for (std::size_t i = 0; i < n; ++i) b.values.push_back(r.number(fields[first_feature + i]));
  }
  std::vector<Sequence> out;
  out.reserve(seqs.size());
  for (Building& b : seqs) {
    b.seq.frames = Matrix(b.seq.frame_ids.size(), n, std::move(b.values));
    out.push_back(std::move(b.seq));
  }
  if (out.empty()) throw ValidationError(source + ": no rows");
  return FeatureDataset(std::move(out));
}

FeatureDataset read_feature_table(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return parse_feature_table(in, path.string());
}

void write_feature_table(const std::filesystem::path& path, const FeatureDataset& dataset) {
  std::ofstream out = open_out(path);
  bool groups = false;
  for (const Sequence& s : dataset.sequences()) groups = groups || !s.group.empty();
  out << "seq,frame,label";
  if (groups) out << ",group";
  for (std::size_t i = 0; i < dataset.dim(); ++i) out << ",f" << i;
  out << '\n';
  for (const Sequence& s : dataset.sequences()) {
    for (std::size_t f = 0; f < s.frames.rows(); ++f) {
      out << s.id << ',' << s.frame_ids[f] << ',';
      if (s.label) out << *s.label;
      if (groups) out << ',' << s.group;
      for (double v : s.frames.row(f)) out << ',' << format_number(v);
      out << '\n';
    }
  }
}

std::filesystem::path classdist_sidecar(const std::filesystem::path& dictionary_path) {
  std::filesystem::path p = dictionary_path;
  p.replace_extension();
  p += ".classdist.csv";
  return p;
}

Dictionary read_dictionary(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  Reader r(in, path.string());
  std::vector<std::string_view> fields;
  if (!r.next(fields)) throw ValidationError(path.string() + ": empty file");
  expect_header(r, fields, {"atom"});
  const std::size_t n = numbered_columns(r, fields, 1, 'f', 0);
  if (n == 0) r.fail("no feature columns");
  std::vector<std::vector<double>> columns;
  while (r.next(fields)) {
    if (fields.size() != n + 1) r.fail("expected " + std::to_string(n + 1) + " fields");
    if (r.integer(fields[0]) != static_cast<std::int64_t>(columns.size())) r.fail("atoms must be numbered 0..K-1 in order");
    std::vector<double> atom(n);
    for (std::size_t i = 0; i < n; ++i) atom[i] = r.number(fields[i + 1]);
    columns.push_back(std::move(atom));
  }
  if (columns.empty()) throw ValidationError(path.string() + ": no atoms");

  std::vector<std::vector<double>> dist;
  const std::filesystem::path side = classdist_sidecar(path);
  if (std::filesystem::exists(side)) {
    std::ifstream sin = open_in(side);
    Reader sr(sin, side.string());
    if (!sr.next(fields)) throw ValidationError(side.string() + ": empty file");
    expect_header(sr, fields, {"atom"});
    const std::size_t m = numbered_columns(sr, fields, 1, 'p', 1);
    while (sr.next(fields)) {
      if (fields.size() != m + 1) sr.fail("expected " + std::to_string(m + 1) + " fields");
      if (sr.integer(fields[0]) != static_cast<std::int64_t>(dist.size())) sr.fail("atoms must be numbered 0..K-1 in order");
      std::vector<double> p(m);
      for (std::size_t c = 0; c < m; ++c) p[c] = sr.number(fields[c + 1]);
      dist.push_back(std::move(p));
    }
  }
  return Dictionary(Matrix::from_columns(columns), std::move(dist));
}

void write_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  std::ofstream out = open_out(path);
  out << "atom";
  for (std::size_t i = 0; i < dict.dim(); ++i) out << ",f" << i;
  out << '\n';
  for (std::size_t a = 0; a < dict.size(); ++a) {
    out << a;
    for (double v : dict.atom(a)) out << ',' << format_number(v);
    out << '\n';
  }
  const std::filesystem::path side = classdist_sidecar(path);
  if (dict.has_class_dist()) {
    std::ofstream sout = open_out(side);
    sout << "atom";
    for (std::size_t c = 0; c < dict.class_dist().front().size(); ++c) sout << ",p" << c + 1;
    sout << '\n';
    for (std::size_t a = 0; a < dict.size(); ++a) {
      sout << a;
      for (double v : dict.class_dist()[a]) sout << ',' << format_number(v);
      sout << '\n';
    }
  } else if (std::filesystem::exists(side)) {
    std::filesystem::remove(side);  // stale sidecar from an earlier run
  }
}

void write_codes(const std::filesystem::path& path, const SparseCodeTable& codes, const FeatureDataset& dataset,
                 const FlatSignals& flat) {
  std::ofstream out = open_out(path);
  out << "seq,frame,atom,value\n";
  for (std::size_t j = 0; j < codes.num_signals(); ++j) {
    const Sequence& s = dataset.sequences()[flat.index[j].sequence];
    for (const CodeEntry& e : codes.signal(j))
      out << s.id << ',' << s.frame_ids[flat.index[j].position] << ',' << e.atom << ','
          << format_number(e.value) << '\n';
  }
}

SparseCodeTable read_codes(const std::filesystem::path& path, const FeatureDataset& dataset, const FlatSignals& flat,
                           std::size_t atoms) {
  std::map<std::pair<std::string, std::int64_t>, std::size_t> signal_of;
  for (std::size_t j = 0; j < flat.index.size(); ++j) {
    const Sequence& s = dataset.sequences()[flat.index[j].sequence];
    signal_of[{s.id, s.frame_ids[flat.index[j].position]}] = j;
  }
  std::ifstream in = open_in(path);
  Reader r(in, path.string());
  std::vector<std::string_view> fields;
  if (!r.next(fields)) throw ValidationError(path.string() + ": empty file");
  expect_header(r, fields, {"seq", "frame", "atom", "value"});
  std::vector<std::vector<CodeEntry>> per_signal(flat.index.size());
  std::size_t sparsity = 0;
  while (r.next(fields)) {
    if (fields.size() != 4) r.fail("expected 4 fields");
    const auto it = signal_of.find({std::string(fields[0]), r.integer(fields[1])});
    if (it == signal_of.end()) r.fail("code refers to an unknown (seq, frame)");
    const std::int64_t atom = r.integer(fields[2]);
    if (atom < 0 || static_cast<std::size_t>(atom) >= atoms) r.fail("atom index out of range");
    auto& code = per_signal[it->second];
    for (const CodeEntry& e : code)
      if (e.atom == static_cast<std::size_t>(atom)) r.fail("duplicate atom within one signal");
    code.push_back({static_cast<std::size_t>(atom), r.number(fields[3])});
    sparsity = std::max(sparsity, code.size());
  }
  SparseCodeTable table(atoms, flat.index.size(), std::max<std::size_t>(sparsity, 1));
  for (std::size_t j = 0; j < per_signal.size(); ++j) table.set_signal(j, std::move(per_signal[j]));
  return table;
}

void write_error_history(const std::filesystem::path& path, const std::vector<double>& history) {
  std::ofstream out = open_out(path);
  out << "iteration,rmse\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i + 1 << ',' << format_number(history[i]) << '\n';
}

void write_trace(const std::filesystem::path& path, const SelectionTrace& trace, bool with_timing) {
  std::ofstream out = open_out(path);
  out << "step,atom,objective,seconds\n";
  for (std::size_t s = 0; s < trace.atoms.size(); ++s)
    out << s + 1 << ',' << trace.atoms[s] << ',' << format_number(trace.objective[s]) << ','
        << format_number(with_timing ? trace.seconds[s] : 0.0) << '\n';
}

void write_merge_trace(const std::filesystem::path& path, const std::vector<MergeStep>& merges, bool with_timing) {
  std::ofstream out = open_out(path);
  out << "step,atom,objective,seconds\n";
  for (std::size_t s = 0; s < merges.size(); ++s)
    out << s + 1 << ',' << merges[s].absorbed << ',' << format_number(merges[s].loss) << ','
        << format_number(with_timing ? merges[s].seconds : 0.0) << '\n';
}

void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream out = open_out(path);
  out << "bin_low,bin_high,frequency\n";
  for (std::size_t b = 0; b < Histogram::kBins; ++b)
    out << format_number(h.bin_low(b)) << ',' << format_number(h.bin_high(b)) << ','
        << format_number(h.frequency[b]) << '\n';
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
  std::ofstream out = open_out(path);
  out << "seq,true_label,predicted_label,distance\n";
  for (const Prediction& p : predictions) {
    out << p.id << ',';
    if (p.truth) out << *p.truth;
    out << ',' << p.predicted << ',' << format_number(p.distance) << '\n';
  }
}

void write_summaries(const std::filesystem::path& path, const std::vector<Summary>& summaries,
                     const FeatureDataset& dataset) {
  std::unordered_map<std::string, const Sequence*> by_id;
  for (const Sequence& s : dataset.sequences()) by_id[s.id] = &s;
  std::ofstream out = open_out(path);
  out << "seq,rank,frame,diversity_term,coverage_term\n";
  for (const Summary& sum : summaries) {
    const Sequence* s = by_id.at(sum.sequence_id);
    for (const SummaryStep& step : sum.steps)
      out << sum.sequence_id << ',' << step.rank << ',' << s->frame_ids[step.frame] << ','
          << format_number(step.diversity_term) << ',' << format_number(step.coverage_term) << '\n';
  }
}

void write_kernel(const std::filesystem::path& path, const KernelMatrix& kern) {
  std::ofstream out = open_out(path);
  out << "i,j,value\n";
  for (std::size_t i = 0; i < kern.size(); ++i)
    for (std::size_t j : kern.support_row(i)) out << i << ',' << j << ',' << format_number(kern(i, j)) << '\n';
}

}  // namespace mmidict::io
