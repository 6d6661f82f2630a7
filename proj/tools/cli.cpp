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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "mmidict/csv_io.hpp"
#include "mmidict/error.hpp"
#include "mmidict/gp.hpp"
#include "mmidict/labeldist.hpp"
#include "mmidict/parallel.hpp"
#include "mmidict/pursuit.hpp"
#include "mmidict/recognize.hpp"
#include "mmidict/select.hpp"
#include "mmidict/summarize.hpp"
#include "mmidict/synth.hpp"

namespace mmidict::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kConfigSuffix = ".run.json";

// out/dict.csv + ".codes.csv" -> out/dict.codes.csv
fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension();
  p += suffix;
  return p;
}

std::string fmt(double v) { return io::format_number(v); }

// ---------------------------------------------------------------------------
// Run configuration: the effective options of the command, written as JSON
// next to the outputs. `--config FILE` replays it.

json effective_options(const CLI::App& sub) {
  json opts = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name.empty()) continue;
    if (opt->get_expected_min() == 0) {
      opts[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() > 1)
        opts[name] = res;
      else
        opts[name] = res.back();
    } else if (!opt->get_default_str().empty()) {
      if (opt->get_expected_max() > 1) {
        std::vector<std::string> parts;
        std::string d = opt->get_default_str();
        if (d.size() >= 2 && (d.front() == '[' || d.front() == '{')) d = d.substr(1, d.size() - 2);
        std::stringstream ss(d);
        for (std::string item; std::getline(ss, item, ',');)
          if (!item.empty()) parts.push_back(item);
        if (!parts.empty()) opts[name] = parts;
      } else {
        opts[name] = opt->get_default_str();
      }
    }
  }
  return opts;
}

void write_run_config(const CLI::App& sub, const fs::path& primary_output) {
  json cfg;
  cfg["command"] = sub.get_name();
  cfg["options"] = effective_options(sub);
  const fs::path path = sibling(primary_output, kConfigSuffix);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << cfg.dump(2) << '\n';
}

// Rewrites `[sub] --config FILE [more]` into the command line the file
// describes.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  const auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config needs a file name");
  const fs::path path = *(it + 1);
  args.erase(it, it + 2);

  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed config '" + path.string() + "': " + e.what());
  }
  if (!cfg.contains("command") || !cfg["command"].is_string() || !cfg.contains("options") ||
      !cfg["options"].is_object())
    throw ValidationError("config '" + path.string() + "' lacks command/options");
  const std::string command = cfg["command"];

  static const std::set<std::string> kCommands = {"train", "select", "encode", "classify",
                                                  "summarize", "eval", "gen"};
  const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return kCommands.count(a) > 0; });
  std::vector<std::string> out;
  if (sub == args.end()) {
    out = args;
    out.push_back(command);
  } else {
    if (*sub != command) throw ValidationError("config is for '" + command + "', not '" + *sub + "'");
    out = args;
  }
  for (const auto& [key, value] : cfg["options"].items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + key);
    } else if (value.is_array()) {
      out.push_back("--" + key);
      for (const auto& v : value) out.push_back(v.get<std::string>());
    } else if (value.is_string()) {
      out.push_back("--" + key);
      out.push_back(value.get<std::string>());
    } else {
      throw ValidationError("config option '" + key + "' must be a string, list or flag");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers

struct Inputs {
  FeatureDataset dataset;
  FlatSignals flat;
};

Inputs load_features(const fs::path& path) {
  Inputs in{io::read_feature_table(path), {}};
  in.flat = flatten(in.dataset);
  return in;
}

void require_dim(const Dictionary& dict, const FeatureDataset& dataset, const std::string& what) {
  if (dict.dim() != dataset.dim())
    throw ValidationError("dictionary dimension " + std::to_string(dict.dim()) + " does not match " + what +
                          " dimension " + std::to_string(dataset.dim()));
}

std::vector<ClassDistribution> class_dists_from(const SparseCodeTable& codes, const Inputs& in, Aggregation agg) {
  in.dataset.require_class_coverage();
  return atom_class_dist(codes, in.flat.labels, in.dataset.num_classes(), agg);
}

std::size_t default_sparsity(std::optional<std::size_t> given, const Dictionary& dict) {
  if (given) return *given;
  return std::min<std::size_t>({10, dict.size(), dict.dim()});
}

// ---------------------------------------------------------------------------
// Commands

struct TrainArgs {
  std::string features, out, codes, history, kernel_dump, agg = "abs";
  std::size_t atoms = 0, sparsity = 0, iters = 20;
  double min_improvement = 1e-6, tau = kDefaultSupportThreshold, jitter = kDefaultJitter;
  std::uint64_t seed = 0;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  const Aggregation agg = parse_aggregation(a.agg);
  const Inputs in = load_features(a.features);
  const std::size_t n = in.flat.signals.rows(), total = in.flat.signals.cols();
  if (a.atoms == 0) throw ValidationError("--atoms must be >= 1");
  if (a.atoms > total) throw ValidationError("over-complete beyond sample count");
  if (a.sparsity == 0 || a.sparsity > std::min(a.atoms, n)) throw ValidationError("--sparsity must be in [1, min(K, n)]");
  if (in.dataset.labeled()) in.dataset.require_class_coverage();

  KsvdOptions opts;
  opts.atoms = a.atoms;
  opts.sparsity = a.sparsity;
  opts.iterations = a.iters;
  opts.min_improvement = a.min_improvement;
  opts.seed = a.seed;
  KsvdResult res = ksvd_train(in.flat.signals, opts);
  Dictionary dict = res.dictionary;
  if (in.dataset.labeled()) dict = dict.with_class_dist(class_dists_from(res.codes, in, agg));

  io::write_dictionary(a.out, dict);
  io::write_codes(a.codes.empty() ? sibling(a.out, ".codes.csv") : fs::path(a.codes), res.codes, in.dataset, in.flat);
  io::write_error_history(a.history.empty() ? sibling(a.out, ".history.csv") : fs::path(a.history),
                          res.error_history);
  if (!a.kernel_dump.empty()) io::write_kernel(a.kernel_dump, kernel_from_codes(res.codes, a.tau, a.jitter));
  out << "atoms " << dict.size() << "\niterations " << res.error_history.size() << "\nrmse "
      << fmt(res.error_history.back()) << '\n';
}

struct SelectArgs {
  std::string dict, codes, features, method, out, trace, agg = "abs", prior = "mass", kernel_dump;
  std::size_t k = 0;
  std::optional<double> lambda;
  double tau = kDefaultSupportThreshold, jitter = kDefaultJitter;
  bool dense = false, timing = false;
  std::uint64_t seed = 0;
};

void cmd_select(const SelectArgs& a, std::ostream& out) {
  static const std::set<std::string> kMethods = {"me", "mmi1", "mmi2", "mmi3", "kmeans"};
  if (!kMethods.count(a.method)) throw ValidationError("unknown method '" + a.method + "'");
  const Aggregation agg = parse_aggregation(a.agg);
  const PriorMode prior_mode = parse_prior_mode(a.prior);
  if (a.lambda && !(*a.lambda >= 0.0)) throw ValidationError("--lambda must be >= 0");

  const Dictionary dict = io::read_dictionary(a.dict);
  const Inputs in = load_features(a.features);
  require_dim(dict, in.dataset, "feature");
  const SparseCodeTable codes = io::read_codes(a.codes, in.dataset, in.flat, dict.size());
  const std::size_t total = dict.size();
  const bool needs_labels = a.method == "mmi2" || a.method == "mmi3";

  if (a.method == "me" || a.method == "kmeans") {
    if (a.k == 0 || a.k > total) throw ValidationError("--k must be in [1, K]");
  } else if (a.method == "mmi3") {
    if (a.k < 2 || a.k >= total) throw ValidationError("--k must be in [2, K-1] for mmi3");
  } else if (a.k == 0 || a.k >= total) {
    throw ValidationError("--k must be in [1, K-1]: remaining set empty");
  }

  std::vector<ClassDistribution> dists;
  if (in.dataset.labeled())
    dists = class_dists_from(codes, in, agg);
  else if (dict.has_class_dist())
    dists = dict.class_dist();
  else if (needs_labels)
    throw ValidationError("method '" + a.method + "' needs labeled features or a class distribution sidecar");
  const Dictionary base = dists.empty() ? dict : dict.with_class_dist(dists);
  const Evaluation eval = a.dense ? Evaluation::kDense : Evaluation::kSparse;
  const fs::path trace_path = a.trace.empty() ? sibling(a.out, ".trace.csv") : fs::path(a.trace);

  Dictionary result;
  if (a.method == "mmi3") {
    const Mmi3Result r = select_mmi3(base, dists, atom_prior(codes, prior_mode), a.k);
    result = r.dictionary;
    io::write_merge_trace(trace_path, r.merges, a.timing);
  } else if (a.method == "kmeans") {
    result = select_kmeans(dict, a.k, a.seed);
    if (in.dataset.labeled()) {
      // Centroids carry no class mass of their own; re-code the training
      // signals against them to obtain it.
      const std::size_t t = std::min({codes.sparsity(), result.size(), result.dim()});
      const SparseCodeTable recoded = omp_encode(result, in.flat.signals, std::max<std::size_t>(t, 1));
      result = result.with_class_dist(class_dists_from(recoded, in, agg));
    }
  } else {
    const KernelMatrix kern = kernel_from_codes(codes, a.tau, a.jitter);
    if (!a.kernel_dump.empty()) io::write_kernel(a.kernel_dump, kern);
    SelectionTrace trace;
    if (a.method == "me")
      trace = select_me(kern, a.k, eval);
    else if (a.method == "mmi1")
      trace = select_mmi1(kern, a.k, eval);
    else
      trace = select_mmi2(kern, dists, a.k, a.lambda, eval);
    result = subset_dictionary(base, trace.atoms);
    io::write_trace(trace_path, trace, a.timing);
    if (trace.lambda) out << "lambda " << fmt(*trace.lambda) << '\n';
  }
  io::write_dictionary(a.out, result);
  out << "method " << a.method << "\natoms " << result.size() << '\n';
}

struct EncodeArgs {
  std::string dict, features, out;
  std::optional<std::size_t> sparsity;
};

void cmd_encode(const EncodeArgs& a, std::ostream& out) {
  const Dictionary dict = io::read_dictionary(a.dict);
  const Inputs in = load_features(a.features);
  require_dim(dict, in.dataset, "feature");
  const SparseCodeTable codes = omp_encode(dict, in.flat.signals, default_sparsity(a.sparsity, dict));
  io::write_codes(a.out, codes, in.dataset, in.flat);
  out << "signals " << codes.num_signals() << '\n';
}

struct ClassifyArgs {
  std::string dict, train, test, out, scheme = "dtw";
  bool leave_group_out = false, dtw_abs = false;
  std::size_t knn = 1;
  std::optional<std::size_t> sparsity;
};

void cmd_classify(const ClassifyArgs& a, std::ostream& out) {
  const Scheme scheme = parse_scheme(a.scheme);
  if (a.knn == 0) throw ValidationError("--knn must be >= 1");
  if (a.test.empty() == !a.leave_group_out)
    throw ValidationError("give exactly one of --test or --leave-group-out");
  const Dictionary dict = io::read_dictionary(a.dict);
  const FeatureDataset train = io::read_feature_table(a.train);
  require_dim(dict, train, "training");
  if (!train.labeled()) throw ValidationError("training features must be labeled");
  std::optional<FeatureDataset> test;
  if (!a.test.empty()) {
    test = io::read_feature_table(a.test);
    require_dim(dict, *test, "test");
  } else {
    for (const Sequence& s : train.sequences())
      if (s.group.empty()) throw ValidationError("sequence '" + s.id + "' has no group for --leave-group-out");
  }
  const std::size_t t = default_sparsity(a.sparsity, dict);
  const std::vector<CodeSequence> train_codes = encode_sequences(dict, train, t);

  std::vector<Prediction> predictions;
  if (test) {
    const std::vector<CodeSequence> test_codes = encode_sequences(dict, *test, t);
    predictions = classify_sequences(train_codes, test_codes, scheme, a.knn, a.dtw_abs);
  } else {
    std::vector<std::string> groups;
    for (const CodeSequence& c : train_codes)
      if (std::find(groups.begin(), groups.end(), c.group) == groups.end()) groups.push_back(c.group);
    if (groups.size() < 2) throw ValidationError("--leave-group-out needs at least two groups");
    predictions.resize(train_codes.size());
    for (const std::string& g : groups) {
      std::vector<CodeSequence> fit, held;
      std::vector<std::size_t> where;
      for (std::size_t i = 0; i < train_codes.size(); ++i) {
        if (train_codes[i].group == g) {
          held.push_back(train_codes[i]);
          where.push_back(i);
        } else {
          fit.push_back(train_codes[i]);
        }
      }
      const std::vector<Prediction> p = classify_sequences(fit, held, scheme, a.knn, a.dtw_abs);
      for (std::size_t i = 0; i < p.size(); ++i) predictions[where[i]] = p[i];
    }
  }
  io::write_predictions(a.out, predictions);
  out << "sequences " << predictions.size() << '\n';
  const bool scored = std::all_of(predictions.begin(), predictions.end(), [](const Prediction& p) { return p.truth.has_value(); });
  if (scored) out << "accuracy " << fmt(accuracy(predictions)) << '\n';
}

struct SummarizeArgs {
  std::string features, out, report;
  std::size_t k = 10;
  std::vector<std::size_t> block_sizes;
  bool no_normalize = false, dense = false;
  double tau = kDefaultSupportThreshold, jitter = kDefaultJitter;
};

void cmd_summarize(const SummarizeArgs& a, std::ostream& out) {
  const FeatureDataset dataset = io::read_feature_table(a.features);
  if (!a.block_sizes.empty()) {
    std::size_t sum = 0;
    for (std::size_t b : a.block_sizes) sum += b;
    if (sum != dataset.dim()) throw ValidationError("--block-sizes must add up to the feature dimension");
  }
  for (const Sequence& s : dataset.sequences())
    if (a.k == 0 || a.k >= s.frames.rows())
      throw ValidationError("--k " + std::to_string(a.k) + " must be in [1, frames-1] for sequence '" + s.id + "' (" +
                            std::to_string(s.frames.rows()) + " frames)");

  SummarizeOptions opts;
  opts.normalize_frames = !a.no_normalize;
  opts.eval = a.dense ? Evaluation::kDense : Evaluation::kSparse;
  opts.threshold = a.tau;
  opts.jitter = a.jitter;

  const auto& seqs = dataset.sequences();
  std::vector<Summary> summaries(seqs.size());
  std::vector<SummaryReport> reports(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    Matrix frames = seqs[i].frames.transposed();
    if (!a.block_sizes.empty()) frames = normalize_feature_blocks(frames, a.block_sizes);
    summaries[i] = summarize_sequence(frames, a.k, opts);
    summaries[i].sequence_id = seqs[i].id;
    reports[i] = coverage_diversity_report(summaries[i], frames);
  }
  io::write_summaries(a.out, summaries, dataset);

  const fs::path report_path = a.report.empty() ? sibling(a.out, ".report.csv") : fs::path(a.report);
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  std::ofstream rep(report_path, std::ios::binary);
  if (!rep) throw Error("cannot write '" + report_path.string() + "'");
  rep << "seq,diversity,coverage\n";
  for (std::size_t i = 0; i < seqs.size(); ++i)
    rep << seqs[i].id << ',' << fmt(reports[i].diversity) << ',' << fmt(reports[i].coverage) << '\n';
  out << "sequences " << seqs.size() << '\n';
}

struct EvalArgs {
  std::string dict, codes, features, purity, compactness, agg = "abs";
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Aggregation agg = parse_aggregation(a.agg);
  if (a.codes.empty() != a.features.empty()) throw ValidationError("--codes and --features go together");
  const Dictionary dict = io::read_dictionary(a.dict);
  std::vector<ClassDistribution> dists;
  if (!a.codes.empty()) {
    const Inputs in = load_features(a.features);
    require_dim(dict, in.dataset, "feature");
    if (!in.dataset.labeled()) throw ValidationError("purity needs labeled features");
    dists = class_dists_from(io::read_codes(a.codes, in.dataset, in.flat, dict.size()), in, agg);
  } else if (dict.has_class_dist()) {
    dists = dict.class_dist();
  } else {
    throw ValidationError("purity needs --codes/--features or a class distribution sidecar");
  }
  const Histogram purity = purity_histogram(dists);
  const Histogram compact = compactness_histogram(dict);
  const fs::path purity_path = a.purity.empty() ? sibling(a.dict, ".purity.csv") : fs::path(a.purity);
  io::write_histogram(purity_path, purity);
  io::write_histogram(a.compactness.empty() ? sibling(a.dict, ".compactness.csv") : fs::path(a.compactness), compact);
  out << "purity_mass_0.6 " << fmt(purity.mass_from(0.6)) << "\ncompactness_mass_0.8 " << fmt(compact.mass_from(0.8))
      << '\n';
}

struct GenArgs {
  std::string kind, out;
  std::uint64_t seed = 0;
  std::optional<std::size_t> dim, count, atoms, sparsity, frames, classes, actors, clusters, per_cluster;
  std::optional<double> noise;
};

void cmd_gen(const GenArgs& a, std::ostream& out) {
  Rng rng(a.seed);
  std::vector<Sequence> seqs;
  auto frames_to_sequences = [&](const Matrix& signals, std::size_t per_seq, const std::string& prefix) {
    for (std::size_t start = 0, s = 0; start < signals.cols(); start += per_seq, ++s) {
      const std::size_t len = std::min(per_seq, signals.cols() - start);
      Sequence seq;
      seq.id = prefix + std::to_string(s);
      seq.frames = Matrix(len, signals.rows());
      for (std::size_t f = 0; f < len; ++f) {
        seq.frame_ids.push_back(static_cast<std::int64_t>(f));
        for (std::size_t i = 0; i < signals.rows(); ++i) seq.frames(f, i) = signals(i, start + f);
      }
      seqs.push_back(std::move(seq));
    }
  };

  FeatureDataset dataset;
  if (a.kind == "sparse") {
    const Dictionary truth = synth::random_dictionary(a.dim.value_or(32), a.atoms.value_or(64), rng);
    const synth::SparseSignals s = synth::sparse_signals(truth, a.count.value_or(500), a.sparsity.value_or(4), rng);
    const std::size_t per = a.frames.value_or(10);
    if (per == 0) throw ValidationError("--frames must be >= 1");
    frames_to_sequences(s.signals, per, "s");
    dataset = FeatureDataset(std::move(seqs));
  } else if (a.kind == "clusters") {
    const std::size_t count = a.count.value_or(1);
    for (std::size_t c = 0; c < count; ++c) {
      const synth::PlantedClusters pc = synth::planted_clusters(
          a.dim.value_or(128), a.clusters.value_or(10), a.per_cluster.value_or(10), a.noise.value_or(0.05), rng);
      frames_to_sequences(pc.frames, pc.frames.cols(), "clip" + std::to_string(c) + "_");
    }
    dataset = FeatureDataset(std::move(seqs));
  } else if (a.kind == "mixture") {
    synth::MixtureOptions o;
    o.classes = a.classes.value_or(o.classes);
    o.dim = a.dim.value_or(o.dim);
    o.sequences_per_class = a.count.value_or(o.sequences_per_class);
    o.frames_per_sequence = a.frames.value_or(o.frames_per_sequence);
    o.noise = a.noise.value_or(o.noise);
    dataset = synth::labeled_mixture(o, rng);
  } else if (a.kind == "actions") {
    synth::ActionOptions o;
    o.classes = a.classes.value_or(o.classes);
    o.actors = a.actors.value_or(o.actors);
    o.dim = a.dim.value_or(o.dim);
    o.frames_per_phase = a.frames.value_or(o.frames_per_phase);
    o.noise = a.noise.value_or(o.noise);
    dataset = synth::action_sequences(o, rng);
  } else {
    throw ValidationError("unknown --kind '" + a.kind + "'");
  }
  io::write_feature_table(a.out, dataset);
  out << "sequences " << dataset.sequences().size() << "\nframes " << dataset.num_frames() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse attribute dictionaries by information maximization", "mmidict"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all cores)")
      ->envname("MMIDICT_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto config_flag = [](CLI::App* sub) {
    sub->add_option("--config", "Replay a written run configuration")->capture_default_str();
  };

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "Learn an over-complete dictionary with K-SVD");
  train->add_option("--features", ta.features, "Feature table")->required();
  train->add_option("--atoms", ta.atoms, "Dictionary size K")->required();
  train->add_option("--sparsity", ta.sparsity, "Atoms per signal T")->required();
  train->add_option("--iters", ta.iters, "K-SVD iterations")->check(CLI::PositiveNumber);
  train->add_option("--min-improvement", ta.min_improvement, "Early-stop RMSE improvement (negative disables)");
  train->add_option("--seed", ta.seed, "Random seed");
  train->add_option("--agg", ta.agg, "Class mass aggregation: abs|signed|count");
  train->add_option("--out", ta.out, "Dictionary CSV")->required();
  train->add_option("--codes", ta.codes, "Codes CSV (default <out>.codes.csv)");
  train->add_option("--history", ta.history, "Error history CSV (default <out>.history.csv)");
  train->add_option("--kernel-dump", ta.kernel_dump, "Write the atom kernel as i,j,value");
  train->add_option("--tau", ta.tau, "Kernel support threshold");
  train->add_option("--jitter", ta.jitter, "Kernel diagonal jitter");
  config_flag(train);

  SelectArgs sa;
  CLI::App* select = app.add_subcommand("select", "Compress a dictionary");
  select->add_option("--dict", sa.dict, "Initial dictionary CSV")->required();
  select->add_option("--codes", sa.codes, "Codes of the training signals")->required();
  select->add_option("--features", sa.features, "Training features (labels, signal order)")->required();
  select->add_option("--method", sa.method, "me|mmi1|mmi2|mmi3|kmeans")->required();
  select->add_option("--k", sa.k, "Target size")->required();
  select->add_option("--lambda", sa.lambda, "MMI-2 trade-off (estimated when omitted)");
  select->add_option("--agg", sa.agg, "Class mass aggregation: abs|signed|count");
  select->add_option("--prior", sa.prior, "MMI-3 atom prior: mass|uniform");
  select->add_option("--tau", sa.tau, "Kernel support threshold");
  select->add_option("--jitter", sa.jitter, "Kernel diagonal jitter");
  select->add_flag("--dense", sa.dense, "Evaluate conditional variances densely");
  select->add_option("--seed", sa.seed, "k-means seed");
  select->add_option("--out", sa.out, "Selected dictionary CSV")->required();
  select->add_option("--trace", sa.trace, "Trace CSV (default <out>.trace.csv)");
  select->add_flag("--timing", sa.timing, "Record wall-clock seconds in the trace");
  select->add_option("--kernel-dump", sa.kernel_dump, "Write the atom kernel as i,j,value");
  config_flag(select);

  EncodeArgs ea;
  CLI::App* encode = app.add_subcommand("encode", "Sparse-code features over a dictionary");
  encode->add_option("--dict", ea.dict, "Dictionary CSV")->required();
  encode->add_option("--features", ea.features, "Feature table")->required();
  encode->add_option("--sparsity", ea.sparsity, "Atoms per frame (default min(10, K, n))");
  encode->add_option("--out", ea.out, "Codes CSV")->required();
  config_flag(encode);

  ClassifyArgs ca;
  CLI::App* classify = app.add_subcommand("classify", "k-NN recognition of sequences");
  classify->add_option("--dict", ca.dict, "Dictionary CSV")->required();
  classify->add_option("--train", ca.train, "Labeled training features")->required();
  classify->add_option("--test", ca.test, "Test features");
  classify->add_flag("--leave-group-out", ca.leave_group_out, "Hold out each group of --train in turn");
  classify->add_option("--scheme", ca.scheme, "dtw|hist");
  classify->add_option("--knn", ca.knn, "Neighbours");
  classify->add_option("--sparsity", ca.sparsity, "Atoms per frame (default min(10, K, n))");
  classify->add_flag("--dtw-abs", ca.dtw_abs, "Compare absolute codes in DTW");
  classify->add_option("--out", ca.out, "Predictions CSV")->required();
  config_flag(classify);

  SummarizeArgs ua;
  CLI::App* summarize = app.add_subcommand("summarize", "Pick representative frames per sequence");
  summarize->add_option("--features", ua.features, "Feature table")->required();
  summarize->add_option("--k", ua.k, "Frames per summary");
  summarize->add_option("--block-sizes", ua.block_sizes, "Normalize these consecutive feature blocks separately");
  summarize->add_flag("--no-normalize", ua.no_normalize, "Keep raw frame vectors");
  summarize->add_flag("--dense", ua.dense, "Evaluate conditional variances densely");
  summarize->add_option("--tau", ua.tau, "Kernel support threshold");
  summarize->add_option("--jitter", ua.jitter, "Kernel diagonal jitter");
  summarize->add_option("--out", ua.out, "Summary CSV")->required();
  summarize->add_option("--report", ua.report, "Diversity/coverage CSV (default <out>.report.csv)");
  config_flag(summarize);

  EvalArgs va;
  CLI::App* eval = app.add_subcommand("eval", "Purity and compactness histograms");
  eval->add_option("--dict", va.dict, "Dictionary CSV")->required();
  eval->add_option("--codes", va.codes, "Codes over this dictionary");
  eval->add_option("--features", va.features, "Labeled features matching --codes");
  eval->add_option("--agg", va.agg, "Class mass aggregation: abs|signed|count");
  eval->add_option("--purity", va.purity, "Purity histogram CSV (default <dict>.purity.csv)");
  eval->add_option("--compactness", va.compactness, "Compactness histogram CSV (default <dict>.compactness.csv)");
  config_flag(eval);

  GenArgs ga;
  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic feature table");
  gen->add_option("--kind", ga.kind, "sparse|clusters|mixture|actions")->required();
  gen->add_option("--seed", ga.seed, "Random seed");
  gen->add_option("--dim", ga.dim, "Feature dimension");
  gen->add_option("--count", ga.count, "Signals (sparse), clips (clusters) or sequences per class (mixture)");
  gen->add_option("--atoms", ga.atoms, "Generating dictionary size (sparse)");
  gen->add_option("--sparsity", ga.sparsity, "Atoms per signal (sparse)");
  gen->add_option("--frames", ga.frames, "Frames per sequence, or per phase (actions)");
  gen->add_option("--classes", ga.classes, "Classes (mixture, actions)");
  gen->add_option("--actors", ga.actors, "Actors (actions)");
  gen->add_option("--clusters", ga.clusters, "Clusters per clip (clusters)");
  gen->add_option("--per-cluster", ga.per_cluster, "Frames per cluster (clusters)");
  gen->add_option("--noise", ga.noise, "Noise level");
  gen->add_option("--out", ga.out, "Feature table CSV")->required();
  config_flag(gen);

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<const char*> argv{"mmidict"};
    for (const std::string& s : args) argv.push_back(s.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
    // CLI11 does not run validators on environment values.
    if (app.get_option("--threads")->count() == 0 && std::getenv("MMIDICT_THREADS") != nullptr && threads == 0)
      throw ValidationError("MMIDICT_THREADS must be a positive integer");
    if (threads > 0) set_thread_count(threads);

    if (train->parsed()) {
      cmd_train(ta, out);
      write_run_config(*train, ta.out);
    } else if (select->parsed()) {
      cmd_select(sa, out);
      write_run_config(*select, sa.out);
    } else if (encode->parsed()) {
      cmd_encode(ea, out);
      write_run_config(*encode, ea.out);
    } else if (classify->parsed()) {
      cmd_classify(ca, out);
      write_run_config(*classify, ca.out);
    } else if (summarize->parsed()) {
      cmd_summarize(ua, out);
      write_run_config(*summarize, ua.out);
    } else if (eval->parsed()) {
      cmd_eval(va, out);
      write_run_config(*eval, va.purity.empty() ? sibling(va.dict, ".purity.csv") : fs::path(va.purity));
    } else if (gen->parsed()) {
      cmd_gen(ga, out);
      write_run_config(*gen, ga.out);
    }
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mmidict::cli
