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

#include "mmidict/synth.hpp"

#include "mmidict/simd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mmidict::synth {
namespace {

std::vector<double> gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

std::vector<double> unit_vector(std::size_t n, Rng& rng) {
  std::vector<double> v = gaussian_vector(n, rng);
  const double len = norm2(v);
  for (double& x : v) x /= len;
  return v;
}

void add_scaled(std::vector<double>& y, double a, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// `count` distinct indices from [0, n), ascending.
std::vector<std::size_t> choose(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

Dictionary random_dictionary(std::size_t n, std::size_t atoms, Rng& rng) {
  std::vector<std::vector<double>> cols;
  cols.reserve(atoms);
  for (std::size_t k = 0; k < atoms; ++k) cols.push_back(unit_vector(n, rng));
  return Dictionary(Matrix::from_columns(cols));
}

Dictionary incoherent_dictionary(std::size_t n, std::size_t atoms, double max_coherence, Rng& rng,
                                 std::size_t max_iterations) {
  constexpr double kStep = 0.2;
  const double target = 0.9 * max_coherence;
  Matrix d = random_dictionary(n, atoms, rng).atom_rows();  // one atom per row
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Matrix grad(atoms, n);
    double mu = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
      for (std::size_t j = i + 1; j < atoms; ++j) {
        const double g = simd::dot(d.row(i).data(), d.row(j).data(), n);
        mu = std::max(mu, std::abs(g));
        const double excess = std::abs(g) - target;
        if (excess <= 0.0) continue;
        const double c = g > 0.0 ? excess : -excess;
        simd::axpy(c, d.row(j).data(), grad.row(i).data(), n);
        simd::axpy(c, d.row(i).data(), grad.row(j).data(), n);
      }
    }
    if (mu < max_coherence) {
      std::vector<std::vector<double>> cols;
      for (std::size_t i = 0; i < atoms; ++i) cols.emplace_back(d.row(i).begin(), d.row(i).end());
      return Dictionary(Matrix::from_columns(cols));
    }
    for (std::size_t i = 0; i < atoms; ++i) {
      auto row = d.row(i);
      simd::axpy(-kStep, grad.row(i).data(), row.data(), n);
      const double len = norm2(row);
      for (double& v : row) v /= len;
    }
  }
  throw Error("coherence bound not reached");
}

double mutual_coherence(const Dictionary& dict) {
  double mu = 0.0;
  for (std::size_t i = 0; i < dict.size(); ++i)
    for (std::size_t j = i + 1; j < dict.size(); ++j) mu = std::max(mu, std::abs(dot(dict.atom(i), dict.atom(j))));
  return mu;
}

SparseSignals sparse_signals(const Dictionary& dict, std::size_t count, std::size_t sparsity, Rng& rng,
                             CoefficientLaw law) {
  if (sparsity > dict.size()) throw ValidationError("sparsity exceeds dictionary size");
  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::bernoulli_distribution negative(0.5);
  std::normal_distribution<double> gaussian;
  SparseSignals out{Matrix(dict.dim(), count), {}};
  out.codes.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<CodeEntry> code;
    std::vector<double> y(dict.dim(), 0.0);
    for (std::size_t a : choose(dict.size(), sparsity, rng)) {
      const double v = law == CoefficientLaw::kGaussian ? gaussian(rng)
                                                        : magnitude(rng) * (negative(rng) ? -1.0 : 1.0);
      add_scaled(y, v, dict.atom(a));
      code.push_back({a, v});
    }
    out.signals.set_column(j, y);
    out.codes.push_back(std::move(code));
  }
  return out;
}

PlantedClusters planted_clusters(std::size_t n, std::size_t clusters, std::size_t per_cluster, double noise_ratio,
                                 Rng& rng) {
  std::vector<std::vector<double>> centres;
  for (std::size_t c = 0; c < clusters; ++c) centres.push_back(unit_vector(n, rng));
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < clusters; ++a)
    for (std::size_t b = a + 1; b < clusters; ++b)
      gap = std::min(gap, std::sqrt(simd::squared_distance(centres[a].data(), centres[b].data(), n)));
  if (clusters < 2) gap = 1.0;

  const std::size_t total = clusters * per_cluster;
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = total; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }

  PlantedClusters out{Matrix(n, total), std::vector<std::size_t>(total), gap};
  for (std::size_t slot = 0; slot < total; ++slot) {
    const std::size_t c = order[slot] / per_cluster;
    std::vector<double> frame = centres[c];
    add_scaled(frame, noise_ratio * gap, unit_vector(n, rng));
    out.frames.set_column(slot, frame);
    out.cluster[slot] = c;
  }
  return out;
}

FeatureDataset labeled_mixture(const MixtureOptions& o, Rng& rng) {
  if (o.prototypes_per_frame == 0 || o.prototypes_per_frame > o.class_atoms)
    throw ValidationError("prototypes per frame must be in [1, class atoms]");
  std::vector<std::vector<std::vector<double>>> protos(o.classes);
  for (auto& cls : protos)
    for (std::size_t a = 0; a < o.class_atoms; ++a) cls.push_back(unit_vector(o.dim, rng));
  std::vector<std::vector<double>> shared;
  for (std::size_t a = 0; a < o.shared_atoms; ++a) shared.push_back(unit_vector(o.dim, rng));

  std::uniform_real_distribution<double> weight(0.5, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal;
  std::vector<Sequence> seqs;
  for (std::size_t c = 0; c < o.classes; ++c) {
    for (std::size_t s = 0; s < o.sequences_per_class; ++s) {
      Sequence seq;
      seq.id = "c" + std::to_string(c + 1) + "_s" + std::to_string(s);
      seq.label = static_cast<int>(c + 1);
      seq.frames = Matrix(o.frames_per_sequence, o.dim);
      for (std::size_t f = 0; f < o.frames_per_sequence; ++f) {
        seq.frame_ids.push_back(static_cast<std::int64_t>(f));
        std::vector<double> y(o.dim, 0.0);
        for (std::size_t a : choose(o.class_atoms, o.prototypes_per_frame, rng)) add_scaled(y, weight(rng), protos[c][a]);
        // Background directions switch on independently of class and of each other.
        for (const auto& d : shared)
          if (coin(rng)) add_scaled(y, o.shared_weight * weight(rng), d);
        for (double& v : y) v += o.noise * normal(rng);
        std::copy(y.begin(), y.end(), seq.frames.row(f).begin());
      }
      seqs.push_back(std::move(seq));
    }
  }
  return FeatureDataset(std::move(seqs));
}

FeatureDataset action_sequences(const ActionOptions& o, Rng& rng) {
  if (o.phases > o.primitives) throw ValidationError("more phases than primitives");
  std::vector<std::vector<double>> primitives;
  for (std::size_t p = 0; p < o.primitives; ++p) primitives.push_back(unit_vector(o.dim, rng));

  // Each class visits its own random ordered selection of primitives.
  std::vector<std::vector<std::size_t>> scripts(o.classes);
  for (auto& script : scripts) {
    script = choose(o.primitives, o.phases, rng);
    for (std::size_t i = script.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(script[i - 1], script[pick(rng)]);
    }
  }

  std::normal_distribution<double> normal;
  const std::size_t base = std::max<std::size_t>(o.frames_per_phase, 2);
  std::uniform_int_distribution<long> tempo(-static_cast<long>(base / 3), static_cast<long>(base / 3));
  std::vector<Sequence> seqs;
  for (std::size_t actor = 0; actor < o.actors; ++actor) {
    // Personal style: a fixed offset applied to every primitive.
    std::vector<std::vector<double>> styled = primitives;
    for (auto& p : styled) {
      add_scaled(p, o.actor_jitter, unit_vector(o.dim, rng));
      const double len = norm2(p);
      for (double& v : p) v /= len;
    }
    for (std::size_t c = 0; c < o.classes; ++c) {
      Sequence seq;
      seq.id = "actor" + std::to_string(actor) + "_class" + std::to_string(c + 1);
      seq.label = static_cast<int>(c + 1);
      seq.group = "actor" + std::to_string(actor);
      std::vector<double> values;
      std::int64_t frame = 0;
      const auto& script = scripts[c];
      for (std::size_t ph = 0; ph < script.size(); ++ph) {
        const std::size_t len = static_cast<std::size_t>(static_cast<long>(base) + tempo(rng));
        const auto& from = styled[script[ph]];
        const auto& to = styled[script[(ph + 1) % script.size()]];
        for (std::size_t f = 0; f < len; ++f) {
          // Hold the pose, then blend towards the next one.
          const double t = std::max(0.0, (static_cast<double>(f) + 1.0) / static_cast<double>(len) - 0.5);
          std::vector<double> y(o.dim);
          for (std::size_t i = 0; i < o.dim; ++i) y[i] = (1.0 - t) * from[i] + t * to[i] + o.noise * normal(rng);
          values.insert(values.end(), y.begin(), y.end());
          seq.frame_ids.push_back(frame++);
        }
      }
      seq.frames = Matrix(seq.frame_ids.size(), o.dim, std::move(values));
      seqs.push_back(std::move(seq));
    }
  }
  return FeatureDataset(std::move(seqs));
}

}  // namespace mmidict::synth
