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

// Seeded synthetic data used by the `gen` subcommand, the tests and the
// benchmarks.

#include <cstdint>
#include <vector>

#include "mmidict/numcore.hpp"
#include "mmidict/pursuit.hpp"

namespace mmidict::synth {

// Random Gaussian dictionary (n x K) with unit-norm columns.
Dictionary random_dictionary(std::size_t n, std::size_t atoms, Rng& rng);

// Random dictionary decorrelated until its mutual coherence is below
// max_coherence: gradient steps on the squared excess of every |d_i^T d_j|
// over a slightly lower target, renormalizing atoms after each step. Throws
// Error if the bound is not reached within max_iterations.
Dictionary incoherent_dictionary(std::size_t n, std::size_t atoms, double max_coherence, Rng& rng,
                                 std::size_t max_iterations = 20000);

// Largest |d_i^T d_j| over i != j.
double mutual_coherence(const Dictionary& dict);

struct SparseSignals {
  Matrix signals;                              // n x N
  std::vector<std::vector<CodeEntry>> codes;   // generating codes, atoms ascending
};

enum class CoefficientLaw {
  kBounded,   // magnitude uniform in [1, 2], random sign
  kGaussian,  // standard normal
};

// Every signal combines exactly `sparsity` distinct atoms of dict with
// coefficients drawn from `law`.
SparseSignals sparse_signals(const Dictionary& dict, std::size_t count, std::size_t sparsity, Rng& rng,
                             CoefficientLaw law = CoefficientLaw::kBounded);

struct PlantedClusters {
  Matrix frames;                  // n x (clusters * per_cluster), shuffled order
  std::vector<std::size_t> cluster;  // cluster id of every frame
  double gap = 0.0;               // smallest distance between cluster centres
};

// Cluster centres are random unit vectors; each frame is its centre plus a
// random perturbation whose norm is noise_ratio * gap.
PlantedClusters planted_clusters(std::size_t n, std::size_t clusters, std::size_t per_cluster,
                                 double noise_ratio, Rng& rng);

struct MixtureOptions {
  std::size_t classes = 4;
  std::size_t dim = 16;
  std::size_t sequences_per_class = 25;
  std::size_t frames_per_sequence = 20;
  std::size_t class_atoms = 4;    // prototype directions owned by each class
  std::size_t prototypes_per_frame = 2;
  std::size_t shared_atoms = 5;   // background directions, independent of class
  double shared_weight = 3.0;
  double noise = 0.02;
};

// Labeled mixture: each frame is a positive combination of
// prototypes_per_frame prototypes of its class, plus every shared background
// direction independently with probability 1/2, plus noise.
FeatureDataset labeled_mixture(const MixtureOptions& options, Rng& rng);

struct ActionOptions {
  std::size_t classes = 3;
  std::size_t actors = 9;
  std::size_t dim = 24;
  std::size_t primitives = 12;      // shared pose primitives
  std::size_t phases = 4;           // primitives visited per action
  std::size_t frames_per_phase = 6; // nominal, varied per actor
  double actor_jitter = 0.1;        // per-actor perturbation of primitives
  double noise = 0.03;
};

// Action-like sequences: every class walks through its own ordered list of
// pose primitives; each actor performs every class once with a personal
// tempo and style perturbation. The `group` of a sequence is its actor.
FeatureDataset action_sequences(const ActionOptions& options, Rng& rng);

}  // namespace mmidict::synth
