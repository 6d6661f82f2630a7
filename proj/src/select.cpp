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

#include "mmidict/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmidict/simd.hpp"

namespace mmidict {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Index into scores of the best value; near-ties keep the earlier index.
std::size_t pick_best(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const double tol = kTieTolerance * std::max(1.0, std::abs(scores[best]));
    if (scores[i] > scores[best] + tol) best = i;
  }
  return best;
}

std::vector<std::size_t> all_atoms(std::size_t k) {
  std::vector<std::size_t> v(k);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void remove_atom(std::vector<std::size_t>& remaining, std::size_t atom) {
  remaining.erase(std::find(remaining.begin(), remaining.end(), atom));
}

// Appearance terms for every remaining candidate: V(d | D*) and V(d | D-bar*).
struct AppearanceTerms {
  std::vector<double> selected;
  std::vector<double> remaining;
};

AppearanceTerms appearance_terms(const KernelMatrix& kern, const std::vector<std::size_t>& remaining,
                                 const std::vector<std::size_t>& chosen, Evaluation eval) {
  return {conditional_variances(kern, remaining, chosen, eval),
          leave_one_out_variances(kern, remaining, eval)};
}

void check_mmi_k(const KernelMatrix& kern, std::size_t k) {
  if (k == 0) throw ValidationError("k must be >= 1");
  if (k >= kern.size()) throw ValidationError("remaining set empty");
}

// Label term of the MMI-2 objective for every candidate.
std::vector<double> label_gains(const std::vector<ClassDistribution>& dists,
                                const std::vector<std::size_t>& remaining,
                                const std::vector<std::size_t>& chosen) {
  const std::size_t m = dists.front().size();
  const ClassDistribution p_selected = set_class_dist(dists, chosen);
  ClassDistribution remaining_sum(m, 0.0);
  for (std::size_t a : remaining)
    for (std::size_t c = 0; c < m; ++c) remaining_sum[c] += dists[a][c];
  std::vector<double> gains(remaining.size());
  ClassDistribution p_rest(m);
  for (std::size_t t = 0; t < remaining.size(); ++t) {
    const ClassDistribution& p = dists[remaining[t]];
    const std::size_t rest = remaining.size() - 1;
    if (rest == 0) {
      p_rest = uniform_distribution(m);
    } else {
      for (std::size_t c = 0; c < m; ++c) p_rest[c] = (remaining_sum[c] - p[c]) / static_cast<double>(rest);
    }
    gains[t] = label_cond_entropy(p, p_selected) - label_cond_entropy(p, p_rest);
  }
  return gains;
}

void check_dists(const KernelMatrix& kern, const std::vector<ClassDistribution>& dists) {
  if (dists.size() != kern.size()) throw ValidationError("need one class distribution per atom");
  for (const auto& p : dists)
    if (p.size() != dists.front().size() || p.empty()) throw ValidationError("ragged class distributions");
}

}  // namespace

SelectionTrace select_me(const KernelMatrix& kern, std::size_t k, Evaluation eval) {
  if (k == 0 || k > kern.size()) throw ValidationError("k must be in [1, K]");
  SelectionTrace trace;
  trace.method = "me";
  std::vector<std::size_t> remaining = all_atoms(kern.size());
  std::vector<std::size_t> chosen;
  for (std::size_t step = 0; step < k; ++step) {
    const auto start = Clock::now();
    const std::vector<double> v = conditional_variances(kern, remaining, chosen, eval);
    std::vector<double> scores(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) scores[t] = gaussian_entropy(v[t]);
    const std::size_t best = pick_best(scores);
    const std::size_t atom = remaining[best];
    trace.atoms.push_back(atom);
    trace.objective.push_back(scores[best]);
    trace.entropy_selected.push_back(scores[best]);
    trace.entropy_remaining.push_back(std::numeric_limits<double>::quiet_NaN());
    chosen.push_back(atom);
    remove_atom(remaining, atom);
    trace.seconds.push_back(elapsed(start));
  }
  return trace;
}

SelectionTrace select_mmi1(const KernelMatrix& kern, std::size_t k, Evaluation eval) {
  check_mmi_k(kern, k);
  SelectionTrace trace;
  trace.method = "mmi1";
  std::vector<std::size_t> remaining = all_atoms(kern.size());
  std::vector<std::size_t> chosen;
  for (std::size_t step = 0; step < k; ++step) {
    const auto start = Clock::now();
    const AppearanceTerms terms = appearance_terms(kern, remaining, chosen, eval);
    std::vector<double> scores(remaining.size());
    // H(d|D*) - H(d|D-bar*) = 0.5 ln of the variance ratio.
    for (std::size_t t = 0; t < scores.size(); ++t)
      scores[t] = 0.5 * std::log(terms.selected[t] / terms.remaining[t]);
    const std::size_t best = pick_best(scores);
    const std::size_t atom = remaining[best];
    trace.atoms.push_back(atom);
    trace.objective.push_back(scores[best]);
    trace.entropy_selected.push_back(gaussian_entropy(terms.selected[best]));
    trace.entropy_remaining.push_back(gaussian_entropy(terms.remaining[best]));
    chosen.push_back(atom);
    remove_atom(remaining, atom);
    trace.seconds.push_back(elapsed(start));
  }
  return trace;
}

double estimate_lambda(const KernelMatrix& kern, const std::vector<ClassDistribution>& dists, Evaluation eval) {
  check_dists(kern, dists);
  if (kern.size() < 2) throw ValidationError("need at least two atoms");
  const std::vector<std::size_t> everything = all_atoms(kern.size());
  const AppearanceTerms terms = appearance_terms(kern, everything, {}, eval);
  double best_appearance = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < everything.size(); ++t)
    best_appearance = std::max(best_appearance, 0.5 * std::log(terms.selected[t] / terms.remaining[t]));
  if (!(best_appearance > 0.0)) throw Error("degenerate kernel");
  const std::vector<double> labels = label_gains(dists, everything, {});
  const double best_label = *std::max_element(labels.begin(), labels.end());
  return std::max(0.0, best_label / best_appearance);
}

SelectionTrace select_mmi2(const KernelMatrix& kern, const std::vector<ClassDistribution>& dists,
                           std::size_t k, std::optional<double> lambda, Evaluation eval) {
  check_mmi_k(kern, k);
  check_dists(kern, dists);
  const double weight = lambda ? *lambda : estimate_lambda(kern, dists, eval);
  if (!(weight >= 0.0)) throw ValidationError("lambda must be >= 0");
  SelectionTrace trace;
  trace.method = "mmi2";
  trace.lambda = weight;
  std::vector<std::size_t> remaining = all_atoms(kern.size());
  std::vector<std::size_t> chosen;
  for (std::size_t step = 0; step < k; ++step) {
    const auto start = Clock::now();
    const AppearanceTerms terms = appearance_terms(kern, remaining, chosen, eval);
    const std::vector<double> labels = label_gains(dists, remaining, chosen);
    std::vector<double> scores(remaining.size());
    for (std::size_t t = 0; t < scores.size(); ++t)
      scores[t] = 0.5 * std::log(terms.selected[t] / terms.remaining[t]) + weight * labels[t];
    const std::size_t best = pick_best(scores);
    const std::size_t atom = remaining[best];
    trace.atoms.push_back(atom);
    trace.objective.push_back(scores[best]);
    trace.entropy_selected.push_back(gaussian_entropy(terms.selected[best]));
    trace.entropy_remaining.push_back(gaussian_entropy(terms.remaining[best]));
    chosen.push_back(atom);
    remove_atom(remaining, atom);
    trace.seconds.push_back(elapsed(start));
  }
  return trace;
}

PriorMode parse_prior_mode(std::string_view name) {
  if (name == "mass") return PriorMode::kMass;
  if (name == "uniform") return PriorMode::kUniform;
  throw ValidationError("unknown prior mode '" + std::string(name) + "'");
}

std::vector<double> atom_prior(const SparseCodeTable& codes, PriorMode mode) {
  const std::size_t k = codes.num_atoms();
  std::vector<double> prior(k, 0.0);
  if (mode == PriorMode::kMass) {
    for (std::size_t j = 0; j < codes.num_signals(); ++j)
      for (const CodeEntry& e : codes.signal(j)) prior[e.atom] += std::abs(e.value);
  }
  const double total = std::accumulate(prior.begin(), prior.end(), 0.0);
  if (total > 0.0) {
    for (double& p : prior) p /= total;
  } else {
    std::fill(prior.begin(), prior.end(), 1.0 / static_cast<double>(k));
  }
  return prior;
}

namespace {

std::vector<double> merged_distribution(double prior_a, std::span<const double> dist_a, double prior_b,
                                        std::span<const double> dist_b) {
  if (std::equal(dist_a.begin(), dist_a.end(), dist_b.begin(), dist_b.end()))
    return {dist_a.begin(), dist_a.end()};
  const double total = prior_a + prior_b;
  std::vector<double> merged(dist_a.size());
  for (std::size_t c = 0; c < merged.size(); ++c) {
    merged[c] = total > 0.0 ? (prior_a * dist_a[c] + prior_b * dist_b[c]) / total
                            : 0.5 * (dist_a[c] + dist_b[c]);
  }
  return merged;
}

double loss_term(double prior, std::span<const double> dist, std::span<const double> merged) {
  if (prior == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t c = 0; c < dist.size(); ++c)
    if (dist[c] > 0.0) s += prior * dist[c] * (std::log(dist[c]) - std::log(merged[c]));
  return s;
}

}  // namespace

double merge_information_loss(double prior_a, std::span<const double> dist_a, double prior_b,
                              std::span<const double> dist_b) {
  if (dist_a.size() != dist_b.size()) throw ValidationError("class count mismatch");
  const std::vector<double> merged = merged_distribution(prior_a, dist_a, prior_b, dist_b);
  return loss_term(prior_a, dist_a, merged) + loss_term(prior_b, dist_b, merged);
}

Mmi3Result select_mmi3(const Dictionary& dict, const std::vector<ClassDistribution>& dists,
                       const std::vector<double>& priors, std::size_t k) {
  const std::size_t total = dict.size();
  if (k < 2 || k >= total) throw ValidationError("mmi3 needs 2 <= k < K");
  if (dists.size() != total || priors.size() != total)
    throw ValidationError("need one class distribution and prior per atom");
  if (!is_distribution(priors)) throw ValidationError("atom priors must form a distribution");
  for (const auto& p : dists)
    if (!is_distribution(p) || p.size() != dists.front().size())
      throw ValidationError("invalid class distribution");

  const std::size_t n = dict.dim();
  std::vector<std::vector<double>> vec(total);
  for (std::size_t i = 0; i < total; ++i) vec[i].assign(dict.atom(i).begin(), dict.atom(i).end());
  std::vector<ClassDistribution> dist = dists;
  std::vector<double> prior = priors;
  std::vector<char> alive(total, 1);

  Matrix loss(total, total);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j)
      loss(i, j) = merge_information_loss(prior[i], dist[i], prior[j], dist[j]);

  Mmi3Result result;
  for (std::size_t live = total; live > k; --live) {
    const auto start = Clock::now();
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < total; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < total; ++j)
        if (alive[j] && loss(i, j) < best) {
          best = loss(i, j);
          bi = i;
          bj = j;
        }
    }
    // Merge bj into bi.
    const double pa = prior[bi], pb = prior[bj], pm = pa + pb;
    std::vector<double> merged(n);
    for (std::size_t r = 0; r < n; ++r)
      merged[r] = pm > 0.0 ? (pa * vec[bi][r] + pb * vec[bj][r]) / pm : 0.5 * (vec[bi][r] + vec[bj][r]);
    const double norm = std::sqrt(simd::dot(merged.data(), merged.data(), n));
    if (norm > 0.0) {
      for (double& x : merged) x /= norm;
      vec[bi] = std::move(merged);
    }
    dist[bi] = merged_distribution(pa, dist[bi], pb, dist[bj]);
    prior[bi] = pm;
    alive[bj] = 0;
    for (std::size_t o = 0; o < total; ++o) {
      if (!alive[o] || o == bi) continue;
      const double l = merge_information_loss(prior[bi], dist[bi], prior[o], dist[o]);
      if (o < bi) loss(o, bi) = l; else loss(bi, o) = l;
    }
    result.merges.push_back({bi, bj, best, elapsed(start)});
  }

  Matrix atoms(n, k);
  std::vector<ClassDistribution> out_dist;
  std::vector<double> out_prior;
  for (std::size_t i = 0, c = 0; i < total; ++i) {
    if (!alive[i]) continue;
    atoms.set_column(c++, vec[i]);
    out_dist.push_back(dist[i]);
    out_prior.push_back(prior[i]);
    result.slots.push_back(i);
  }
  // Renormalize the priors against accumulated rounding.
  const double prior_total = std::accumulate(out_prior.begin(), out_prior.end(), 0.0);
  for (double& p : out_prior) p /= prior_total;
  result.dictionary = Dictionary(std::move(atoms), std::move(out_dist), std::move(out_prior));
  return result;
}

Dictionary select_kmeans(const Dictionary& dict, std::size_t k, std::uint64_t seed) {
  const std::size_t total = dict.size();
  const std::size_t n = dict.dim();
  if (k == 0 || k > total) throw ValidationError("k must be in [1, K]");
  const Matrix& points = dict.atom_rows();
  Rng rng(seed);

  // k-means++ seeding.
  Matrix centers(k, n);
  std::vector<double> d2(total, std::numeric_limits<double>::infinity());
  std::vector<char> picked(total, 0);
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pick = first;
    if (c > 0) {
      const double sum = std::accumulate(d2.begin(), d2.end(), 0.0);
      if (sum > 0.0) {
        std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
        pick = dist(rng);
      } else {
        pick = std::find(picked.begin(), picked.end(), 0) - picked.begin();
      }
    }
    picked[pick] = 1;
    std::copy_n(points.row(pick).data(), n, centers.row(c).data());
    for (std::size_t i = 0; i < total; ++i)
      d2[i] = std::min(d2[i], simd::squared_distance(points.row(i).data(), centers.row(c).data(), n));
    for (std::size_t i = 0; i < total; ++i)
      if (picked[i]) d2[i] = 0.0;
  }

  std::vector<std::size_t> assign(total, 0);
  std::vector<double> dist_to(total, 0.0);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < total; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = simd::squared_distance(points.row(i).data(), centers.row(c).data(), n);
        if (d < best) {
          best = d;
          assign[i] = c;
        }
      }
      dist_to[i] = best;
    }
    Matrix next(k, n);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < total; ++i) {
      simd::axpy(1.0, points.row(i).data(), next.row(assign[i]).data(), n);
      ++counts[assign[i]];
    }
    std::vector<char> reseeded(total, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Empty cluster: restart it at the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < total; ++i)
          if (!reseeded[i] && dist_to[i] > far_d) {
            far_d = dist_to[i];
            far = i;
          }
        reseeded[far] = 1;
        dist_to[far] = 0.0;
        std::copy_n(points.row(far).data(), n, next.row(c).data());
      } else {
        for (double& x : next.row(c)) x /= static_cast<double>(counts[c]);
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      shift = std::max(shift, simd::squared_distance(next.row(c).data(), centers.row(c).data(), n));
    centers = std::move(next);
    if (std::sqrt(shift) < 1e-8) break;
  }

  Matrix atoms(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v(centers.row(c).begin(), centers.row(c).end());
    double norm = norm2(v);
    if (norm == 0.0) {
      // Cancelling members (e.g. d and -d): fall back to the first member.
      const std::size_t member = std::find(assign.begin(), assign.end(), c) - assign.begin();
      v.assign(points.row(member < total ? member : 0).begin(), points.row(member < total ? member : 0).end());
      norm = norm2(v);
    }
    for (double& x : v) x /= norm;
    atoms.set_column(c, v);
  }
  return Dictionary(std::move(atoms));
}

Dictionary subset_dictionary(const Dictionary& dict, std::span<const std::size_t> atoms) {
  Matrix m(dict.dim(), atoms.size());
  std::vector<ClassDistribution> dist;
  for (std::size_t c = 0; c < atoms.size(); ++c) {
    m.set_column(c, dict.atom(atoms[c]));
    if (dict.has_class_dist()) dist.push_back(dict.class_dist()[atoms[c]]);
  }
  return Dictionary(std::move(m), std::move(dist));
}

}  // namespace mmidict
