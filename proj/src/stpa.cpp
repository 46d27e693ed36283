#include "robustfl/stpa.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace robustfl {

void StpaConfig::validate() const {
  if (!(s_t > -1.0 && s_t < 1.0)) throw std::invalid_argument("stpa: s_t must lie in (-1, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("stpa: beta must lie in [0, 1)");
  if (!(eta0 > 0.0)) throw std::invalid_argument("stpa: eta0 must be positive");
  if (inner_rule.kind == AggregationRule::Kind::stpa)
    throw std::invalid_argument("stpa: inner rule cannot be stpa");
  inner_rule.validate();
}

namespace {

std::vector<ParamVector> pseudo_gradients(const ParamVector& global_model,
                                          std::span<const ClientUpdate> updates) {
  if (updates.size() < 2) throw std::invalid_argument("build_affinity: need at least 2 updates");
  std::vector<ParamVector> deltas;
  deltas.reserve(updates.size());
  for (const auto& u : updates) deltas.push_back(subtract(global_model, u.model));
  return deltas;
}

}  // namespace

AffinityMatrix build_affinity(const ParamVector& global_model,
                              std::span<const ClientUpdate> updates) {
  const auto deltas = pseudo_gradients(global_model, updates);
  const std::size_t n = deltas.size();
  AffinityMatrix s(n);
  const auto pairs = static_cast<std::ptrdiff_t>(n * n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t p = 0; p < pairs; ++p) {
    const auto i = static_cast<std::size_t>(p) / n;
    const auto j = static_cast<std::size_t>(p) % n;
    if (i < j) s.set(i, j, cosine_similarity(deltas[i], deltas[j]));
  }
  return s;
}

namespace reference {

AffinityMatrix build_affinity(const ParamVector& global_model,
                              std::span<const ClientUpdate> updates) {
  const auto deltas = pseudo_gradients(global_model, updates);
  AffinityMatrix s(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i)
    for (std::size_t j = i + 1; j < deltas.size(); ++j)
      s.set(i, j, cosine_similarity(deltas[i], deltas[j]));
  return s;
}

}  // namespace reference

std::pair<SlotSet, SlotSet> bipartition(const AffinityMatrix& affinity) {
  const std::size_t n = affinity.size();
  if (n < 2) throw std::invalid_argument("bipartition: need at least 2 slots");

  // Clusters stay ordered by their smallest member; merging a into an earlier
  // cluster keeps that order intact.
  std::vector<SlotSet> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = 1.0 - affinity(i, j);

  while (clusters.size() > 2) {
    std::size_t best_a = 0, best_b = 1;
    double best = dist[0][1];
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        if (dist[a][b] < best) {
          best = dist[a][b];
          best_a = a;
          best_b = b;
        }
      }
    }
    // Complete linkage: distance to the merged cluster is the larger of the two.
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const double d = std::max(dist[best_a][k], dist[best_b][k]);
      dist[best_a][k] = d;
      dist[k][best_a] = d;
    }
    dist[best_a][best_a] = 0.0;
    auto& target = clusters[best_a];
    target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
    std::sort(target.begin(), target.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best_b));
    for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return {std::move(clusters[0]), std::move(clusters[1])};
}

double cross_similarity(const AffinityMatrix& affinity, const SlotSet& c1,
                        const SlotSet& c2) {
  if (c1.empty() || c2.empty()) throw std::invalid_argument("cross_similarity: empty cluster");
  double best = -1.0;
  for (auto i : c1)
    for (auto j : c2) best = std::max(best, affinity(i, j));
  return best;
}

SlotSet split_decision(const AffinityMatrix& affinity, const SlotSet& c1,
                       const SlotSet& c2, double s_t) {
  if (cross_similarity(affinity, c1, c2) < s_t && c1.size() != c2.size())
    return c1.size() > c2.size() ? c1 : c2;
  SlotSet all;
  all.reserve(c1.size() + c2.size());
  all.insert(all.end(), c1.begin(), c1.end());
  all.insert(all.end(), c2.begin(), c2.end());
  std::sort(all.begin(), all.end());
  return all;
}

ClusterPartition spatial_filter(const ParamVector& global_model,
                                std::span<const ClientUpdate> updates, double s_t) {
  const auto affinity = build_affinity(global_model, updates);
  auto [c1, c2] = bipartition(affinity);
  ClusterPartition out;
  out.cross_similarity = cross_similarity(affinity, c1, c2);
  out.benign = split_decision(affinity, c1, c2, s_t);
  out.c1 = std::move(c1);
  out.c2 = std::move(c2);
  return out;
}

MomentumState momentum_step(const MomentumState& state, const ParamVector& delta_w,
                            double beta) {
  require_same_dim(state.v, delta_w);
  MomentumState next{ParamVector(delta_w.dim())};
  for (std::size_t i = 0; i < delta_w.dim(); ++i)
    next.v[i] = beta * state.v[i] + (1.0 - beta) * delta_w[i];
  return next;
}

StepOutcome adaptive_update(const ParamVector& w_t, const MomentumState& state_after,
                            const ParamVector& delta_w, double eta0) {
  require_same_dim(w_t, state_after.v);
  StepOutcome out;
  out.alpha = cosine_similarity(delta_w, state_after.v);
  if (out.alpha <= 0.0) {
    out.new_model = w_t;
    out.eta = 0.0;
    out.discarded = true;
    return out;
  }
  out.eta = eta0 * out.alpha;
  out.new_model = axpy(-out.eta, state_after.v, w_t);
  return out;
}

StpaRoundResult stpa_round(const ParamVector& w_t, std::span<const ClientUpdate> updates,
                           const MomentumState& state, const StpaConfig& cfg) {
  cfg.validate();
  detail::require_updates(updates, "stpa_round");
  require_same_dim(w_t, updates.front().model);

  StpaRoundResult result;
  SlotSet benign;
  if (updates.size() == 1) {
    benign = {0};
  } else {
    result.partition = spatial_filter(w_t, updates, cfg.s_t);
    benign = result.partition->benign;
  }

  std::vector<ClientUpdate> kept;
  kept.reserve(benign.size());
  for (auto k : benign) kept.push_back(updates[k]);
  const auto aggregated = aggregate(cfg.inner_rule, kept);

  const auto delta_w = subtract(w_t, aggregated);
  result.state = momentum_step(state, delta_w, cfg.beta);
  result.outcome = adaptive_update(w_t, result.state, delta_w, cfg.eta0);
  result.outcome.benign_count = benign.size();
  return result;
}

}  // namespace robustfl
