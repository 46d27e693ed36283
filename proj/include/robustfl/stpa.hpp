#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "robustfl/aggregation.hpp"
#include "robustfl/vector.hpp"

namespace robustfl {

/// Pairwise cosine similarities between the round's pseudo-gradients.
/// Symmetric, unit diagonal, entries in [-1, 1].
class AffinityMatrix {
public:
  explicit AffinityMatrix(std::size_t n) : n_(n), s_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) s_[i * n + i] = 1.0;
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return s_[i * n_ + j]; }
  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value) noexcept {
    s_[i * n_ + j] = value;
    s_[j * n_ + i] = value;
  }

  friend bool operator==(const AffinityMatrix&, const AffinityMatrix&) = default;

private:
  std::size_t n_;
  std::vector<double> s_;
};

using SlotSet = std::vector<std::size_t>;  // sorted roster positions

struct ClusterPartition {
  SlotSet c1;  // cluster holding the smallest slot
  SlotSet c2;
  double cross_similarity = 0.0;
  SlotSet benign;
};

struct StpaConfig {
  double s_t = 0.02;   // clustering threshold, in (-1, 1)
  double beta = 0.5;   // momentum decay, in [0, 1)
  double eta0 = 1.0;   // initial global learning rate, > 0
  AggregationRule inner_rule = AggregationRule::coordinate_median();

  void validate() const;
};

struct MomentumState {
  ParamVector v;

  static MomentumState zeros(std::size_t dim) { return {ParamVector(dim)}; }
};

struct StepOutcome {
  ParamVector new_model;
  double alpha = 0.0;
  double eta = 0.0;
  bool discarded = false;
  std::size_t benign_count = 0;
};

/// s[i][j] = cos(global - model_i, global - model_j), diagonal forced to 1.
AffinityMatrix build_affinity(const ParamVector& global_model,
                              std::span<const ClientUpdate> updates);

/// Complete-linkage agglomerative clustering on distance 1 - s, stopped at two
/// clusters. The pair with the smallest linkage distance merges first; exact
/// ties go to the lexicographically smallest (min slot, min slot) pair.
std::pair<SlotSet, SlotSet> bipartition(const AffinityMatrix& affinity);

/// Largest similarity between a member of c1 and a member of c2.
double cross_similarity(const AffinityMatrix& affinity, const SlotSet& c1,
                        const SlotSet& c2);

/// Benign slots: the larger cluster when the cross similarity is below s_t and
/// the sizes differ, otherwise every slot.
SlotSet split_decision(const AffinityMatrix& affinity, const SlotSet& c1,
                       const SlotSet& c2, double s_t);

/// build_affinity, bipartition and split_decision in one call.
ClusterPartition spatial_filter(const ParamVector& global_model,
                                std::span<const ClientUpdate> updates, double s_t);

/// v <- beta * v + (1 - beta) * delta_w
MomentumState momentum_step(const MomentumState& state, const ParamVector& delta_w,
                            double beta);

/// alpha = cos(delta_w, v). alpha <= 0 keeps w_t; otherwise
/// w_t - eta0 * alpha * v. `state_after` must already include delta_w.
StepOutcome adaptive_update(const ParamVector& w_t, const MomentumState& state_after,
                            const ParamVector& delta_w, double eta0);

struct StpaRoundResult {
  StepOutcome outcome;
  MomentumState state;  // advanced even when the step is discarded
  std::optional<ClusterPartition> partition;  // absent for single-update rounds
};

/// One round of spatial filtering, inner aggregation over the benign set,
/// momentum speculation and adaptive step.
StpaRoundResult stpa_round(const ParamVector& w_t, std::span<const ClientUpdate> updates,
                           const MomentumState& state, const StpaConfig& cfg);

namespace reference {

AffinityMatrix build_affinity(const ParamVector& global_model,
                              std::span<const ClientUpdate> updates);

}  // namespace reference

}  // namespace robustfl
