#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robustfl/dataset.hpp"
#include "robustfl/vector.hpp"

namespace robustfl {

/// Behavior of the malicious clients in an experiment.
struct AttackSpec {
  enum class Kind { none, byzantine_gaussian, noisy, label_flip, ipm, alie };

  Kind kind = Kind::none;
  double sigma = 20.0;      // byzantine_gaussian
  double low = -1.4;        // noisy
  double high = 1.4;
  double clip_lo = -1.0;
  double clip_hi = 1.0;
  int target = 0;           // label_flip
  double epsilon = 1.0;     // ipm, alie

  static AttackSpec none() { return {}; }
  static AttackSpec byzantine_gaussian(double sigma) {
    AttackSpec a;
    a.kind = Kind::byzantine_gaussian;
    a.sigma = sigma;
    return a;
  }
  static AttackSpec noisy(double low, double high, double clip_lo, double clip_hi) {
    AttackSpec a;
    a.kind = Kind::noisy;
    a.low = low;
    a.high = high;
    a.clip_lo = clip_lo;
    a.clip_hi = clip_hi;
    return a;
  }
  static AttackSpec label_flip(int target) {
    AttackSpec a;
    a.kind = Kind::label_flip;
    a.target = target;
    return a;
  }
  static AttackSpec ipm(double epsilon) {
    AttackSpec a;
    a.kind = Kind::ipm;
    a.epsilon = epsilon;
    return a;
  }
  static AttackSpec alie(double epsilon) {
    AttackSpec a;
    a.kind = Kind::alie;
    a.epsilon = epsilon;
    return a;
  }

  bool corrupts_data() const noexcept { return kind == Kind::noisy || kind == Kind::label_flip; }
  /// Reads the round's honest pseudo-gradients.
  bool omniscient() const noexcept { return kind == Kind::ipm || kind == Kind::alie; }

  void validate() const;
};

std::string to_string(AttackSpec::Kind kind);

/// A submitted model drawn i.i.d. N(0, sigma^2) per coordinate; w_t only
/// fixes the dimension.
ParamVector gaussian_byzantine_update(const ParamVector& w_t, double sigma,
                                      std::uint64_t seed);

/// `count` copies of -epsilon * mean(benign_grads).
std::vector<ParamVector> ipm_updates(std::span<const ParamVector> benign_grads,
                                     double epsilon, std::size_t count);

/// `count` copies of mean - epsilon * std per coordinate, population std.
std::vector<ParamVector> alie_updates(std::span<const ParamVector> benign_grads,
                                      double epsilon, std::size_t count);

/// Noise or label flipping on a malicious client's dataset.
LabeledDataset apply_data_attack(const AttackSpec& spec, LabeledDataset dataset,
                                 std::uint64_t seed = 0);

/// Model a client submits to report pseudo-gradient g: w_t - g.
ParamVector model_from_pseudo_gradient(const ParamVector& w_t, const ParamVector& g);

}  // namespace robustfl
