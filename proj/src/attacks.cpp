#include "robustfl/attacks.hpp"

#include <cmath>
#include <stdexcept>

#include "robustfl/rng.hpp"

namespace robustfl {

void AttackSpec::validate() const {
  switch (kind) {
    case Kind::byzantine_gaussian:
      if (!(sigma >= 0.0)) throw std::invalid_argument("attack: sigma must be >= 0");
      break;
    case Kind::noisy:
      if (!(high >= low)) throw std::invalid_argument("attack: noise range out of order");
      if (!(clip_hi > clip_lo)) throw std::invalid_argument("attack: clip bounds out of order");
      break;
    case Kind::label_flip:
      if (target < 0) throw std::invalid_argument("attack: target must be >= 0");
      break;
    case Kind::ipm:
    case Kind::alie:
      if (!(epsilon >= 0.0)) throw std::invalid_argument("attack: epsilon must be >= 0");
      break;
    case Kind::none:
      break;
  }
}

std::string to_string(AttackSpec::Kind kind) {
  switch (kind) {
    case AttackSpec::Kind::none: return "none";
    case AttackSpec::Kind::byzantine_gaussian: return "byzantine_gaussian";
    case AttackSpec::Kind::noisy: return "noisy";
    case AttackSpec::Kind::label_flip: return "label_flip";
    case AttackSpec::Kind::ipm: return "ipm";
    case AttackSpec::Kind::alie: return "alie";
  }
  return "unknown";
}

ParamVector gaussian_byzantine_update(const ParamVector& w_t, double sigma,
                                      std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_byzantine_update: sigma < 0");
  ParamVector out(w_t.dim());
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (auto& x : out.values()) x = rng.normal(0.0, sigma);
  return out;
}

namespace {

ParamVector mean_of(std::span<const ParamVector> grads) {
  ParamVector mean(grads.front().dim());
  for (const auto& g : grads) {
    require_same_dim(g, mean);
    for (std::size_t i = 0; i < mean.dim(); ++i) mean[i] += g[i];
  }
  const double inv = 1.0 / static_cast<double>(grads.size());
  for (auto& x : mean.values()) x *= inv;
  return mean;
}

}  // namespace

std::vector<ParamVector> ipm_updates(std::span<const ParamVector> benign_grads,
                                     double epsilon, std::size_t count) {
  if (benign_grads.empty()) throw std::invalid_argument("ipm: no benign gradients");
  const auto malicious = scale(-epsilon, mean_of(benign_grads));
  return std::vector<ParamVector>(count, malicious);
}

std::vector<ParamVector> alie_updates(std::span<const ParamVector> benign_grads,
                                      double epsilon, std::size_t count) {
  if (benign_grads.size() < 2)
    throw std::invalid_argument("alie: need at least 2 benign gradients");
  const auto mean = mean_of(benign_grads);
  ParamVector malicious(mean.dim());
  const double inv = 1.0 / static_cast<double>(benign_grads.size());
  for (std::size_t i = 0; i < mean.dim(); ++i) {
    double ss = 0.0;
    for (const auto& g : benign_grads) {
      const double d = g[i] - mean[i];
      ss += d * d;
    }
    malicious[i] = mean[i] - epsilon * std::sqrt(ss * inv);
  }
  return std::vector<ParamVector>(count, malicious);
}

LabeledDataset apply_data_attack(const AttackSpec& spec, LabeledDataset dataset,
                                 std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case AttackSpec::Kind::noisy:
      return apply_noise(std::move(dataset), spec.low, spec.high, spec.clip_lo, spec.clip_hi,
                         seed);
    case AttackSpec::Kind::label_flip:
      return flip_labels(std::move(dataset), spec.target);
    default:
      throw std::invalid_argument("apply_data_attack: " + to_string(spec.kind) +
                                  " is not a data attack");
  }
}

ParamVector model_from_pseudo_gradient(const ParamVector& w_t, const ParamVector& g) {
  return subtract(w_t, g);
}

}  // namespace robustfl
