#include "robustfl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robustfl/idx.hpp"

namespace robustfl {

namespace {

// Stream ids under the experiment's root seed.
enum Stream : std::uint64_t {
  kData = 1,
  kPartition = 2,
  kInit = 3,
  kSelect = 4,
  kTrain = 5,
  kByzantine = 6,
  kNoise = 7,
};

std::uint64_t seed_of(const Rng& root, std::initializer_list<std::uint64_t> path) {
  return root.split(path).next_u64();
}

}  // namespace

std::string to_string(Scenario scenario) {
  return scenario == Scenario::cross_silo ? "cross_silo" : "cross_device";
}

void ScenarioConfig::validate() const {
  if (n_clients < 1) throw std::invalid_argument("n_clients must be >= 1");
  if (n_malicious >= n_clients) throw std::invalid_argument("n_malicious must be < n_clients");
  if (clients_per_round < 1 || clients_per_round > n_clients)
    throw std::invalid_argument("clients_per_round must lie in [1, n_clients]");
  if (scenario == Scenario::cross_silo && clients_per_round != n_clients)
    throw std::invalid_argument("cross_silo requires clients_per_round == n_clients");
  attack.validate();
  rule.validate();
  train.validate();
  if (rule.kind == AggregationRule::Kind::stpa) stpa.validate();
  if (rule.kind == AggregationRule::Kind::krum)
    detail::check_krum(clients_per_round, rule.f, rule.m);
  if (rule.kind == AggregationRule::Kind::trimmed_mean)
    detail::trim_count(clients_per_round, rule.gamma);
  if (data.kind == DataConfig::Kind::blobs) {
    if (data.n_classes < 2) throw std::invalid_argument("data: n_classes must be >= 2");
    if (data.dim < 1) throw std::invalid_argument("data: dim must be >= 1");
    if (data.train_per_class < 1 || data.test_per_class < 1)
      throw std::invalid_argument("data: per-class sample counts must be >= 1");
    if (!(data.spread >= 0.0)) throw std::invalid_argument("data: spread must be >= 0");
    if (attack.kind == AttackSpec::Kind::label_flip &&
        static_cast<std::size_t>(attack.target) >= data.n_classes)
      throw std::invalid_argument("attack: label_flip target out of range");
  }
  if (model.kind == ModelKind::mlp && model.hidden < 1)
    throw std::invalid_argument("model: hidden must be >= 1");
}

std::vector<std::size_t> select_clients(std::size_t round, const ScenarioConfig& cfg,
                                        Rng& rng) {
  (void)round;
  std::vector<std::size_t> ids(cfg.n_clients);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  if (cfg.scenario == Scenario::cross_silo || cfg.clients_per_round >= cfg.n_clients)
    return ids;
  for (std::size_t i = 0; i < cfg.clients_per_round; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(cfg.clients_per_round);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Experiment::Experiment(ScenarioConfig cfg, bool parallel_clients)
    : cfg_(std::move(cfg)), parallel_clients_(parallel_clients), root_(cfg_.seed) {
  cfg_.validate();

  LabeledDataset train;
  switch (cfg_.data.kind) {
    case DataConfig::Kind::blobs: {
      auto split = generate_blob_split(cfg_.data.n_classes, cfg_.data.dim,
                                       cfg_.data.train_per_class, cfg_.data.test_per_class,
                                       cfg_.data.spread, seed_of(root_, {kData}));
      train = std::move(split.train);
      test_ = std::move(split.test);
      break;
    }
    case DataConfig::Kind::idx:
      train = load_idx(cfg_.data.train_images, cfg_.data.train_labels);
      test_ = load_idx(cfg_.data.test_images, cfg_.data.test_labels);
      break;
    case DataConfig::Kind::file:
      train = load_dataset(cfg_.data.train_path);
      test_ = load_dataset(cfg_.data.test_path);
      break;
  }
  if (train.n_features != test_.n_features)
    throw std::invalid_argument("train and test feature counts differ");
  const std::size_t n_classes = std::max(train.n_classes, test_.n_classes);
  train.n_classes = test_.n_classes = n_classes;
  if (cfg_.attack.kind == AttackSpec::Kind::label_flip &&
      static_cast<std::size_t>(cfg_.attack.target) >= n_classes)
    throw std::invalid_argument("attack: label_flip target out of range");

  const auto plan =
      cfg_.partition.scheme == PartitionScheme::iid
          ? partition_iid(train, cfg_.n_clients, seed_of(root_, {kPartition}))
          : partition_noniid_shards(train, cfg_.n_clients, cfg_.partition.shards_per_client,
                                    cfg_.partition.shard_size,
                                    seed_of(root_, {kPartition}));
  clients_.reserve(cfg_.n_clients);
  for (std::size_t k = 0; k < cfg_.n_clients; ++k) {
    if (plan.assignments[k].empty())
      throw std::invalid_argument("client " + std::to_string(k) + " received no data");
    auto local = subset(train, plan.assignments[k]);
    if (is_malicious(k) && cfg_.attack.corrupts_data())
      local = apply_data_attack(cfg_.attack, std::move(local), seed_of(root_, {kNoise, k}));
    clients_.push_back(std::move(local));
  }

  shape_ = cfg_.model.kind == ModelKind::linear
               ? ModelShape::linear(train.n_features, n_classes)
               : ModelShape::mlp(train.n_features, n_classes, cfg_.model.hidden);
  state_.global_model = initialize(shape_, seed_of(root_, {kInit}));
  state_.momentum = MomentumState::zeros(shape_.param_count());
}

std::vector<ParamVector> Experiment::train_clients(const std::vector<std::size_t>& ids) const {
  std::vector<ParamVector> models(ids.size());
  const auto count = static_cast<std::ptrdiff_t>(ids.size());
  auto train_one = [&](std::ptrdiff_t i) {
    const auto k = ids[static_cast<std::size_t>(i)];
    models[static_cast<std::size_t>(i)] =
        local_train(shape_, state_.global_model, clients_[k], cfg_.train,
                    seed_of(root_, {kTrain, state_.round, k}));
  };
  if (parallel_clients_) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) train_one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) train_one(i);
  }
  return models;
}

RoundLog Experiment::run_round() {
  const auto& attack = cfg_.attack;
  const ParamVector& w_t = state_.global_model;

  RoundLog log;
  log.round = state_.round;
  Rng select_rng = root_.split({kSelect, state_.round});
  log.selected = select_clients(state_.round, cfg_, select_rng);
  for (auto k : log.selected)
    if (is_malicious(k)) ++log.malicious_selected;

  // Clients that run local training: everyone except model-level attackers.
  const bool model_attack =
      attack.kind == AttackSpec::Kind::byzantine_gaussian || attack.omniscient();
  std::vector<std::size_t> trainers;
  for (auto k : log.selected)
    if (!(model_attack && is_malicious(k))) trainers.push_back(k);
  const auto trained = train_clients(trainers);

  std::vector<ParamVector> submitted(log.selected.size());
  std::vector<std::size_t> malicious_slots;
  for (std::size_t slot = 0, t = 0; slot < log.selected.size(); ++slot) {
    const auto k = log.selected[slot];
    if (model_attack && is_malicious(k)) {
      malicious_slots.push_back(slot);
    } else {
      submitted[slot] = trained[t++];
    }
  }

  if (attack.kind == AttackSpec::Kind::byzantine_gaussian) {
    for (auto slot : malicious_slots)
      submitted[slot] = gaussian_byzantine_update(
          w_t, attack.sigma, seed_of(root_, {kByzantine, state_.round, log.selected[slot]}));
  } else if (attack.omniscient() && !malicious_slots.empty()) {
    std::vector<ParamVector> honest_grads;
    for (std::size_t slot = 0; slot < log.selected.size(); ++slot)
      if (!is_malicious(log.selected[slot])) honest_grads.push_back(subtract(w_t, submitted[slot]));
    if (honest_grads.empty())
      throw SimulationError("round " + std::to_string(state_.round) +
                            ": omniscient attack with no honest participants");
    const auto grads =
        attack.kind == AttackSpec::Kind::ipm
            ? ipm_updates(honest_grads, attack.epsilon, malicious_slots.size())
            : alie_updates(honest_grads, attack.epsilon, malicious_slots.size());
    for (std::size_t i = 0; i < malicious_slots.size(); ++i)
      submitted[malicious_slots[i]] = model_from_pseudo_gradient(w_t, grads[i]);
  }

  std::vector<ClientUpdate> updates;
  updates.reserve(submitted.size());
  for (std::size_t slot = 0; slot < submitted.size(); ++slot) {
    updates.push_back({state_.round, slot, std::move(submitted[slot]),
                       clients_[log.selected[slot]].size()});
  }

  if (cfg_.rule.kind == AggregationRule::Kind::stpa) {
    auto result = stpa_round(w_t, updates, state_.momentum, cfg_.stpa);
    log.benign_kept = result.outcome.benign_count;
    log.alpha = result.outcome.alpha;
    log.eta = result.outcome.eta;
    log.discarded = result.outcome.discarded;
    state_.momentum = std::move(result.state);
    state_.global_model = std::move(result.outcome.new_model);
  } else {
    log.benign_kept = updates.size();
    state_.global_model = aggregate(cfg_.rule, updates);
  }

  if (!state_.global_model.all_finite())
    throw SimulationError("round " + std::to_string(state_.round) +
                          ": global model is no longer finite");
  log.test_error_pct = evaluate_error(shape_, state_.global_model, test_);
  ++state_.round;
  return log;
}

std::vector<RoundLog> run_experiment(const ScenarioConfig& cfg, const RoundCallback& on_round) {
  Experiment experiment(cfg);
  std::vector<RoundLog> logs;
  logs.reserve(cfg.rounds);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    logs.push_back(experiment.run_round());
    if (on_round) on_round(logs.back());
  }
  return logs;
}

FinalStats final_stats(const std::vector<RoundLog>& logs, std::size_t window) {
  FinalStats stats;
  if (logs.empty() || window == 0) return stats;
  const std::size_t n = std::min(window, logs.size());
  const auto first = logs.end() - static_cast<std::ptrdiff_t>(n);
  for (auto it = first; it != logs.end(); ++it) stats.mean += it->test_error_pct;
  stats.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (auto it = first; it != logs.end(); ++it) {
    const double d = it->test_error_pct - stats.mean;
    ss += d * d;
  }
  stats.stddev = std::sqrt(ss / static_cast<double>(n));
  return stats;
}

}  // namespace robustfl
