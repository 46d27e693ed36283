#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustfl/aggregation.hpp"
#include "robustfl/attacks.hpp"
#include "robustfl/dataset.hpp"
#include "robustfl/model.hpp"
#include "robustfl/rng.hpp"
#include "robustfl/stpa.hpp"

namespace robustfl {

enum class Scenario { cross_silo, cross_device };

std::string to_string(Scenario scenario);

struct DataConfig {
  enum class Kind { blobs, idx, file };
  Kind kind = Kind::blobs;

  // blobs
  std::size_t n_classes = 10;
  std::size_t dim = 20;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 100;
  double spread = 0.1;

  // idx: MNIST-style image/label pairs; file: save_dataset() output
  std::string train_images, train_labels, test_images, test_labels;
  std::string train_path, test_path;
};

struct PartitionConfig {
  PartitionScheme scheme = PartitionScheme::iid;
  std::size_t shards_per_client = 2;
  std::size_t shard_size = 300;
};

struct ModelConfig {
  ModelKind kind = ModelKind::linear;
  std::size_t hidden = 200;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::cross_silo;
  std::size_t n_clients = 20;
  std::size_t n_malicious = 0;
  std::size_t clients_per_round = 20;
  std::size_t rounds = 100;
  AttackSpec attack;
  AggregationRule rule = AggregationRule::fed_avg();
  TrainConfig train;
  PartitionConfig partition;
  DataConfig data;
  ModelConfig model;
  StpaConfig stpa;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct RoundLog {
  std::size_t round = 0;
  std::vector<std::size_t> selected;
  std::size_t malicious_selected = 0;
  std::size_t benign_kept = 0;
  std::optional<double> alpha;
  std::optional<double> eta;
  bool discarded = false;
  double test_error_pct = 0.0;

  friend bool operator==(const RoundLog&, const RoundLog&) = default;
};

struct ExperimentState {
  ParamVector global_model;
  MomentumState momentum;
  std::size_t round = 0;
};

/// A round could not be carried out (e.g. an omniscient attack with no honest
/// participants to observe).
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Clients selected for a round: everyone in cross-silo, otherwise a uniform
/// sample without replacement, sorted ascending.
std::vector<std::size_t> select_clients(std::size_t round, const ScenarioConfig& cfg,
                                        Rng& rng);

/// One federated learning run: data, clients and global state.
class Experiment {
public:
  /// parallel_clients selects the OpenMP client-training loop; false runs the
  /// clients one after another (reference path, identical results).
  explicit Experiment(ScenarioConfig cfg, bool parallel_clients = true);

  const ScenarioConfig& config() const noexcept { return cfg_; }
  const ExperimentState& state() const noexcept { return state_; }
  const ModelShape& shape() const noexcept { return shape_; }
  const LabeledDataset& client_data(std::size_t client) const { return clients_.at(client); }
  const LabeledDataset& test_set() const noexcept { return test_; }
  bool is_malicious(std::size_t client) const noexcept { return client < cfg_.n_malicious; }

  RoundLog run_round();

private:
  std::vector<ParamVector> train_clients(const std::vector<std::size_t>& ids) const;

  ScenarioConfig cfg_;
  bool parallel_clients_;
  Rng root_;
  ModelShape shape_;
  std::vector<LabeledDataset> clients_;
  LabeledDataset test_;
  ExperimentState state_;
};

using RoundCallback = std::function<void(const RoundLog&)>;

/// Runs cfg.rounds rounds; on_round (if set) sees each log as it is produced.
std::vector<RoundLog> run_experiment(const ScenarioConfig& cfg,
                                     const RoundCallback& on_round = {});

/// Mean and population standard deviation of test error over the last
/// `window` rounds (all rounds if fewer).
struct FinalStats {
  double mean = 0.0;
  double stddev = 0.0;
};
FinalStats final_stats(const std::vector<RoundLog>& logs, std::size_t window = 10);

}  // namespace robustfl
