#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace robustfl {

/// Dense labeled dataset, features stored row-major.
struct LabeledDataset {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
  std::span<double> row(std::size_t i) {
    return {features.data() + i * n_features, n_features};
  }

  /// Throws std::invalid_argument if shapes disagree, a label is out of
  /// range or a feature is NaN.
  void validate() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

enum class PartitionScheme { iid, noniid_shards };

struct PartitionPlan {
  PartitionScheme scheme = PartitionScheme::iid;
  std::vector<std::vector<std::size_t>> assignments;  // one row list per client
};

/// Isotropic Gaussian blobs around per-class centroids, class-major row order,
/// globally normalized to [-1, 1].
LabeledDataset generate_blobs(std::size_t n_classes, std::size_t dim,
                              std::size_t samples_per_class, double spread,
                              std::uint64_t seed);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Draws train_per_class + test_per_class blob samples from one set of
/// centroids and splits each class's rows: the first train_per_class go to
/// the training set.
TrainTestSplit generate_blob_split(std::size_t n_classes, std::size_t dim,
                                   std::size_t train_per_class,
                                   std::size_t test_per_class, double spread,
                                   std::uint64_t seed);

/// Affine map of [raw_lo, raw_hi] onto [lo, hi]. A degenerate raw range maps
/// every feature to the midpoint of [lo, hi].
LabeledDataset normalize(LabeledDataset dataset, double lo, double hi, double raw_lo,
                         double raw_hi);
/// Same, using the observed min/max over all features as the raw range.
LabeledDataset normalize(LabeledDataset dataset, double lo, double hi);

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> rows);

PartitionPlan partition_iid(const LabeledDataset& dataset, std::size_t n_clients,
                            std::uint64_t seed);

/// Rows are stably sorted by label and cut into consecutive shards of
/// shard_size rows. The full shards are shuffled and the first
/// n_clients * shards_per_client are dealt out; the rest are dropped.
PartitionPlan partition_noniid_shards(const LabeledDataset& dataset,
                                      std::size_t n_clients,
                                      std::size_t shards_per_client,
                                      std::size_t shard_size, std::uint64_t seed);

/// x <- clip(x + u, clip_lo, clip_hi), u ~ U(low, high) drawn per element.
LabeledDataset apply_noise(LabeledDataset dataset, double low, double high,
                           double clip_lo, double clip_hi, std::uint64_t seed);

LabeledDataset flip_labels(LabeledDataset dataset, int target);

/// Binary dataset file:
///   bytes 0..7   ASCII "RFLDSET1"
///   u64 LE       rows
///   u64 LE       n_features
///   u64 LE       n_classes
///   f64 LE       rows * n_features features, row-major
///   i32 LE       rows labels
void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace robustfl
