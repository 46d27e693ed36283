#include "robustfl/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "robustfl/rng.hpp"

namespace robustfl {

void LabeledDataset::validate() const {
  if (n_classes == 0) throw std::invalid_argument("dataset: n_classes must be positive");
  if (features.size() != labels.size() * n_features)
    throw std::invalid_argument("dataset: feature matrix does not match row count");
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
      throw std::invalid_argument("dataset: label " + std::to_string(label) +
                                  " out of range");
  }
  for (double x : features) {
    if (std::isnan(x)) throw std::invalid_argument("dataset: NaN feature");
  }
}

namespace {

std::vector<double> place_centroids(std::size_t n_classes, std::size_t dim, Rng rng) {
  // Distinct hypercube vertices (coordinates +-1) when the cube has enough
  // corners, otherwise unit-variance Gaussian draws at least 1 apart.
  const bool on_cube = dim >= 64 || (std::uint64_t{1} << dim) >= n_classes;
  const double min_separation = on_cube ? 2.0 : 1.0;
  constexpr int kMaxTries = 1000;
  std::vector<double> centroids(n_classes * dim);
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::span<double> mine(centroids.data() + c * dim, dim);
    for (int attempt = 0;; ++attempt) {
      for (auto& x : mine) x = on_cube ? (rng.uniform01() < 0.5 ? -1.0 : 1.0) : rng.normal();
      bool separated = true;
      for (std::size_t other = 0; other < c && separated; ++other) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double d = mine[k] - centroids[other * dim + k];
          d2 += d * d;
        }
        separated = std::sqrt(d2) >= min_separation;
      }
      if (separated) break;
      if (attempt >= kMaxTries)
        throw std::runtime_error("generate_blobs: cannot separate centroids");
    }
  }
  return centroids;
}

}  // namespace

LabeledDataset generate_blobs(std::size_t n_classes, std::size_t dim,
                              std::size_t samples_per_class, double spread,
                              std::uint64_t seed) {
  if (n_classes < 2) throw std::invalid_argument("generate_blobs: need at least 2 classes");
  if (dim < 1) throw std::invalid_argument("generate_blobs: dim must be positive");
  if (!(spread >= 0.0)) throw std::invalid_argument("generate_blobs: spread must be >= 0");

  const Rng root(seed);
  const auto centroids = place_centroids(n_classes, dim, root.split(0));
  Rng noise = root.split(1);

  LabeledDataset out;
  out.n_features = dim;
  out.n_classes = n_classes;
  out.features.resize(n_classes * samples_per_class * dim);
  out.labels.resize(n_classes * samples_per_class);
  std::size_t r = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s, ++r) {
      out.labels[r] = static_cast<int>(c);
      auto row = out.row(r);
      for (std::size_t k = 0; k < dim; ++k) {
        row[k] = centroids[c * dim + k];
        if (spread > 0.0) row[k] += spread * noise.normal();
      }
    }
  }
  return normalize(std::move(out), -1.0, 1.0);
}

TrainTestSplit generate_blob_split(std::size_t n_classes, std::size_t dim,
                                   std::size_t train_per_class,
                                   std::size_t test_per_class, double spread,
                                   std::uint64_t seed) {
  const std::size_t per_class = train_per_class + test_per_class;
  const auto all = generate_blobs(n_classes, dim, per_class, spread, seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t s = 0; s < per_class; ++s) {
      (s < train_per_class ? train_rows : test_rows).push_back(c * per_class + s);
    }
  }
  return {subset(all, train_rows), subset(all, test_rows)};
}

LabeledDataset normalize(LabeledDataset dataset, double lo, double hi, double raw_lo,
                         double raw_hi) {
  if (!(hi > lo)) throw std::invalid_argument("normalize: hi must exceed lo");
  if (raw_hi == raw_lo) {
    std::fill(dataset.features.begin(), dataset.features.end(), lo + 0.5 * (hi - lo));
    return dataset;
  }
  const double factor = (hi - lo) / (raw_hi - raw_lo);
  for (auto& x : dataset.features) x = lo + (x - raw_lo) * factor;
  return dataset;
}

LabeledDataset normalize(LabeledDataset dataset, double lo, double hi) {
  if (dataset.features.empty()) return dataset;
  const auto [mn, mx] =
      std::minmax_element(dataset.features.begin(), dataset.features.end());
  const double raw_lo = *mn;
  const double raw_hi = *mx;
  return normalize(std::move(dataset), lo, hi, raw_lo, raw_hi);
}

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> rows) {
  LabeledDataset out;
  out.n_features = dataset.n_features;
  out.n_classes = dataset.n_classes;
  out.features.reserve(rows.size() * dataset.n_features);
  out.labels.reserve(rows.size());
  for (auto r : rows) {
    if (r >= dataset.size()) throw std::out_of_range("subset: row index out of range");
    const auto src = dataset.row(r);
    out.features.insert(out.features.end(), src.begin(), src.end());
    out.labels.push_back(dataset.labels[r]);
  }
  return out;
}

PartitionPlan partition_iid(const LabeledDataset& dataset, std::size_t n_clients,
                            std::uint64_t seed) {
  if (n_clients < 1) throw std::invalid_argument("partition_iid: need at least one client");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  PartitionPlan plan;
  plan.scheme = PartitionScheme::iid;
  plan.assignments.resize(n_clients);
  for (std::size_t i = 0; i < order.size(); ++i)
    plan.assignments[i % n_clients].push_back(order[i]);
  return plan;
}

PartitionPlan partition_noniid_shards(const LabeledDataset& dataset,
                                      std::size_t n_clients,
                                      std::size_t shards_per_client,
                                      std::size_t shard_size, std::uint64_t seed) {
  if (n_clients < 1 || shards_per_client < 1 || shard_size < 1)
    throw std::invalid_argument("partition_noniid_shards: counts must be positive");
  const std::size_t needed = n_clients * shards_per_client;
  const std::size_t available = dataset.size() / shard_size;
  if (needed > available)
    throw std::invalid_argument("partition_noniid_shards: insufficient samples (need " +
                                std::to_string(needed * shard_size) + ", have " +
                                std::to_string(dataset.size()) + ")");

  std::vector<std::size_t> sorted(dataset.size());
  std::iota(sorted.begin(), sorted.end(), std::size_t{0});
  std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
    return dataset.labels[a] < dataset.labels[b];
  });

  std::vector<std::size_t> shards(available);
  std::iota(shards.begin(), shards.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(shards);

  PartitionPlan plan;
  plan.scheme = PartitionScheme::noniid_shards;
  plan.assignments.resize(n_clients);
  for (std::size_t k = 0; k < needed; ++k) {
    auto& rows = plan.assignments[k / shards_per_client];
    const std::size_t start = shards[k] * shard_size;
    rows.insert(rows.end(), sorted.begin() + static_cast<std::ptrdiff_t>(start),
                sorted.begin() + static_cast<std::ptrdiff_t>(start + shard_size));
  }
  return plan;
}

LabeledDataset apply_noise(LabeledDataset dataset, double low, double high,
                           double clip_lo, double clip_hi, std::uint64_t seed) {
  if (high < low) throw std::invalid_argument("apply_noise: high must be >= low");
  if (!(clip_hi > clip_lo)) throw std::invalid_argument("apply_noise: clip bounds out of order");
  Rng rng(seed);
  for (auto& x : dataset.features)
    x = std::clamp(x + rng.uniform(low, high), clip_lo, clip_hi);
  return dataset;
}

LabeledDataset flip_labels(LabeledDataset dataset, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= dataset.n_classes)
    throw std::invalid_argument("flip_labels: target " + std::to_string(target) +
                                " out of range");
  std::fill(dataset.labels.begin(), dataset.labels.end(), target);
  return dataset;
}

namespace {

constexpr char kDatasetMagic[8] = {'R', 'F', 'L', 'D', 'S', 'E', 'T', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8))
    throw std::runtime_error("dataset file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kDatasetMagic, sizeof kDatasetMagic);
  put_u64(os, dataset.size());
  put_u64(os, dataset.n_features);
  put_u64(os, dataset.n_classes);
  for (double x : dataset.features) put_u64(os, std::bit_cast<std::uint64_t>(x));
  for (int label : dataset.labels) {
    const auto u = static_cast<std::uint32_t>(label);
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    os.write(bytes, 4);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kDatasetMagic))
    throw std::runtime_error("not a dataset file: " + path.string());
  const auto rows = get_u64(is);
  LabeledDataset out;
  out.n_features = get_u64(is);
  out.n_classes = get_u64(is);
  out.features.resize(rows * out.n_features);
  for (auto& x : out.features) x = std::bit_cast<double>(get_u64(is));
  out.labels.resize(rows);
  for (auto& label : out.labels) {
    unsigned char bytes[4];
    if (!is.read(reinterpret_cast<char*>(bytes), 4))
      throw std::runtime_error("dataset file truncated");
    const std::uint32_t u = bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) |
                            (static_cast<std::uint32_t>(bytes[3]) << 24);
    label = static_cast<int>(u);
  }
  out.validate();
  return out;
}

}  // namespace robustfl
