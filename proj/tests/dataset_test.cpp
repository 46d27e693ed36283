#include "robustfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include <gtest/gtest.h>

namespace robustfl {
namespace {

LabeledDataset tiny(std::vector<double> features, std::vector<int> labels, std::size_t f,
                    std::size_t c) {
  LabeledDataset ds;
  ds.n_features = f;
  ds.n_classes = c;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  return ds;
}

std::map<int, std::size_t> label_counts(const LabeledDataset& ds) {
  std::map<int, std::size_t> counts;
  for (int l : ds.labels) ++counts[l];
  return counts;
}

void expect_disjoint_and_valid(const PartitionPlan& plan, std::size_t n_rows) {
  std::set<std::size_t> seen;
  for (const auto& rows : plan.assignments) {
    for (auto r : rows) {
      EXPECT_LT(r, n_rows);
      EXPECT_TRUE(seen.insert(r).second) << "row " << r << " assigned twice";
    }
  }
}

TEST(Blobs, ShapeAndBalance) {
  const auto ds = generate_blobs(2, 5, 100, 1.0, 42);
  EXPECT_EQ(ds.size(), 200u);
  EXPECT_EQ(ds.n_features, 5u);
  EXPECT_EQ(ds.n_classes, 2u);
  EXPECT_EQ(label_counts(ds), (std::map<int, std::size_t>{{0, 100}, {1, 100}}));
  EXPECT_NO_THROW(ds.validate());
}

TEST(Blobs, NormalizedToUnitRange) {
  const auto ds = generate_blobs(10, 20, 50, 0.3, 1);
  const auto [mn, mx] = std::minmax_element(ds.features.begin(), ds.features.end());
  EXPECT_EQ(*mn, -1.0);
  EXPECT_EQ(*mx, 1.0);
}

TEST(Blobs, ZeroSpreadCollapsesEachClass) {
  const auto ds = generate_blobs(4, 6, 10, 0.0, 5);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const std::size_t first = static_cast<std::size_t>(ds.labels[r]) * 10;
    const auto a = ds.row(r), b = ds.row(first);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
  // Different classes sit at different centroids.
  const auto a = ds.row(0), b = ds.row(10);
  EXPECT_FALSE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(Blobs, ZeroSpreadCentroidsSeparatedInLowDimension) {
  // 1-D cannot host 5 distinct cube vertices; the fallback must still separate them.
  const auto ds = generate_blobs(5, 1, 3, 0.0, 8);
  std::set<double> centers(ds.features.begin(), ds.features.end());
  EXPECT_EQ(centers.size(), 5u);
}

TEST(Blobs, Deterministic) {
  EXPECT_EQ(generate_blobs(3, 4, 20, 1.0, 9), generate_blobs(3, 4, 20, 1.0, 9));
  EXPECT_NE(generate_blobs(3, 4, 20, 1.0, 9), generate_blobs(3, 4, 20, 1.0, 10));
}

TEST(Blobs, RejectsBadArguments) {
  EXPECT_THROW(generate_blobs(1, 4, 10, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(generate_blobs(2, 0, 10, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(generate_blobs(2, 4, 10, -1.0, 0), std::invalid_argument);
}

TEST(BlobSplit, SharesCentroids) {
  const auto split = generate_blob_split(3, 4, 20, 5, 0.0, 2);
  EXPECT_EQ(split.train.size(), 60u);
  EXPECT_EQ(split.test.size(), 15u);
  for (std::size_t r = 0; r < split.test.size(); ++r) {
    const auto t = split.test.row(r);
    const auto tr = split.train.row(static_cast<std::size_t>(split.test.labels[r]) * 20);
    EXPECT_TRUE(std::equal(t.begin(), t.end(), tr.begin()));
  }
}

TEST(Normalize, PixelEndpoints) {
  const auto ds = normalize(tiny({0, 255, 127.5}, {0, 0, 0}, 1, 1), -1, 1, 0, 255);
  EXPECT_EQ(ds.features, (std::vector<double>{-1.0, 1.0, 0.0}));
}

TEST(Normalize, DegenerateRangeMapsToMidpoint) {
  const auto ds = normalize(tiny({3, 3, 3, 3}, {0, 1}, 2, 2), 0, 1);
  EXPECT_EQ(ds.features, (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
}

TEST(Normalize, RejectsEmptyTarget) {
  EXPECT_THROW(normalize(tiny({1}, {0}, 1, 1), 1, 1), std::invalid_argument);
}

TEST(PartitionIid, EvenAndUneven) {
  const auto even = partition_iid(generate_blobs(2, 1, 50, 1.0, 0), 10, 3);
  for (const auto& rows : even.assignments) EXPECT_EQ(rows.size(), 10u);
  expect_disjoint_and_valid(even, 100);

  const auto ds = tiny(std::vector<double>(101, 0.0), std::vector<int>(101, 0), 1, 1);
  const auto uneven = partition_iid(ds, 10, 3);
  std::multiset<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& rows : uneven.assignments) {
    sizes.insert(rows.size());
    total += rows.size();
  }
  EXPECT_EQ(total, 101u);
  EXPECT_EQ(*sizes.rbegin() - *sizes.begin(), 1u);
  EXPECT_EQ(sizes.count(11), 1u);
  expect_disjoint_and_valid(uneven, 101);
}

TEST(PartitionIid, Deterministic) {
  const auto ds = generate_blobs(3, 2, 30, 1.0, 0);
  EXPECT_EQ(partition_iid(ds, 7, 11).assignments, partition_iid(ds, 7, 11).assignments);
  EXPECT_NE(partition_iid(ds, 7, 11).assignments, partition_iid(ds, 7, 12).assignments);
}

TEST(PartitionShards, TwoClassesTwoClients) {
  const auto ds = generate_blobs(2, 3, 50, 1.0, 4);
  const auto plan = partition_noniid_shards(ds, 2, 1, 50, 6);
  ASSERT_EQ(plan.assignments.size(), 2u);
  std::set<int> client_labels;
  for (const auto& rows : plan.assignments) {
    ASSERT_EQ(rows.size(), 50u);
    std::set<int> labels;
    for (auto r : rows) labels.insert(ds.labels[r]);
    ASSERT_EQ(labels.size(), 1u);
    client_labels.insert(*labels.begin());
  }
  EXPECT_EQ(client_labels, (std::set<int>{0, 1}));
  expect_disjoint_and_valid(plan, ds.size());
}

TEST(PartitionShards, LabelCardinalityBoundedByShards) {
  const auto ds = generate_blobs(10, 2, 60, 1.0, 4);
  const auto plan = partition_noniid_shards(ds, 20, 2, 15, 8);
  for (const auto& rows : plan.assignments) {
    EXPECT_EQ(rows.size(), 30u);
    std::set<int> labels;
    for (auto r : rows) labels.insert(ds.labels[r]);
    EXPECT_LE(labels.size(), 2u);
  }
  expect_disjoint_and_valid(plan, ds.size());
}

TEST(PartitionShards, InsufficientSamplesThrows) {
  const auto ds = generate_blobs(2, 2, 10, 1.0, 4);
  EXPECT_THROW(partition_noniid_shards(ds, 3, 2, 5, 0), std::invalid_argument);
  EXPECT_NO_THROW(partition_noniid_shards(ds, 2, 2, 5, 0));
}

TEST(Noise, StaysWithinClipBounds) {
  const auto ds = generate_blobs(3, 5, 40, 1.0, 1);
  const auto noisy = apply_noise(ds, -1.4, 1.4, -1.0, 1.0, 2);
  EXPECT_EQ(noisy.size(), ds.size());
  EXPECT_EQ(noisy.labels, ds.labels);
  EXPECT_NE(noisy.features, ds.features);
  for (double x : noisy.features) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
  const auto spam = apply_noise(ds, -0.5, 1.5, 0.0, 1.0, 2);
  for (double x : spam.features) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST(Noise, ZeroWidthOnlyClips) {
  const auto ds = tiny({-2.0, -0.5, 0.25, 3.0}, {0, 0}, 2, 1);
  const auto out = apply_noise(ds, 0.0, 0.0, -1.0, 1.0, 5);
  EXPECT_EQ(out.features, (std::vector<double>{-1.0, -0.5, 0.25, 1.0}));
}

TEST(Noise, RejectsBadBounds) {
  const auto ds = tiny({0.0}, {0}, 1, 1);
  EXPECT_THROW(apply_noise(ds, 1.0, -1.0, -1.0, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(apply_noise(ds, -1.0, 1.0, 1.0, -1.0, 0), std::invalid_argument);
}

TEST(FlipLabels, Examples) {
  const auto ds = tiny({1, 2, 3}, {0, 1, 2}, 1, 3);
  const auto flipped = flip_labels(ds, 0);
  EXPECT_EQ(flipped.labels, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(flipped.features, ds.features);
  EXPECT_EQ(flip_labels(flipped, 0), flipped);
  EXPECT_THROW(flip_labels(ds, 3), std::invalid_argument);
  EXPECT_THROW(flip_labels(ds, -1), std::invalid_argument);
}

TEST(Validate, CatchesBrokenDatasets) {
  EXPECT_THROW(tiny({1, 2}, {0}, 1, 2).validate(), std::invalid_argument);
  EXPECT_THROW(tiny({1}, {2}, 1, 2).validate(), std::invalid_argument);
  EXPECT_THROW(tiny({NAN}, {0}, 1, 2).validate(), std::invalid_argument);
}

TEST(DatasetFile, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "robustfl_dataset_test.bin";
  const auto ds = generate_blobs(3, 7, 11, 0.4, 13);
  save_dataset(ds, path);
  EXPECT_EQ(load_dataset(path), ds);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(load_dataset(path), std::runtime_error);
  std::filesystem::remove(path);
  EXPECT_THROW(load_dataset(path), std::runtime_error);
}

}  // namespace
}  // namespace robustfl
