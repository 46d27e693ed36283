#include "robustfl/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace robustfl {
namespace {

std::vector<ClientUpdate> updates_of(std::vector<ParamVector> models,
                                     std::vector<std::size_t> counts = {}) {
  std::vector<ClientUpdate> out;
  for (std::size_t i = 0; i < models.size(); ++i)
    out.push_back({0, i, std::move(models[i]), counts.empty() ? 1 : counts[i]});
  return out;
}

std::vector<ClientUpdate> random_updates(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> dist(0.0, 5.0);
  std::uniform_int_distribution<std::size_t> count(1, 50);
  std::vector<ClientUpdate> out;
  for (std::size_t i = 0; i < n; ++i) {
    ParamVector v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = dist(gen);
    out.push_back({0, i, v, count(gen)});
  }
  return out;
}

TEST(FedAvg, Examples) {
  EXPECT_EQ(fed_avg(updates_of({{1.5, -2}})), ParamVector({1.5, -2}));
  EXPECT_EQ(fed_avg(updates_of({{1, 3}, {3, 5}})), ParamVector({2, 4}));
  EXPECT_EQ(fed_avg(updates_of({{0}, {4}}, {1, 3})), ParamVector({3}));
  EXPECT_THROW(fed_avg({}), std::invalid_argument);
  EXPECT_THROW(fed_avg(updates_of({{1}, {1, 2}})), DimensionMismatch);
}

TEST(FedAvg, EqualCountsGiveUnweightedMean) {
  std::mt19937_64 gen(1);
  auto ups = random_updates(gen, 7, 5);
  for (auto& u : ups) u.sample_count = 4;
  const auto avg = fed_avg(ups);
  for (std::size_t k = 0; k < 5; ++k) {
    double sum = 0.0;
    for (const auto& u : ups) sum += u.model[k];
    EXPECT_NEAR(avg[k], sum / 7.0, 1e-12);
  }
}

TEST(Median, Examples) {
  EXPECT_EQ(coordinate_median(updates_of({{1}, {2}, {100}})), ParamVector({2}));
  EXPECT_EQ(coordinate_median(updates_of({{1}, {3}})), ParamVector({2}));
  const ParamVector u{0.5, -7, 3};
  EXPECT_EQ(coordinate_median(updates_of({u, u, u, u})), u);
  EXPECT_THROW(coordinate_median({}), std::invalid_argument);
}

TEST(Median, BreakdownSanity) {
  const ParamVector u{0.3, -1.2, 4.0, 0.0};
  std::vector<ParamVector> models(10, u);
  for (std::size_t b = 0; b < 3; ++b) {
    ParamVector bad = u;
    bad[b] += 1e6;
    models.push_back(bad);
  }
  EXPECT_EQ(coordinate_median(updates_of(models)), u);
}

TEST(TrimmedMean, Examples) {
  EXPECT_EQ(trimmed_mean(updates_of({{0}, {1}, {2}, {3}, {1000}}), 0.2), ParamVector({2}));
  EXPECT_EQ(trimmed_mean(updates_of({{1}, {2}, {6}}), 0.1), ParamVector({3}));
  EXPECT_THROW(trimmed_mean(updates_of({{1}, {2}}), 0.5), std::invalid_argument);
  EXPECT_THROW(trimmed_mean(updates_of({{1}, {2}}), 0.0), std::invalid_argument);
  EXPECT_THROW(trimmed_mean({}, 0.1), std::invalid_argument);
}

TEST(TrimmedMean, MatchesSortOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ups = random_updates(gen, 10, 6);
    EXPECT_EQ(trimmed_mean(ups, 0.34), oracle::trimmed_mean(ups, 0.34));
  }
}

TEST(Krum, Examples) {
  const ParamVector u{1, 2, 3};
  EXPECT_EQ(krum(updates_of({u, u, u, u, u}), 1, 2), u);

  const auto line = updates_of({{0}, {0.1}, {0.2}, {100}});
  const auto scores = krum_scores(line, 1);
  EXPECT_DOUBLE_EQ(scores[0], 0.1);
  EXPECT_DOUBLE_EQ(scores[1], 0.1);
  EXPECT_DOUBLE_EQ(scores[2], 0.1);
  EXPECT_DOUBLE_EQ(scores[3], 99.8);
  EXPECT_EQ(krum_select(line, 1, 1), std::vector<std::size_t>{0});
  EXPECT_EQ(krum(line, 1, 1), ParamVector({0}));
}

TEST(Krum, RejectsTooFewUpdates) {
  const auto ups = updates_of({{0}, {1}, {2}, {3}});
  EXPECT_THROW(krum(ups, 2, 1), std::invalid_argument);
  EXPECT_THROW(krum(ups, 1, 2), std::invalid_argument);
  EXPECT_THROW(krum(ups, 1, 0), std::invalid_argument);
  EXPECT_NO_THROW(krum(ups, 0, 2));
}

TEST(Krum, MatchesExhaustiveOracle) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ups = random_updates(gen, 8, 4);
    const auto selected = krum_select(ups, 2, 3);
    EXPECT_EQ(selected, oracle::krum_selection(ups, 2, 3));
    ParamVector mean(4);
    for (auto i : selected) mean = axpy(1.0 / 3.0, ups[i].model, mean);
    const auto got = krum(ups, 2, 3);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got[k], mean[k], 1e-12);
  }
}

TEST(Aggregators, BoundedByInputs) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ups = random_updates(gen, 9, 5);
    const auto med = coordinate_median(ups);
    const auto tm = trimmed_mean(ups, 0.2);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto col = oracle::column(ups, k);
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      EXPECT_GE(med[k], *lo);
      EXPECT_LE(med[k], *hi);
      EXPECT_GE(tm[k], *lo);
      EXPECT_LE(tm[k], *hi);
    }
  }
}

TEST(Aggregators, PermutationInvariant) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ups = random_updates(gen, 9, 6);
    auto shuffled = ups;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    EXPECT_EQ(fed_avg(shuffled), fed_avg(ups));
    EXPECT_EQ(coordinate_median(shuffled), coordinate_median(ups));
    EXPECT_EQ(trimmed_mean(shuffled, 0.25), trimmed_mean(ups, 0.25));
    EXPECT_EQ(krum(shuffled, 2, 2), krum(ups, 2, 2));
  }
}

TEST(Aggregators, ParallelMatchesSerialReferenceBitwise) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(5, 25)(gen);
    const auto ups = random_updates(gen, n, 300);
    EXPECT_EQ(fed_avg(ups), reference::fed_avg(ups));
    EXPECT_EQ(coordinate_median(ups), reference::coordinate_median(ups));
    EXPECT_EQ(trimmed_mean(ups, 0.1), reference::trimmed_mean(ups, 0.1));
    EXPECT_EQ(krum_scores(ups, 2), reference::krum_scores(ups, 2));
  }
}

TEST(Aggregate, DispatchesBaselines) {
  const auto ups = updates_of({{0}, {1}, {2}, {3}, {1000}});
  EXPECT_EQ(aggregate(AggregationRule::fed_avg(), ups), fed_avg(ups));
  EXPECT_EQ(aggregate(AggregationRule::coordinate_median(), ups), ParamVector({2}));
  EXPECT_EQ(aggregate(AggregationRule::trimmed_mean(0.2), ups), ParamVector({2}));
  EXPECT_EQ(aggregate(AggregationRule::krum(1, 1), ups), krum(ups, 1, 1));
  EXPECT_THROW(aggregate(AggregationRule::stpa(), ups), std::invalid_argument);
}

TEST(AggregationRuleTest, Validation) {
  EXPECT_NO_THROW(AggregationRule::trimmed_mean(0.1).validate());
  EXPECT_THROW(AggregationRule::trimmed_mean(0.5).validate(), std::invalid_argument);
  EXPECT_THROW(AggregationRule::krum(1, 0).validate(), std::invalid_argument);
  EXPECT_EQ(to_string(AggregationRule::Kind::coordinate_median), "coordinate_median");
}

}  // namespace
}  // namespace robustfl
