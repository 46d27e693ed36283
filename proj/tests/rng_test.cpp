#include "robustfl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace robustfl {
namespace {

std::vector<std::uint64_t> draws(Rng rng, int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(rng.next_u64());
  return out;
}

TEST(Rng, SameSeedSameSequence) {
  EXPECT_EQ(draws(Rng(42), 100), draws(Rng(42), 100));
  EXPECT_NE(draws(Rng(42), 100), draws(Rng(43), 100));
}

TEST(Rng, SplitIgnoresParentConsumption) {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 50; ++i) b.next_u64();
  EXPECT_EQ(draws(a.split(3), 20), draws(b.split(3), 20));
  EXPECT_EQ(draws(a.split({3, 9}), 20), draws(a.split(3).split(9), 20));
}

TEST(Rng, DistinctStreamsDiffer) {
  const Rng root(7);
  EXPECT_NE(draws(root.split(1), 10), draws(root.split(2), 10));
  EXPECT_NE(draws(root.split({1, 2}), 10), draws(root.split({2, 1}), 10));
  EXPECT_NE(draws(root, 10), draws(root.split(0), 10));
}

TEST(Rng, UniformRangeAndMoments) {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1.4, 1.4);
    ASSERT_GE(x, -1.4);
    ASSERT_LT(x, 1.4);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(3.0, 2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 3.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 2.0, 0.02);
}

TEST(Rng, BelowIsUniformAndInRange) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7, 400);
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Rng, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng(9).shuffle(a);
  Rng(9).shuffle(b);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(sorted, expected);
  EXPECT_NE(a, expected);
}

}  // namespace
}  // namespace robustfl
