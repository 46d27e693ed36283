#include "robustfl/vector.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace robustfl {
namespace {

TEST(Dot, Examples) {
  EXPECT_EQ(dot({1, 2}, {3, 4}), 11.0);
  EXPECT_EQ(dot({1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(dot({3.5, -2, 7}, ParamVector(3)), 0.0);
}

TEST(Dot, DimensionMismatchThrows) {
  EXPECT_THROW(dot({1, 2}, {1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(cosine_similarity({1}, {1, 2}), DimensionMismatch);
  EXPECT_THROW(euclidean_distance({1}, {1, 2}), DimensionMismatch);
  EXPECT_THROW(axpy(1.0, {1}, {1, 2}), DimensionMismatch);
  EXPECT_THROW(subtract({1}, {1, 2}), DimensionMismatch);
}

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine_similarity({1, 2}, {2, 4}), 1.0);
  EXPECT_EQ(cosine_similarity({1, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity({1, 2}, {-1, -2}), -1.0);
  EXPECT_EQ(cosine_similarity({0, 0}, {1, 1}), 0.0);
  EXPECT_EQ(cosine_similarity({1e-13, 0}, {1, 1}), 0.0);
}

TEST(Distance, Examples) {
  EXPECT_EQ(euclidean_distance({0, 0}, {3, 4}), 5.0);
  EXPECT_EQ(euclidean_distance({1.5, -2}, {1.5, -2}), 0.0);
  EXPECT_EQ(euclidean_distance({1}, {-1}), 2.0);
}

TEST(Axpy, Examples) {
  EXPECT_EQ(axpy(2.0, {1, 1}, {0, 1}), ParamVector({2, 3}));
  const ParamVector x{0.25, -3, 8}, y{1, 2, 3};
  EXPECT_EQ(axpy(0.0, x, y), y);
  EXPECT_EQ(axpy(1.0, x, ParamVector(3)), x);
  EXPECT_EQ(scale(-2.0, x), ParamVector({-0.5, 6, -16}));
  EXPECT_EQ(subtract(y, x), ParamVector({0.75, 5, -5}));
}

TEST(ParamVectorTest, FiniteCheck) {
  EXPECT_TRUE(ParamVector({1, 2}).all_finite());
  EXPECT_FALSE(ParamVector({1, NAN}).all_finite());
  EXPECT_FALSE(ParamVector({INFINITY, 0}).all_finite());
}

class VectorProperties : public ::testing::Test {
protected:
  ParamVector random_vector(std::size_t dim) {
    std::normal_distribution<double> dist(0.0, 3.0);
    ParamVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = dist(gen_);
    return v;
  }
  std::size_t random_dim() { return std::uniform_int_distribution<std::size_t>(1, 40)(gen_); }

  std::mt19937_64 gen_{1234};
};

TEST_F(VectorProperties, CosineSymmetricBoundedScaleInvariant) {
  for (int trial = 0; trial < 500; ++trial) {
    const auto dim = random_dim();
    const auto a = random_vector(dim);
    const auto b = random_vector(dim);
    const double s = cosine_similarity(a, b);
    EXPECT_EQ(s, cosine_similarity(b, a));
    EXPECT_LE(std::abs(s), 1.0);
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(gen_);
    EXPECT_NEAR(cosine_similarity(scale(c, a), b), s, 1e-12);
  }
}

TEST_F(VectorProperties, SelfSimilarityIsOne) {
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_vector(random_dim());
    EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);
  }
}

TEST_F(VectorProperties, TriangleInequality) {
  for (int trial = 0; trial < 500; ++trial) {
    const auto dim = random_dim();
    const auto a = random_vector(dim), b = random_vector(dim), c = random_vector(dim);
    EXPECT_LE(euclidean_distance(a, c),
              euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12);
  }
}

TEST_F(VectorProperties, DotMatchesLeftToRightSum) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto dim = random_dim();
    const auto a = random_vector(dim), b = random_vector(dim);
    double expected = 0.0;
    for (std::size_t i = 0; i < dim; ++i) expected += a[i] * b[i];
    EXPECT_EQ(dot(a, b), expected);
  }
}

}  // namespace
}  // namespace robustfl
