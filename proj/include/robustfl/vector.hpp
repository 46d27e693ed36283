#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace robustfl {

/// Raised when two vectors that must share a dimension do not.
class DimensionMismatch : public std::invalid_argument {
public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs);
};

/// Flat parameter (or pseudo-gradient) vector with a fixed dimension.
///
/// Elements may be written in place but the dimension never changes after
/// construction. All arithmetic is carried out in double precision.
class ParamVector {
public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
  explicit ParamVector(std::span<const double> values)
      : values_(values.begin(), values.end()) {}

  std::size_t dim() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
  std::vector<double> values_;
};

/// One client's submission for a round.
struct ClientUpdate {
  std::size_t round_index = 0;
  std::size_t slot = 0;  // position within the round roster, not a client id
  ParamVector model;
  std::size_t sample_count = 1;
};

/// Norms below this are treated as carrying no direction.
inline constexpr double kZeroNormEpsilon = 1e-12;

double dot(const ParamVector& a, const ParamVector& b);
double norm(const ParamVector& a);

/// Cosine similarity clamped to [-1, 1]; 0 when either norm is below
/// kZeroNormEpsilon.
double cosine_similarity(const ParamVector& a, const ParamVector& b);

double euclidean_distance(const ParamVector& a, const ParamVector& b);

/// alpha * x + y
ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y);
ParamVector scale(double alpha, const ParamVector& x);
/// a - b
ParamVector subtract(const ParamVector& a, const ParamVector& b);

void require_same_dim(const ParamVector& a, const ParamVector& b);

}  // namespace robustfl
