#include "robustfl/vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robustfl {

DimensionMismatch::DimensionMismatch(std::size_t lhs, std::size_t rhs)
    : std::invalid_argument("dimension mismatch: " + std::to_string(lhs) + " vs " +
                            std::to_string(rhs)) {}

bool ParamVector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_dim(const ParamVector& a, const ParamVector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const ParamVector& a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

double cosine_similarity(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kZeroNormEpsilon || nb < kZeroNormEpsilon) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double euclidean_distance(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

ParamVector axpy(double alpha, const ParamVector& x, const ParamVector& y) {
  require_same_dim(x, y);
  ParamVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

ParamVector scale(double alpha, const ParamVector& x) {
  ParamVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = alpha * x[i];
  return out;
}

ParamVector subtract(const ParamVector& a, const ParamVector& b) {
  require_same_dim(a, b);
  ParamVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace robustfl
