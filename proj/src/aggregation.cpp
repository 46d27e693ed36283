#include "robustfl/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace robustfl {

void AggregationRule::validate() const {
  switch (kind) {
    case Kind::trimmed_mean:
      if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("trimmed_mean: gamma must lie in (0, 0.5)");
      break;
    case Kind::krum:
      if (m < 1) throw std::invalid_argument("krum: m must be >= 1");
      break;
    default:
      break;
  }
}

std::string to_string(AggregationRule::Kind kind) {
  switch (kind) {
    case AggregationRule::Kind::fed_avg: return "fed_avg";
    case AggregationRule::Kind::coordinate_median: return "coordinate_median";
    case AggregationRule::Kind::trimmed_mean: return "trimmed_mean";
    case AggregationRule::Kind::krum: return "krum";
    case AggregationRule::Kind::stpa: return "stpa";
  }
  return "unknown";
}

namespace detail {

void require_updates(std::span<const ClientUpdate> updates, const char* who) {
  if (updates.empty()) throw std::invalid_argument(std::string(who) + ": no updates");
  for (const auto& u : updates) require_same_dim(u.model, updates.front().model);
}

std::vector<std::size_t> slot_order(std::span<const ClientUpdate> updates) {
  std::vector<std::size_t> order(updates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return updates[a].slot < updates[b].slot;
  });
  return order;
}

std::size_t trim_count(std::size_t n, double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("trimmed_mean: gamma must lie in (0, 0.5)");
  const auto k = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n)));
  if (n < 2 * k + 1) throw std::invalid_argument("trimmed_mean: too few survivors");
  return k;
}

void check_krum(std::size_t n, std::size_t f, std::size_t m) {
  if (n < f + 3)
    throw std::invalid_argument("krum: need n - f - 2 >= 1 (n=" + std::to_string(n) +
                                ", f=" + std::to_string(f) + ")");
  if (m < 1 || m > n - f - 2)
    throw std::invalid_argument("krum: m must lie in [1, n - f - 2]");
}

}  // namespace detail

ParamVector fed_avg(std::span<const ClientUpdate> updates) {
  detail::require_updates(updates, "fed_avg");
  const auto order = detail::slot_order(updates);
  double total = 0.0;
  for (auto k : order) total += static_cast<double>(updates[k].sample_count);
  std::vector<double> weights(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    weights[i] = static_cast<double>(updates[order[i]].sample_count) / total;

  const std::size_t dim = updates.front().model.dim();
  ParamVector out(dim);
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) acc += weights[j] * updates[order[j]].model[i];
    out[i] = acc;
  }
  return out;
}

ParamVector coordinate_median(std::span<const ClientUpdate> updates) {
  detail::require_updates(updates, "coordinate_median");
  const std::size_t count = updates.size();
  const std::size_t dim = updates.front().model.dim();
  const std::size_t mid = count / 2;
  ParamVector out(dim);
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel
  {
    std::vector<double> column(count);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < count; ++k) column[k] = updates[k].model[i];
      std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid),
                       column.end());
      const double upper = column[mid];
      if (count % 2 == 1) {
        out[i] = upper;
      } else {
        const double lower = *std::max_element(
            column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid));
        out[i] = (lower + upper) / 2.0;
      }
    }
  }
  return out;
}

ParamVector trimmed_mean(std::span<const ClientUpdate> updates, double gamma) {
  detail::require_updates(updates, "trimmed_mean");
  const std::size_t count = updates.size();
  const std::size_t trim = detail::trim_count(count, gamma);
  const std::size_t dim = updates.front().model.dim();
  const auto lo = static_cast<std::ptrdiff_t>(trim);
  const auto hi = static_cast<std::ptrdiff_t>(count - trim);
  const auto kept = static_cast<double>(count - 2 * trim);
  ParamVector out(dim);
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel
  {
    std::vector<double> column(count);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < count; ++k) column[k] = updates[k].model[i];
      auto first = column.begin();
      if (trim > 0) {
        std::nth_element(first, first + lo, column.end());
        std::nth_element(first + lo, first + hi - 1, column.end());
      }
      // Survivors are summed in ascending order.
      std::sort(first + lo, first + hi);
      double acc = 0.0;
      for (auto it = first + lo; it != first + hi; ++it) acc += *it;
      out[i] = acc / kept;
    }
  }
  return out;
}

namespace {

std::vector<double> scores_from_distances(const std::vector<double>& dist, std::size_t count,
                                          std::size_t neighbors) {
  std::vector<double> scores(count);
  std::vector<double> row;
  row.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    row.clear();
    for (std::size_t j = 0; j < count; ++j)
      if (j != k) row.push_back(dist[k * count + j]);
    std::sort(row.begin(), row.end());
    double acc = 0.0;
    for (std::size_t j = 0; j < neighbors; ++j) acc += row[j];
    scores[k] = acc;
  }
  return scores;
}

}  // namespace

std::vector<double> krum_scores(std::span<const ClientUpdate> updates, std::size_t f) {
  detail::require_updates(updates, "krum");
  const std::size_t count = updates.size();
  detail::check_krum(count, f, 1);
  std::vector<double> dist(count * count, 0.0);
  const auto pairs = static_cast<std::ptrdiff_t>(count * count);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t p = 0; p < pairs; ++p) {
    const auto i = static_cast<std::size_t>(p) / count;
    const auto j = static_cast<std::size_t>(p) % count;
    if (i < j) {
      const double d = euclidean_distance(updates[i].model, updates[j].model);
      dist[i * count + j] = d;
      dist[j * count + i] = d;
    }
  }
  return scores_from_distances(dist, count, count - f - 2);
}

std::vector<std::size_t> krum_select(std::span<const ClientUpdate> updates,
                                     std::size_t f, std::size_t m) {
  detail::require_updates(updates, "krum");
  detail::check_krum(updates.size(), f, m);
  const auto scores = krum_scores(updates, f);
  auto order = detail::slot_order(updates);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  order.resize(m);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return updates[a].slot < updates[b].slot;
  });
  return order;
}

ParamVector krum(std::span<const ClientUpdate> updates, std::size_t f, std::size_t m) {
  const auto chosen = krum_select(updates, f, m);
  ParamVector out(updates.front().model.dim());
  for (auto k : chosen)
    for (std::size_t i = 0; i < out.dim(); ++i) out[i] += updates[k].model[i];
  const double inv = 1.0 / static_cast<double>(chosen.size());
  for (auto& v : out.values()) v *= inv;
  return out;
}

ParamVector aggregate(const AggregationRule& rule, std::span<const ClientUpdate> updates) {
  rule.validate();
  switch (rule.kind) {
    case AggregationRule::Kind::fed_avg: return fed_avg(updates);
    case AggregationRule::Kind::coordinate_median: return coordinate_median(updates);
    case AggregationRule::Kind::trimmed_mean: return trimmed_mean(updates, rule.gamma);
    case AggregationRule::Kind::krum: return krum(updates, rule.f, rule.m);
    case AggregationRule::Kind::stpa: break;
  }
  throw std::invalid_argument("aggregate: stpa needs round state; use stpa_round");
}

}  // namespace robustfl
