// Serial baselines for the OpenMP aggregation kernels.

#include <algorithm>
#include <vector>

#include "robustfl/aggregation.hpp"

namespace robustfl::reference {

namespace {

std::vector<double> column(std::span<const ClientUpdate> updates, std::size_t i) {
  std::vector<double> values(updates.size());
  for (std::size_t k = 0; k < updates.size(); ++k) values[k] = updates[k].model[i];
  return values;
}

}  // namespace

ParamVector fed_avg(std::span<const ClientUpdate> updates) {
  detail::require_updates(updates, "fed_avg");
  const auto order = detail::slot_order(updates);
  double total = 0.0;
  for (auto k : order) total += static_cast<double>(updates[k].sample_count);
  ParamVector out(updates.front().model.dim());
  for (std::size_t i = 0; i < out.dim(); ++i) {
    double acc = 0.0;
    for (auto k : order)
      acc += static_cast<double>(updates[k].sample_count) / total * updates[k].model[i];
    out[i] = acc;
  }
  return out;
}

ParamVector coordinate_median(std::span<const ClientUpdate> updates) {
  detail::require_updates(updates, "coordinate_median");
  const std::size_t n = updates.size();
  ParamVector out(updates.front().model.dim());
  for (std::size_t i = 0; i < out.dim(); ++i) {
    auto values = column(updates, i);
    std::sort(values.begin(), values.end());
    out[i] = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  }
  return out;
}

ParamVector trimmed_mean(std::span<const ClientUpdate> updates, double gamma) {
  detail::require_updates(updates, "trimmed_mean");
  const std::size_t n = updates.size();
  const std::size_t trim = detail::trim_count(n, gamma);
  ParamVector out(updates.front().model.dim());
  for (std::size_t i = 0; i < out.dim(); ++i) {
    auto values = column(updates, i);
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (std::size_t k = trim; k < n - trim; ++k) acc += values[k];
    out[i] = acc / static_cast<double>(n - 2 * trim);
  }
  return out;
}

std::vector<double> krum_scores(std::span<const ClientUpdate> updates, std::size_t f) {
  detail::require_updates(updates, "krum");
  const std::size_t n = updates.size();
  detail::check_krum(n, f, 1);
  std::vector<double> scores(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) d.push_back(euclidean_distance(updates[k].model, updates[j].model));
    std::sort(d.begin(), d.end());
    double acc = 0.0;
    for (std::size_t j = 0; j < n - f - 2; ++j) acc += d[j];
    scores[k] = acc;
  }
  return scores;
}

}  // namespace robustfl::reference
