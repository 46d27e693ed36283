#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robustfl/vector.hpp"

namespace robustfl {

/// Server-side rule combining a round's client models.
struct AggregationRule {
  enum class Kind { fed_avg, coordinate_median, trimmed_mean, krum, stpa };

  Kind kind = Kind::fed_avg;
  double gamma = 0.1;     // trimmed_mean: trim rate per side, in (0, 0.5)
  std::size_t f = 0;      // krum: assumed Byzantine count
  std::size_t m = 1;      // krum: number of selected updates averaged

  static AggregationRule fed_avg() { return {Kind::fed_avg}; }
  static AggregationRule coordinate_median() { return {Kind::coordinate_median}; }
  static AggregationRule trimmed_mean(double gamma) {
    return {Kind::trimmed_mean, gamma};
  }
  static AggregationRule krum(std::size_t f, std::size_t m) {
    return {Kind::krum, 0.1, f, m};
  }
  static AggregationRule stpa() { return {Kind::stpa}; }

  void validate() const;
};

std::string to_string(AggregationRule::Kind kind);

// The aggregators below process updates in ascending slot order, so their
// output does not depend on the order of the input list. Coordinates are
// reduced in parallel; each coordinate's reduction is sequential.

/// Sample-count weighted mean.
ParamVector fed_avg(std::span<const ClientUpdate> updates);

/// Per-coordinate median; even counts average the two central values.
ParamVector coordinate_median(std::span<const ClientUpdate> updates);

/// Per-coordinate mean after dropping floor(gamma * n) values from each end.
ParamVector trimmed_mean(std::span<const ClientUpdate> updates, double gamma);

/// Krum scores: sum of Euclidean distances from each update to its n - f - 2
/// nearest other updates. Indexed like `updates`.
std::vector<double> krum_scores(std::span<const ClientUpdate> updates, std::size_t f);

/// Positions (into `updates`) of the m lowest-scoring updates, ties broken by
/// smaller slot, returned in ascending slot order.
std::vector<std::size_t> krum_select(std::span<const ClientUpdate> updates,
                                     std::size_t f, std::size_t m);

/// Unweighted mean of the updates chosen by krum_select.
ParamVector krum(std::span<const ClientUpdate> updates, std::size_t f, std::size_t m);

/// Dispatches a baseline rule. Throws for Kind::stpa, which needs round state.
ParamVector aggregate(const AggregationRule& rule, std::span<const ClientUpdate> updates);

namespace reference {

// Single-threaded implementations kept as the baseline for the parallel
// kernels. Same contracts as the functions above.
ParamVector fed_avg(std::span<const ClientUpdate> updates);
ParamVector coordinate_median(std::span<const ClientUpdate> updates);
ParamVector trimmed_mean(std::span<const ClientUpdate> updates, double gamma);
std::vector<double> krum_scores(std::span<const ClientUpdate> updates, std::size_t f);

}  // namespace reference

namespace detail {

void require_updates(std::span<const ClientUpdate> updates, const char* who);
/// Positions into `updates` sorted by slot (stable).
std::vector<std::size_t> slot_order(std::span<const ClientUpdate> updates);
std::size_t trim_count(std::size_t n, double gamma);
void check_krum(std::size_t n, std::size_t f, std::size_t m);

}  // namespace detail

}  // namespace robustfl
