#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace robustfl {

/// Seedable, splittable random stream.
///
/// Each stream is identified by a root seed plus a path of 64-bit stream ids.
/// The path is hashed through std::seed_seq into a std::mt19937_64 engine;
/// both are fully specified by the C++ standard, so a stream produces the same
/// sequence on every conforming platform. Child streams created with split()
/// depend only on the parent's identity, never on how many numbers the parent
/// has already drawn.
///
/// Distributions are implemented here instead of using <random>'s
/// distribution classes, whose output is implementation-defined:
///   uniform01  -> top 53 bits of one engine draw, scaled to [0, 1)
///   normal     -> Box-Muller transform on two uniform01 draws (no caching)
///   below(n)   -> rejection sampling on the 64-bit draw
class Rng {
public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  Rng split(std::uint64_t stream) const;
  Rng split(std::initializer_list<std::uint64_t> streams) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    // Fisher-Yates, last element first.
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

private:
  Rng(std::uint64_t seed, std::vector<std::uint64_t> path);

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

}  // namespace robustfl
