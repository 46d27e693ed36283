#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace robustfl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct SweepOptions {
  std::string config;
  std::vector<double> fractions;
  std::string out;
};

struct GenDataOptions {
  std::string kind = "blobs";
  std::size_t n_classes = 10;
  std::size_t dim = 20;
  std::size_t samples_per_class = 200;
  double spread = 0.1;
  std::uint64_t seed = 0;
  std::string out;
  // Optional held-out set drawn from the same centroids.
  std::size_t test_per_class = 0;
  std::string test_out;
};

int cmd_run(const RunOptions& opts);
int cmd_sweep(const SweepOptions& opts);
int cmd_gen_data(const GenDataOptions& opts);

/// Parses argv and dispatches to a subcommand.
int main(int argc, char** argv);

}  // namespace robustfl::cli
