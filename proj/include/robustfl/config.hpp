#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "robustfl/simulation.hpp"

namespace robustfl {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OutputConfig {
  std::string dir;
  std::string rounds_file = "rounds.jsonl";
  std::string summary_file = "summary.csv";
};

/// Parsed run configuration file (schema in docs/config.md).
struct RunConfig {
  ScenarioConfig scenario;
  OutputConfig output;
  /// Krum's f was omitted: derive it from the expected number of malicious
  /// clients per round whenever n_malicious changes.
  bool krum_f_auto = false;

  /// Recomputes derived fields and validates; throws ConfigError.
  void resolve();
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Seed precedence: value in the file, then the BB_SEED environment variable,
/// then an explicit override.
std::uint64_t resolve_seed(std::uint64_t file_seed, const char* env_value,
                           std::optional<std::uint64_t> flag);

}  // namespace robustfl
