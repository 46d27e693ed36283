#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "robustfl/simulation.hpp"

namespace robustfl {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// One JSON object, no trailing newline. Field order is fixed:
/// round, selected, malicious_selected, benign_kept, alpha, eta, discarded,
/// test_error_pct. Absent alpha/eta are written as null.
std::string round_log_json(const RoundLog& log);

inline constexpr const char* kRoundCsvHeader =
    "round,test_error_pct,alpha,eta,benign_kept,malicious_selected,discarded";
/// Absent alpha/eta are left empty; discarded is 0 or 1.
std::string round_log_csv(const RoundLog& log);

/// Appends each round to a JSON Lines file and a CSV summary, flushing after
/// every round so an interrupted run leaves well-formed prefixes.
class RoundWriter {
public:
  RoundWriter(const std::filesystem::path& jsonl_path, const std::filesystem::path& csv_path);

  void write(const RoundLog& log);

private:
  std::ofstream jsonl_;
  std::ofstream csv_;
};

struct SweepRow {
  double fraction = 0.0;
  std::string rule;
  std::string attack;
  double mean_final_error = 0.0;
  double std_final_error = 0.0;
};

inline constexpr const char* kSweepCsvHeader =
    "fraction,rule,attack,mean_final_error,std_final_error";

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace robustfl
