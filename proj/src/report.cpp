#include "robustfl/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace robustfl {

std::string format_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("format_double: non-finite value");
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::string optional_json(const std::optional<double>& v) {
  return v ? format_double(*v) : "null";
}

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::string round_log_json(const RoundLog& log) {
  std::string out = "{\"round\":" + std::to_string(log.round) + ",\"selected\":[";
  for (std::size_t i = 0; i < log.selected.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(log.selected[i]);
  }
  out += "],\"malicious_selected\":" + std::to_string(log.malicious_selected);
  out += ",\"benign_kept\":" + std::to_string(log.benign_kept);
  out += ",\"alpha\":" + optional_json(log.alpha);
  out += ",\"eta\":" + optional_json(log.eta);
  out += ",\"discarded\":";
  out += log.discarded ? "true" : "false";
  out += ",\"test_error_pct\":" + format_double(log.test_error_pct) + "}";
  return out;
}

std::string round_log_csv(const RoundLog& log) {
  return std::to_string(log.round) + ',' + format_double(log.test_error_pct) + ',' +
         optional_csv(log.alpha) + ',' + optional_csv(log.eta) + ',' +
         std::to_string(log.benign_kept) + ',' + std::to_string(log.malicious_selected) + ',' +
         (log.discarded ? "1" : "0");
}

RoundWriter::RoundWriter(const std::filesystem::path& jsonl_path,
                         const std::filesystem::path& csv_path)
    : jsonl_(jsonl_path, std::ios::trunc), csv_(csv_path, std::ios::trunc) {
  if (!jsonl_) throw std::runtime_error("cannot open " + jsonl_path.string());
  if (!csv_) throw std::runtime_error("cannot open " + csv_path.string());
  csv_ << kRoundCsvHeader << '\n' << std::flush;
}

void RoundWriter::write(const RoundLog& log) {
  jsonl_ << round_log_json(log) << '\n' << std::flush;
  csv_ << round_log_csv(log) << '\n' << std::flush;
  if (!jsonl_ || !csv_) throw std::runtime_error("failed writing round metrics");
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.fraction) << ',' << r.rule << ',' << r.attack << ','
       << format_double(r.mean_final_error) << ',' << format_double(r.std_final_error) << '\n';
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace robustfl
