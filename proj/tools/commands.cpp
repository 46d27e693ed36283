#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "robustfl/config.hpp"
#include "robustfl/dataset.hpp"
#include "robustfl/idx.hpp"
#include "robustfl/report.hpp"
#include "robustfl/simulation.hpp"

namespace robustfl::cli {

namespace fs = std::filesystem;

namespace {

/// Builds the experiment (exit 2 on bad setup) and streams every round to
/// the writer (exit 1 on failure).
int execute(const RunConfig& cfg, const fs::path& out_dir, std::vector<RoundLog>* logs) {
  std::optional<Experiment> experiment;
  try {
    fs::create_directories(out_dir);
    experiment.emplace(cfg.scenario);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  try {
    RoundWriter writer(out_dir / cfg.output.rounds_file, out_dir / cfg.output.summary_file);
    for (std::size_t r = 0; r < cfg.scenario.rounds; ++r) {
      auto log = experiment->run_round();
      writer.write(log);
      if (logs) logs->push_back(std::move(log));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

std::optional<RunConfig> load_config(const std::string& path) {
  try {
    return load_run_config(path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int cmd_run(const RunOptions& opts) {
  auto cfg = load_config(opts.config);
  if (!cfg) return kExitUsage;
  try {
    cfg->scenario.seed = resolve_seed(cfg->scenario.seed, std::getenv("BB_SEED"), opts.seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string out = opts.out.empty() ? cfg->output.dir : opts.out;
  if (out.empty()) {
    std::cerr << "error: no output directory (use --out or output.dir)\n";
    return kExitUsage;
  }
  return execute(*cfg, out, nullptr);
}

int cmd_sweep(const SweepOptions& opts) {
  if (opts.fractions.empty()) {
    std::cerr << "error: --fractions must list at least one value\n";
    return kExitUsage;
  }
  for (double f : opts.fractions) {
    if (!(f > 0.0 && f < 0.5)) {
      std::cerr << "error: fraction " << f << " outside (0, 0.5)\n";
      return kExitUsage;
    }
  }
  auto base = load_config(opts.config);
  if (!base) return kExitUsage;
  try {
    base->scenario.seed = resolve_seed(base->scenario.seed, std::getenv("BB_SEED"), std::nullopt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string out = opts.out.empty() ? base->output.dir : opts.out;
  if (out.empty()) {
    std::cerr << "error: no output directory (use --out or output.dir)\n";
    return kExitUsage;
  }

  std::vector<SweepRow> rows;
  for (double fraction : opts.fractions) {
    RunConfig cfg = *base;
    cfg.scenario.n_malicious = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(cfg.scenario.n_clients)));
    try {
      cfg.resolve();
    } catch (const ConfigError& e) {
      std::cerr << "error: fraction " << fraction << ": " << e.what() << '\n';
      return kExitUsage;
    }
    std::vector<RoundLog> logs;
    const int code = execute(cfg, fs::path(out) / ("fraction_" + format_double(fraction)), &logs);
    if (code != kExitOk) return code;
    const auto stats = final_stats(logs, 10);
    rows.push_back({fraction, to_string(cfg.scenario.rule.kind),
                    to_string(cfg.scenario.attack.kind), stats.mean, stats.stddev});
  }
  try {
    write_sweep_csv(fs::path(out) / "sweep.csv", rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_gen_data(const GenDataOptions& opts) {
  if (opts.kind != "blobs") {
    std::cerr << "error: unsupported --kind " << opts.kind << '\n';
    return kExitUsage;
  }
  if (opts.samples_per_class == 0 || opts.n_classes < 2 || opts.dim == 0 ||
      !(opts.spread >= 0.0) || opts.out.empty() ||
      (opts.test_per_class > 0) != !opts.test_out.empty()) {
    std::cerr << "error: invalid gen-data parameters\n";
    return kExitUsage;
  }
  try {
    if (opts.test_per_class > 0) {
      const auto split = generate_blob_split(opts.n_classes, opts.dim, opts.samples_per_class,
                                             opts.test_per_class, opts.spread, opts.seed);
      save_dataset(split.train, opts.out);
      save_dataset(split.test, opts.test_out);
    } else {
      save_dataset(generate_blobs(opts.n_classes, opts.dim, opts.samples_per_class,
                                  opts.spread, opts.seed),
                   opts.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust federated learning simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", run.config, "JSON run configuration")->required();
  run_cmd->add_option("--seed", run.seed, "Seed override (beats BB_SEED and the file)");
  run_cmd->add_option("--out", run.out, "Output directory");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the config once per malicious fraction");
  sweep_cmd->add_option("--config", sweep.config, "JSON run configuration")->required();
  sweep_cmd->add_option("--fractions", sweep.fractions, "Comma-separated fractions in (0, 0.5)")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--out", sweep.out, "Output directory");

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset file");
  gen_cmd->add_option("--kind", gen.kind, "Dataset kind (blobs)");
  gen_cmd->add_option("--classes", gen.n_classes, "Number of classes");
  gen_cmd->add_option("--dim", gen.dim, "Feature dimension");
  gen_cmd->add_option("--samples-per-class", gen.samples_per_class, "Rows per class");
  gen_cmd->add_option("--spread", gen.spread, "Gaussian standard deviation around centroids");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output dataset file")->required();
  gen_cmd->add_option("--test-samples-per-class", gen.test_per_class,
                      "Held-out rows per class (requires --test-out)");
  gen_cmd->add_option("--test-out", gen.test_out, "Output file for the held-out set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*run_cmd) return cmd_run(run);
  if (*sweep_cmd) return cmd_sweep(sweep);
  return cmd_gen_data(gen);
}

}  // namespace robustfl::cli
