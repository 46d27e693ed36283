#include "robustfl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace robustfl {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where,
                      std::optional<std::size_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path_of(where, key) + ": required");
  }
  const auto& v = j.at(key);
  if (!v.is_number_unsigned())
    throw ConfigError(path_of(where, key) + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

double get_real(const json& j, const std::string& key, const std::string& where,
                std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path_of(where, key) + ": required");
  }
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path_of(where, key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path_of(where, key) + ": must be finite");
  return x;
}

std::string get_string(const json& j, const std::string& key, const std::string& where,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path_of(where, key) + ": required");
  }
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(path_of(where, key) + ": expected a string");
  return v.get<std::string>();
}

AttackSpec parse_attack(const json& j) {
  const std::string where = "attack";
  require_object(j, where);
  const auto kind = get_string(j, "kind", where);
  AttackSpec a;
  if (kind == "none") {
    check_keys(j, {"kind"}, where);
  } else if (kind == "byzantine_gaussian") {
    check_keys(j, {"kind", "sigma"}, where);
    a = AttackSpec::byzantine_gaussian(get_real(j, "sigma", where, 20.0));
  } else if (kind == "noisy") {
    check_keys(j, {"kind", "low", "high", "clip_lo", "clip_hi"}, where);
    a = AttackSpec::noisy(get_real(j, "low", where, -1.4), get_real(j, "high", where, 1.4),
                          get_real(j, "clip_lo", where, -1.0),
                          get_real(j, "clip_hi", where, 1.0));
  } else if (kind == "label_flip") {
    check_keys(j, {"kind", "target"}, where);
    a = AttackSpec::label_flip(static_cast<int>(get_count(j, "target", where, 0)));
  } else if (kind == "ipm") {
    check_keys(j, {"kind", "epsilon"}, where);
    a = AttackSpec::ipm(get_real(j, "epsilon", where, 1.0));
  } else if (kind == "alie") {
    check_keys(j, {"kind", "epsilon"}, where);
    a = AttackSpec::alie(get_real(j, "epsilon", where, 1.5));
  } else {
    throw ConfigError("attack.kind: unknown attack \"" + kind + "\"");
  }
  return a;
}

AggregationRule parse_rule(const json& j, const std::string& where, bool allow_stpa,
                           bool* krum_f_auto) {
  require_object(j, where);
  const auto kind = get_string(j, "kind", where);
  if (kind == "fed_avg") {
    check_keys(j, {"kind"}, where);
    return AggregationRule::fed_avg();
  }
  if (kind == "coordinate_median") {
    check_keys(j, {"kind"}, where);
    return AggregationRule::coordinate_median();
  }
  if (kind == "trimmed_mean") {
    check_keys(j, {"kind", "gamma"}, where);
    return AggregationRule::trimmed_mean(get_real(j, "gamma", where));
  }
  if (kind == "krum") {
    check_keys(j, {"kind", "f", "m"}, where);
    if (krum_f_auto) *krum_f_auto = !j.contains("f");
    return AggregationRule::krum(get_count(j, "f", where, 0), get_count(j, "m", where, 1));
  }
  if (kind == "stpa" && allow_stpa) {
    check_keys(j, {"kind"}, where);
    return AggregationRule::stpa();
  }
  throw ConfigError(where + ".kind: unsupported rule \"" + kind + "\"");
}

StpaConfig parse_stpa(const json& j) {
  const std::string where = "stpa";
  check_keys(j, {"s_t", "beta", "eta0", "inner_rule"}, where);
  StpaConfig s;
  s.s_t = get_real(j, "s_t", where, s.s_t);
  s.beta = get_real(j, "beta", where, s.beta);
  s.eta0 = get_real(j, "eta0", where, s.eta0);
  if (j.contains("inner_rule"))
    s.inner_rule = parse_rule(j.at("inner_rule"), "stpa.inner_rule", false, nullptr);
  return s;
}

TrainConfig parse_train(const json& j) {
  const std::string where = "train";
  check_keys(j, {"local_steps", "local_lr", "batch_size"}, where);
  TrainConfig t;
  t.local_steps = get_count(j, "local_steps", where, t.local_steps);
  t.local_lr = get_real(j, "local_lr", where, t.local_lr);
  t.batch_size = get_count(j, "batch_size", where, t.batch_size);
  return t;
}

PartitionConfig parse_partition(const json& j) {
  const std::string where = "partition";
  require_object(j, where);
  PartitionConfig p;
  const auto scheme = get_string(j, "scheme", where);
  if (scheme == "iid") {
    check_keys(j, {"scheme"}, where);
    p.scheme = PartitionScheme::iid;
  } else if (scheme == "noniid_shards") {
    check_keys(j, {"scheme", "shards_per_client", "shard_size"}, where);
    p.scheme = PartitionScheme::noniid_shards;
    p.shards_per_client = get_count(j, "shards_per_client", where, p.shards_per_client);
    p.shard_size = get_count(j, "shard_size", where, p.shard_size);
  } else {
    throw ConfigError("partition.scheme: unknown scheme \"" + scheme + "\"");
  }
  return p;
}

DataConfig parse_data(const json& j) {
  const std::string where = "data";
  require_object(j, where);
  DataConfig d;
  const auto kind = get_string(j, "kind", where);
  if (kind == "blobs") {
    check_keys(j, {"kind", "n_classes", "dim", "train_per_class", "test_per_class", "spread"},
               where);
    d.kind = DataConfig::Kind::blobs;
    d.n_classes = get_count(j, "n_classes", where, d.n_classes);
    d.dim = get_count(j, "dim", where, d.dim);
    d.train_per_class = get_count(j, "train_per_class", where, d.train_per_class);
    d.test_per_class = get_count(j, "test_per_class", where, d.test_per_class);
    d.spread = get_real(j, "spread", where, d.spread);
  } else if (kind == "idx") {
    check_keys(j, {"kind", "train_images", "train_labels", "test_images", "test_labels"},
               where);
    d.kind = DataConfig::Kind::idx;
    d.train_images = get_string(j, "train_images", where);
    d.train_labels = get_string(j, "train_labels", where);
    d.test_images = get_string(j, "test_images", where);
    d.test_labels = get_string(j, "test_labels", where);
  } else if (kind == "file") {
    check_keys(j, {"kind", "train_path", "test_path"}, where);
    d.kind = DataConfig::Kind::file;
    d.train_path = get_string(j, "train_path", where);
    d.test_path = get_string(j, "test_path", where);
  } else {
    throw ConfigError("data.kind: unknown data source \"" + kind + "\"");
  }
  return d;
}

ModelConfig parse_model(const json& j) {
  const std::string where = "model";
  require_object(j, where);
  ModelConfig m;
  const auto kind = get_string(j, "kind", where);
  if (kind == "linear") {
    check_keys(j, {"kind"}, where);
    m.kind = ModelKind::linear;
  } else if (kind == "mlp") {
    check_keys(j, {"kind", "hidden"}, where);
    m.kind = ModelKind::mlp;
    m.hidden = get_count(j, "hidden", where, m.hidden);
  } else {
    throw ConfigError("model.kind: unknown model \"" + kind + "\"");
  }
  return m;
}

OutputConfig parse_output(const json& j) {
  const std::string where = "output";
  check_keys(j, {"dir", "rounds_file", "summary_file"}, where);
  OutputConfig o;
  o.dir = get_string(j, "dir", where, o.dir);
  o.rounds_file = get_string(j, "rounds_file", where, o.rounds_file);
  o.summary_file = get_string(j, "summary_file", where, o.summary_file);
  return o;
}

}  // namespace

void RunConfig::resolve() {
  auto& s = scenario;
  if (krum_f_auto && s.rule.kind == AggregationRule::Kind::krum && s.n_clients > 0) {
    // Expected malicious count among the selected clients.
    const double expected = static_cast<double>(s.n_malicious) *
                            static_cast<double>(s.clients_per_round) /
                            static_cast<double>(s.n_clients);
    s.rule.f = static_cast<std::size_t>(std::llround(expected));
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"scenario", "n_clients", "n_malicious", "clients_per_round", "rounds", "seed",
              "attack", "rule", "stpa", "train", "partition", "data", "model", "output"},
             "config");

  RunConfig cfg;
  auto& s = cfg.scenario;
  const auto scenario = get_string(j, "scenario", "");
  if (scenario == "cross_silo") {
    s.scenario = Scenario::cross_silo;
  } else if (scenario == "cross_device") {
    s.scenario = Scenario::cross_device;
  } else {
    throw ConfigError("scenario: expected \"cross_silo\" or \"cross_device\"");
  }
  s.n_clients = get_count(j, "n_clients", "");
  s.n_malicious = get_count(j, "n_malicious", "", 0);
  s.clients_per_round = get_count(j, "clients_per_round", "", s.n_clients);
  s.rounds = get_count(j, "rounds", "");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw ConfigError("seed: expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("attack")) s.attack = parse_attack(j.at("attack"));
  if (j.contains("rule")) s.rule = parse_rule(j.at("rule"), "rule", true, &cfg.krum_f_auto);
  if (j.contains("stpa")) s.stpa = parse_stpa(j.at("stpa"));
  if (j.contains("train")) s.train = parse_train(j.at("train"));
  if (j.contains("partition")) s.partition = parse_partition(j.at("partition"));
  if (j.contains("data")) s.data = parse_data(j.at("data"));
  if (j.contains("model")) s.model = parse_model(j.at("model"));
  if (j.contains("output")) cfg.output = parse_output(j.at("output"));

  cfg.resolve();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_run_config(buffer.str());
}

std::uint64_t resolve_seed(std::uint64_t file_seed, const char* env_value,
                           std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (env_value != nullptr && *env_value != '\0') {
    std::uint64_t v = 0;
    const std::string_view text(env_value);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError("BB_SEED: expected a non-negative integer");
    return v;
  }
  return file_seed;
}

}  // namespace robustfl
