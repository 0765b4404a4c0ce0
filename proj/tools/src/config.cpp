#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "advstat/errors.hpp"
#include "advstat/loaders.hpp"
#include "advstat/synth.hpp"

namespace advstat::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

template <typename T>
T get_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    fail(field, "wrong type");
  }
}

template <typename T>
T require(const json& j, const std::string& section, const std::string& field) {
  if (!j.contains(field)) fail(section + "." + field, "missing");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    fail(section + "." + field, "wrong type");
  }
}

void require_file(const std::filesystem::path& p, const std::string& field) {
  if (!std::filesystem::exists(p)) fail(field, "file does not exist: " + p.string());
}

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) fail(field, "not a number: " + item);
    out.push_back(v);
  }
  if (out.empty()) fail(field, "empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& field) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text, field)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      fail(field, "sizes must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

DatasetSpec parse_dataset(const json& j) {
  DatasetSpec spec;
  const std::string kind = require<std::string>(j, "dataset", "kind");
  if (kind == "synth_digits") {
    spec.kind = DatasetSpec::Kind::synth_digits;
    spec.per_class = get_or<std::size_t>(j, "per_class", 100);
  } else if (kind == "synth_malware") {
    spec.kind = DatasetSpec::Kind::synth_malware;
    spec.n_benign = get_or<std::size_t>(j, "n_benign", 500);
    spec.n_malicious = get_or<std::size_t>(j, "n_malicious", 500);
    spec.d = get_or<std::size_t>(j, "d", 30);
  } else if (kind == "synth_tabular") {
    spec.kind = DatasetSpec::Kind::synth_tabular;
    spec.per_class = get_or<std::size_t>(j, "per_class", 500);
  } else if (kind == "idx") {
    spec.kind = DatasetSpec::Kind::idx;
    spec.images = require<std::string>(j, "dataset", "images");
    spec.labels = require<std::string>(j, "dataset", "labels");
    require_file(spec.images, "dataset.images");
    require_file(spec.labels, "dataset.labels");
  } else if (kind == "csv") {
    spec.kind = DatasetSpec::Kind::csv;
    spec.path = require<std::string>(j, "dataset", "path");
    require_file(spec.path, "dataset.path");
    spec.label_column = get_or<std::size_t>(j, "label_column", 0);
    spec.has_header = get_or<bool>(j, "has_header", false);
  } else {
    fail("dataset.kind", "unknown kind '" + kind + "'");
  }
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  return spec;
}

AttackSpec parse_attack(const json& j, const std::string& section) {
  AttackSpec spec;
  const std::string kind = require<std::string>(j, section, "kind");
  try {
    spec.kind = attack_kind_from_string(kind);
  } catch (const FormatError& e) {
    fail(section + ".kind", e.what());
  }
  spec.epsilon = get_or<double>(j, "epsilon", 0.1);
  spec.budget = get_or<int>(j, "budget", 20);
  spec.variance_scaled = get_or<bool>(j, "variance_scaled", false);
  if (j.contains("target_class")) {
    spec.target = TargetRule::explicit_target(require<int>(j, section, "target_class"));
  }
  try {
    spec.validate();
  } catch (const ContractError& e) {
    fail(section, e.what());
  }
  return spec;
}

TrainConfig parse_train(const json& j) {
  TrainConfig config;
  config.epochs = get_or<int>(j, "epochs", config.epochs);
  config.batch_size = get_or<int>(j, "batch_size", config.batch_size);
  config.learning_rate = get_or<double>(j, "learning_rate", config.learning_rate);
  config.l2_penalty = get_or<double>(j, "l2", config.l2_penalty);
  config.dropout = get_or<double>(j, "dropout", config.dropout);
  config.patience = get_or<int>(j, "patience", config.patience);
  config.seed = get_or<std::uint64_t>(j, "seed", config.seed);
  config.hidden_layers = get_or<std::vector<int>>(j, "hidden", config.hidden_layers);
  config.max_depth = get_or<int>(j, "max_depth", config.max_depth);
  try {
    config.validate();
  } catch (const ContractError& e) {
    fail("model", e.what());
  }
  return config;
}

StatSection parse_stat(const json& j) {
  StatSection stat;
  const std::string mode = get_or<std::string>(j, "mode", "test");
  if (mode == "test") {
    stat.mode = StatSection::Mode::test;
  } else if (mode == "sweep") {
    stat.mode = StatSection::Mode::sweep;
  } else if (mode == "classwise") {
    stat.mode = StatSection::Mode::classwise;
  } else if (mode == "mixture") {
    stat.mode = StatSection::Mode::mixture;
  } else {
    fail("stat.mode", "unknown mode '" + mode + "'");
  }
  if (j.contains("reference")) stat.reference = require<std::string>(j, "stat", "reference");
  if (j.contains("candidate")) stat.candidate = require<std::string>(j, "stat", "candidate");
  if (j.contains("benign")) stat.benign = require<std::string>(j, "stat", "benign");
  const std::string grouping = get_or<std::string>(j, "grouping", "predicted");
  if (grouping == "original") {
    stat.grouping = Grouping::original;
  } else if (grouping == "predicted") {
    stat.grouping = Grouping::predicted;
  } else {
    fail("stat.grouping", "must be 'original' or 'predicted'");
  }
  stat.sizes = get_or<std::vector<std::size_t>>(j, "sizes", stat.sizes);
  stat.fractions = get_or<std::vector<double>>(j, "fractions", stat.fractions);
  stat.repetitions = get_or<int>(j, "repetitions", stat.repetitions);
  stat.test.bootstrap_iterations = get_or<int>(j, "bootstrap", stat.test.bootstrap_iterations);
  stat.test.alpha = get_or<double>(j, "alpha", stat.test.alpha);
  if (j.contains("bandwidth") && !j.at("bandwidth").is_null()) {
    stat.test.bandwidth = require<double>(j, "stat", "bandwidth");
  }
  const std::string resample = get_or<std::string>(j, "resample", "permutation");
  if (resample == "permutation") {
    stat.test.resample = ResampleMode::permutation;
  } else if (resample == "replacement") {
    stat.test.resample = ResampleMode::bootstrap_replacement;
  } else {
    fail("stat.resample", "must be 'permutation' or 'replacement'");
  }
  return stat;
}

DefenseSection parse_defense(const json& j) {
  DefenseSection defense;
  if (j.contains("attacks")) {
    for (const json& ja : j.at("attacks")) {
      defense.attacks.push_back(parse_attack(ja, "defense.attacks"));
    }
  }
  if (j.contains("eval_attacks")) {
    for (const json& ja : j.at("eval_attacks")) {
      defense.eval_attacks.push_back(parse_attack(ja, "defense.eval_attacks"));
    }
  }
  defense.legit_fraction = get_or<double>(j, "legit_fraction", defense.legit_fraction);
  defense.include_failed = get_or<bool>(j, "include_failed", defense.include_failed);
  if (j.contains("blackbox")) {
    for (const json& jb : j.at("blackbox")) {
      const auto kind = jb.get<std::string>();
      if (kind == "bb") {
        defense.blackbox_bb = true;
      } else if (kind == "bb+1") {
        defense.blackbox_bb1 = true;
      } else {
        fail("defense.blackbox", "entries must be 'bb' or 'bb+1'");
      }
    }
  }
  defense.substitute_seed = get_or<std::uint64_t>(j, "substitute_seed", defense.substitute_seed);
  return defense;
}

void apply_overrides(ExperimentConfig& config, const FlagOverrides& flags) {
  if (flags.seed) {
    config.seed = *flags.seed;
    config.train.seed = *flags.seed;
    config.echo["seed"] = *flags.seed;
  }
  if (flags.epsilon) {
    config.attack.epsilon = *flags.epsilon;
    config.echo["attack"]["epsilon"] = *flags.epsilon;
  }
  if (flags.budget) {
    config.attack.budget = *flags.budget;
    config.echo["attack"]["budget"] = *flags.budget;
  }
  if (flags.sizes) {
    config.stat.sizes = parse_size_list(*flags.sizes, "--sizes");
    config.echo["stat"]["sizes"] = config.stat.sizes;
  }
  if (flags.fractions) {
    config.stat.fractions = parse_double_list(*flags.fractions, "--fractions");
    config.echo["stat"]["fractions"] = config.stat.fractions;
  }
  if (flags.alpha) {
    config.stat.test.alpha = *flags.alpha;
    config.echo["stat"]["alpha"] = *flags.alpha;
  }
  if (flags.bootstrap) {
    config.stat.test.bootstrap_iterations = *flags.bootstrap;
    config.echo["stat"]["bootstrap"] = *flags.bootstrap;
  }
  if (flags.threads) {
    config.threads = *flags.threads;
    config.echo["threads"] = *flags.threads;
  }
  if (flags.out) {
    config.out = *flags.out;
    config.echo["out"] = *flags.out;
  }
  if (flags.model) {
    config.model_path = *flags.model;
    config.echo["model"]["path"] = *flags.model;
  }
  if (flags.candidate) {
    config.stat.candidate = *flags.candidate;
    config.echo["stat"]["candidate"] = *flags.candidate;
  }
  if (flags.reference) {
    config.stat.reference = *flags.reference;
    config.echo["stat"]["reference"] = *flags.reference;
  }
  if (flags.mode) {
    json j;
    j["mode"] = *flags.mode;
    j["sizes"] = config.stat.sizes;  // keep other settings
    StatSection parsed = parse_stat(j);
    config.stat.mode = parsed.mode;
    config.echo["stat"]["mode"] = *flags.mode;
  }

  if (!(config.stat.test.alpha > 0.0 && config.stat.test.alpha < 1.0)) {
    fail("stat.alpha", "must lie inside (0, 1)");
  }
  if (config.stat.test.bootstrap_iterations < 1) fail("stat.bootstrap", "must be at least 1");
}

ExperimentConfig from_json(json doc, const FlagOverrides& flags) {
  ExperimentConfig config;
  config.echo = doc;

  if (doc.contains("dataset")) config.dataset = parse_dataset(doc.at("dataset"));
  if (doc.contains("split")) {
    SplitSpec split;
    split.test_fraction = get_or<double>(doc.at("split"), "test_fraction", 0.1);
    split.seed = get_or<std::uint64_t>(doc.at("split"), "seed", 0);
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
      fail("split.test_fraction", "must lie inside (0, 1)");
    }
    config.split = split;
  }
  if (doc.contains("model")) {
    const json& jm = doc.at("model");
    if (jm.contains("family")) {
      try {
        config.family = family_from_string(jm.at("family").get<std::string>());
      } catch (const FormatError& e) {
        fail("model.family", e.what());
      }
    }
    config.train = parse_train(jm);
    if (jm.contains("path")) config.model_path = jm.at("path").get<std::string>();
  }
  if (doc.contains("attack")) config.attack = parse_attack(doc.at("attack"), "attack");
  if (doc.contains("stat")) config.stat = parse_stat(doc.at("stat"));
  if (doc.contains("defense")) config.defense = parse_defense(doc.at("defense"));
  config.seed = get_or<std::uint64_t>(doc, "seed", config.seed);
  config.threads = get_or<unsigned>(doc, "threads", config.threads);
  if (doc.contains("out")) config.out = doc.at("out").get<std::string>();

  apply_overrides(config, flags);
  return config;
}

}  // namespace

Dataset DatasetSpec::realize() const {
  switch (kind) {
    case Kind::synth_digits:
      return synth_digits(per_class, seed);
    case Kind::synth_malware:
      return synth_binary_malware(n_benign, n_malicious, d, seed);
    case Kind::synth_tabular:
      return synth_tabular(per_class, seed);
    case Kind::idx:
      return load_idx_images(images, labels);
    case Kind::csv:
      return load_csv(path, label_column, has_header);
  }
  throw ConfigError("dataset.kind: unhandled kind");
}

ExperimentConfig load_config(const std::filesystem::path& path, const FlagOverrides& flags) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(std::move(doc), flags);
}

ExperimentConfig default_config(const FlagOverrides& flags) {
  return from_json(json::object(), flags);
}

}  // namespace advstat::cli
