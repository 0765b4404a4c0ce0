#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "advstat/attacks.hpp"
#include "advstat/classifier.hpp"
#include "advstat/dataset.hpp"
#include "advstat/stats.hpp"

namespace advstat::cli {

/// Configuration problems exit with status 2; everything later with 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DatasetSpec {
  enum class Kind { synth_digits, synth_malware, synth_tabular, idx, csv };
  Kind kind = Kind::synth_digits;
  std::size_t per_class = 100;  // synth_digits / synth_tabular
  std::size_t n_benign = 500, n_malicious = 500, d = 30;  // synth_malware
  std::uint64_t seed = 0;
  std::filesystem::path images, labels;  // idx
  std::filesystem::path path;            // csv
  std::size_t label_column = 0;
  bool has_header = false;

  Dataset realize() const;
};

struct StatSection {
  enum class Mode { test, sweep, classwise, mixture };
  Mode mode = Mode::test;
  std::filesystem::path reference;  // optional bare matrix CSV; else the dataset
  std::filesystem::path candidate;
  std::filesystem::path benign;  // mixture only
  Grouping grouping = Grouping::predicted;
  std::vector<std::size_t> sizes = {10, 50, 100};
  std::vector<double> fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
  int repetitions = 200;
  TestParams test;
};

struct DefenseSection {
  std::vector<AttackSpec> attacks;       // augmentation attacks
  std::vector<AttackSpec> eval_attacks;  // adaptive evaluation, may be empty
  double legit_fraction = 2.0 / 3.0;
  bool include_failed = true;
  bool blackbox_bb = false;
  bool blackbox_bb1 = false;
  std::uint64_t substitute_seed = 0x5eed;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::optional<SplitSpec> split;
  ModelFamily family = ModelFamily::mlp;
  TrainConfig train;
  std::filesystem::path model_path;  // attack/defend input or train output name
  AttackSpec attack;
  StatSection stat;
  DefenseSection defense;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::filesystem::path out = "out";

  nlohmann::json echo;  // the resolved configuration, for the manifest
};

/// Command-line overrides; unset optionals leave the config value alone.
struct FlagOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<int> budget;
  std::optional<std::string> sizes;      // comma-separated
  std::optional<std::string> fractions;  // comma-separated
  std::optional<double> alpha;
  std::optional<int> bootstrap;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<std::string> model;
  std::optional<std::string> candidate;
  std::optional<std::string> reference;
  std::optional<std::string> mode;
};

/// Loads the JSON config, applies the overrides (flags win) and validates.
/// Missing files and schema violations throw ConfigError naming the field.
ExperimentConfig load_config(const std::filesystem::path& path, const FlagOverrides& overrides);

/// Minimal default configuration (no file), for flag-only invocations.
ExperimentConfig default_config(const FlagOverrides& overrides);

}  // namespace advstat::cli
