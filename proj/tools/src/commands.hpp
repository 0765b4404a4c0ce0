#pragma once

#include <string>

#include "config.hpp"

namespace advstat::cli {

int cmd_train(const ExperimentConfig& config);
int cmd_attack(const ExperimentConfig& config);
int cmd_stat(const ExperimentConfig& config);
int cmd_defend(const ExperimentConfig& config);

struct ReproScale {
  std::size_t per_class = 150;
  std::vector<std::size_t> sizes;      // empty = table default
  std::vector<double> fractions;       // empty = table default
  int repetitions = 200;
  int bootstrap = 1000;
  std::uint64_t seed = 7;
  std::filesystem::path out = "repro";
  unsigned threads = 0;
};

/// Desk-scale analogue of a named table/figure; prints one pass/fail line
/// per property assertion. Unknown names exit with a usage error.
int cmd_repro(const std::string& table, const ReproScale& scale);

/// Valid table names, for usage messages.
const std::vector<std::string>& repro_tables();

}  // namespace advstat::cli
