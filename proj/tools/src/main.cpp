#include <iostream>

#include <CLI11.hpp>

#include "advstat/errors.hpp"
#include "advstat/version.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

using namespace advstat;
using namespace advstat::cli;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  FlagOverrides overrides;
};

void attach_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config");
  auto opt = [&](const char* name, auto& slot, const char* help) {
    cmd->add_option(
           name,
           [&slot](const CLI::results_t& res) {
             typename std::decay_t<decltype(slot)>::value_type value{};
             const bool ok = CLI::detail::lexical_cast(res[0], value);
             if (ok) slot = value;
             return ok;
           },
           help)
        ->expected(1);
  };
  opt("--seed", flags.overrides.seed, "Master seed override");
  opt("--epsilon", flags.overrides.epsilon, "Attack epsilon override");
  opt("--budget", flags.overrides.budget, "Attack feature budget override");
  opt("--sizes", flags.overrides.sizes, "Comma-separated sweep sizes");
  opt("--fractions", flags.overrides.fractions, "Comma-separated benign fractions");
  opt("--alpha", flags.overrides.alpha, "Significance threshold");
  opt("--bootstrap", flags.overrides.bootstrap, "Bootstrap iterations");
  opt("--threads", flags.overrides.threads, "Worker thread cap (0 = cores)");
  opt("--out", flags.overrides.out, "Output directory");
}

ExperimentConfig resolve(const CommonFlags& flags) {
  if (flags.config_path.empty()) return default_config(flags.overrides);
  return load_config(flags.config_path, flags.overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical detection of adversarial examples: MMD two-sample tests, "
               "adversarial crafting, and outlier-class defenses"};
  app.set_version_flag("--version", advstat::kVersion);
  app.require_subcommand(1);

  CommonFlags train_flags, attack_flags, stat_flags, defend_flags;

  CLI::App* train_cmd = app.add_subcommand("train", "Train a classifier and save it");
  attach_common(train_cmd, train_flags);

  CLI::App* attack_cmd =
      app.add_subcommand("attack", "Craft adversarial examples against a saved model");
  attach_common(attack_cmd, attack_flags);
  attack_cmd->add_option(
      "--model",
      [&attack_flags](const CLI::results_t& res) {
        attack_flags.overrides.model = res[0];
        return true;
      },
      "Model file to attack");

  CLI::App* stat_cmd =
      app.add_subcommand("stat", "Two-sample tests, sweeps and mixture grids");
  attach_common(stat_cmd, stat_flags);
  stat_cmd->add_option(
      "--candidate",
      [&stat_flags](const CLI::results_t& res) {
        stat_flags.overrides.candidate = res[0];
        return true;
      },
      "Candidate sample file (crafted CSV or bare matrix CSV)");
  stat_cmd->add_option(
      "--reference",
      [&stat_flags](const CLI::results_t& res) {
        stat_flags.overrides.reference = res[0];
        return true;
      },
      "Reference sample file (bare matrix CSV); defaults to the config dataset");
  stat_cmd->add_option(
      "--mode",
      [&stat_flags](const CLI::results_t& res) {
        stat_flags.overrides.mode = res[0];
        return true;
      },
      "Analysis: test, sweep, classwise, mixture");

  CLI::App* defend_cmd =
      app.add_subcommand("defend", "Outlier-class training and adversarial evaluation");
  attach_common(defend_cmd, defend_flags);

  CLI::App* repro_cmd =
      app.add_subcommand("repro", "Desk-scale analogue of a named experiment");
  std::string table;
  ReproScale scale;
  repro_cmd->add_option("table", table, "One of: table1, table2a, table2b, table3, table5, table6, fig3")
      ->required();
  repro_cmd->add_option("--per-class", scale.per_class, "Synthetic rows per class");
  repro_cmd->add_option("--repetitions", scale.repetitions, "Sweep repetitions R");
  repro_cmd->add_option("--bootstrap", scale.bootstrap, "Bootstrap iterations B");
  std::string repro_sizes, repro_fractions;
  repro_cmd->add_option("--sizes", repro_sizes, "Comma-separated sweep sizes");
  repro_cmd->add_option("--fractions", repro_fractions, "Comma-separated benign fractions");
  repro_cmd->add_option("--seed", scale.seed, "Master seed");
  std::string repro_out = "repro";
  repro_cmd->add_option("--out", repro_out, "Output directory");
  repro_cmd->add_option("--threads", scale.threads, "Worker thread cap (0 = cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(resolve(train_flags));
    if (attack_cmd->parsed()) return cmd_attack(resolve(attack_flags));
    if (stat_cmd->parsed()) return cmd_stat(resolve(stat_flags));
    if (defend_cmd->parsed()) return cmd_defend(resolve(defend_flags));
    if (repro_cmd->parsed()) {
      scale.out = repro_out;
      if (!repro_sizes.empty()) {
        FlagOverrides sizes_only;
        sizes_only.sizes = repro_sizes;
        scale.sizes = default_config(sizes_only).stat.sizes;
      }
      if (!repro_fractions.empty()) {
        FlagOverrides fractions_only;
        fractions_only.fractions = repro_fractions;
        scale.fractions = default_config(fractions_only).stat.fractions;
      }
      return cmd_repro(table, scale);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
