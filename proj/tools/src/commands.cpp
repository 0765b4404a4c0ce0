#include "commands.hpp"

#include <iostream>

#include "advstat/defense.hpp"
#include "advstat/parallel.hpp"
#include "manifest.hpp"
#include "report_io.hpp"

namespace advstat::cli {

using nlohmann::json;

namespace {

void prepare_out(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out);
  set_max_threads(config.threads);
}

std::filesystem::path model_output_path(const ExperimentConfig& config) {
  if (!config.model_path.empty() && config.model_path.is_absolute()) return config.model_path;
  const std::filesystem::path name =
      config.model_path.empty() ? std::filesystem::path("model.json") : config.model_path;
  return config.out / name;
}

Classifier load_model_input(const ExperimentConfig& config) {
  if (config.model_path.empty()) {
    throw ConfigError("config field 'model.path': missing (or pass --model)");
  }
  if (!std::filesystem::exists(config.model_path)) {
    throw ConfigError("config field 'model.path': file does not exist: " +
                      config.model_path.string());
  }
  return Classifier::load(config.model_path);
}

Matrix reference_matrix(const ExperimentConfig& config) {
  if (!config.stat.reference.empty()) {
    return read_candidate_file(config.stat.reference).features;
  }
  return config.dataset.realize().features;
}

}  // namespace

int cmd_train(const ExperimentConfig& config) {
  prepare_out(config);
  RunManifest manifest("train", config.echo);

  const Dataset data = manifest.time_stage("load", [&] { return config.dataset.realize(); });

  Dataset train_half = data;
  std::optional<Dataset> test_half;
  if (config.split) {
    auto [tr, te] = split(data, *config.split);
    train_half = std::move(tr);
    test_half = std::move(te);
  }

  TrainConfig tc = config.train;
  const Classifier model =
      manifest.time_stage("train", [&] { return train(config.family, train_half, tc); });

  const auto model_path = model_output_path(config);
  model.save(model_path);
  manifest.add_output(model_path);

  json report;
  report["family"] = to_string(config.family);
  report["train_accuracy"] = dataset_accuracy(model, train_half);
  if (test_half) report["test_accuracy"] = dataset_accuracy(model, *test_half);
  const auto report_path = config.out / "train_report.json";
  write_json(report_path, report);
  manifest.add_output(report_path);
  manifest.write(config.out);

  std::cout << "train accuracy: " << format_double(report["train_accuracy"].get<double>());
  if (test_half) {
    std::cout << "  test accuracy: " << format_double(report["test_accuracy"].get<double>());
  }
  std::cout << "\nmodel: " << model_path.string() << "\n";
  return 0;
}

int cmd_attack(const ExperimentConfig& config) {
  prepare_out(config);
  RunManifest manifest("attack", config.echo);

  const Classifier model = load_model_input(config);
  Dataset data = config.dataset.realize();
  if (config.split) {
    auto [tr, te] = split(data, *config.split);
    data = std::move(te);  // craft on held-out data
  }

  const BatchResult result =
      manifest.time_stage("craft", [&] { return craft_batch(model, data, config.attack); });

  const auto crafted_path = config.out / "crafted.csv";
  write_crafted_csv(crafted_path, result, data.dim());
  manifest.add_output(crafted_path);

  json summary = summary_to_json(result.summary);
  summary["attack"] = attack_to_json(config.attack);
  const auto summary_path = config.out / "attack_summary.json";
  write_json(summary_path, summary);
  manifest.add_output(summary_path);
  manifest.write(config.out);

  std::cout << "crafted " << result.summary.attempted
            << " inputs, success rate: " << format_double(result.summary.success_rate) << "\n";
  return 0;
}

int cmd_stat(const ExperimentConfig& config) {
  prepare_out(config);
  RunManifest manifest("stat", config.echo);
  const StatSection& stat = config.stat;

  if (stat.candidate.empty()) {
    throw ConfigError("config field 'stat.candidate': missing (or pass --candidate)");
  }
  if (!std::filesystem::exists(stat.candidate)) {
    throw ConfigError("config field 'stat.candidate': file does not exist: " +
                      stat.candidate.string());
  }

  const CraftedSet candidate = read_candidate_file(stat.candidate);

  SweepParams sweep_params;
  sweep_params.sizes = stat.sizes;
  sweep_params.repetitions = stat.repetitions;
  sweep_params.test = stat.test;

  switch (stat.mode) {
    case StatSection::Mode::test: {
      const Matrix reference = reference_matrix(config);
      const TestReport report = manifest.time_stage("test", [&] {
        return two_sample_test(reference, candidate.features, stat.test, config.seed);
      });
      const auto path = config.out / "test_report.json";
      write_json(path, report_to_json(report));
      manifest.add_output(path);
      manifest.write(config.out);
      std::cout << "p-value: " << format_double(report.p_value) << "  decision: "
                << (report.reject_h0 ? "reject" : "accept") << "\n";
      return 0;
    }
    case StatSection::Mode::sweep: {
      const Matrix reference = reference_matrix(config);
      const ConfidenceSweep sweep = manifest.time_stage("sweep", [&] {
        return confident_detection_sweep(reference, candidate.features, sweep_params, config.seed);
      });
      write_sweep_csv(config.out / "sweep.csv", sweep);
      write_json(config.out / "sweep.json", sweep_to_json(sweep));
      manifest.add_output(config.out / "sweep.csv");
      manifest.add_output(config.out / "sweep.json");
      manifest.write(config.out);
      if (sweep.minimal_confident_size) {
        std::cout << "minimal confident size: " << *sweep.minimal_confident_size << "\n";
      } else {
        std::cout << "no confident size among the tried sizes\n";
      }
      return 0;
    }
    case StatSection::Mode::classwise: {
      const Dataset reference = config.dataset.realize();
      const std::vector<int>& labels = stat.grouping == Grouping::original
                                           ? candidate.original_labels
                                           : candidate.predicted_labels;
      if (labels.empty()) {
        throw ConfigError(
            "config field 'stat.candidate': classwise mode needs a crafted CSV with label "
            "columns");
      }
      const ClasswiseReport report = manifest.time_stage("classwise", [&] {
        return classwise_test(reference, candidate.features, labels, stat.grouping, sweep_params,
                              config.seed);
      });
      write_classwise_csv(config.out / "classwise.csv", report);
      json doc;
      doc["grouping"] = stat.grouping == Grouping::original ? "original" : "predicted";
      for (const auto& [cls, sweep] : report.per_class) {
        doc["per_class"][std::to_string(cls)] = sweep_to_json(sweep);
      }
      doc["warnings"] = report.warnings;
      const auto best = report.best_minimal_confident_size();
      doc["best_minimal_confident_size"] = best ? json(*best) : json(nullptr);
      write_json(config.out / "classwise.json", doc);
      manifest.add_output(config.out / "classwise.csv");
      manifest.add_output(config.out / "classwise.json");
      manifest.write(config.out);
      if (best) {
        std::cout << "best class-wise minimal confident size: " << *best << "\n";
      } else {
        std::cout << "no class reached confident detection\n";
      }
      return 0;
    }
    case StatSection::Mode::mixture: {
      if (stat.benign.empty() || !std::filesystem::exists(stat.benign)) {
        throw ConfigError("config field 'stat.benign': mixture mode needs a benign pool file");
      }
      const Matrix reference = reference_matrix(config);
      const Matrix benign = read_candidate_file(stat.benign).features;
      const MixtureGrid grid = manifest.time_stage("mixture", [&] {
        return mixture_sweep(reference, candidate.features, benign, stat.fractions, sweep_params,
                             config.seed);
      });
      write_mixture_csv(config.out / "mixture.csv", grid);
      json doc;
      doc["repetitions"] = grid.repetitions;
      for (const MixtureCell& cell : grid.cells) {
        doc["cells"].push_back({{"benign_fraction", cell.benign_fraction},
                                {"size", cell.size},
                                {"acceptance_frequency", cell.acceptance_frequency}});
      }
      write_json(config.out / "mixture.json", doc);
      manifest.add_output(config.out / "mixture.csv");
      manifest.add_output(config.out / "mixture.json");
      manifest.write(config.out);
      std::cout << "mixture grid: " << grid.cells.size() << " cells\n";
      return 0;
    }
  }
  return 0;
}

int cmd_defend(const ExperimentConfig& config) {
  prepare_out(config);
  RunManifest manifest("defend", config.echo);

  if (config.defense.attacks.empty()) {
    throw ConfigError("config field 'defense.attacks': at least one augmentation attack needed");
  }

  const Dataset data = config.dataset.realize();
  Dataset train_half = data;
  Dataset test_half = data;
  if (config.split) {
    auto [tr, te] = split(data, *config.split);
    train_half = std::move(tr);
    test_half = std::move(te);
  }

  AugmentedTrainPlan plan;
  plan.base_config = config.train;
  plan.augmentation_attacks = config.defense.attacks;
  plan.legit_fraction = config.defense.legit_fraction;
  plan.include_failed_crafts = config.defense.include_failed;

  const Classifier base = manifest.time_stage(
      "train_base", [&] { return train(config.family, train_half, config.train); });
  const Classifier augmented = manifest.time_stage("train_augmented", [&] {
    return train_augmented(config.family, train_half, plan, config.seed);
  });

  const auto base_path = config.out / "base_model.json";
  const auto augmented_path = config.out / "augmented_model.json";
  base.save(base_path);
  augmented.save(augmented_path);
  manifest.add_output(base_path);
  manifest.add_output(augmented_path);

  // white-box detection per augmentation attack, plus any adaptive attacks
  std::vector<AdaptiveRow> rows;
  manifest.time_stage("evaluate", [&] {
    for (const AttackSpec& attack : plan.augmentation_attacks) {
      rows.push_back(AdaptiveRow{plan.augmentation_attacks.front(), attack,
                                 evaluate_detection(augmented, test_half, attack)});
    }
    for (const AdaptiveRow& row : adaptive_matrix(augmented, plan.augmentation_attacks.front(),
                                                  config.defense.eval_attacks, test_half)) {
      rows.push_back(row);
    }
  });

  write_breakdown_csv(config.out / "breakdown.csv", rows);
  manifest.add_output(config.out / "breakdown.csv");
  json breakdowns = json::array();
  for (const AdaptiveRow& row : rows) breakdowns.push_back(breakdown_to_json(row.breakdown));
  write_json(config.out / "breakdown.json", breakdowns);
  manifest.add_output(config.out / "breakdown.json");

  write_confusion_csv(config.out / "confusion_base.csv", confusion_matrix(base, test_half));
  write_confusion_csv(config.out / "confusion_augmented.csv",
                      confusion_matrix(augmented, test_half));
  manifest.add_output(config.out / "confusion_base.csv");
  manifest.add_output(config.out / "confusion_augmented.csv");

  json accuracy;
  accuracy["base_test_accuracy"] = dataset_accuracy(base, test_half);
  accuracy["augmented_test_accuracy"] = dataset_accuracy(augmented, test_half);
  accuracy["benign_outlier_rate"] = benign_outlier_rate(augmented, test_half);
  write_json(config.out / "accuracy.json", accuracy);
  manifest.add_output(config.out / "accuracy.json");

  // black-box transfer, per requested substitute kind
  auto run_blackbox = [&](SubstituteKind kind, const std::string& tag) {
    const Classifier substitute = manifest.time_stage("substitute_" + tag, [&] {
      return train_substitute(kind, config.family, train_half, plan,
                              config.defense.substitute_seed);
    });
    json results = json::array();
    for (const AttackSpec& attack : plan.augmentation_attacks) {
      const BlackboxReport report = blackbox_transfer(augmented, substitute, test_half, attack);
      json entry = breakdown_to_json(report.breakdown);
      entry["substitute"] = tag;
      entry["substitute_agreement"] = report.substitute_agreement;
      results.push_back(std::move(entry));
    }
    const auto path = config.out / ("blackbox_" + tag + ".json");
    write_json(path, results);
    manifest.add_output(path);
  };
  if (config.defense.blackbox_bb) run_blackbox(SubstituteKind::bb, "bb");
  if (config.defense.blackbox_bb1) run_blackbox(SubstituteKind::bb_plus_one, "bb1");

  manifest.write(config.out);

  for (const AdaptiveRow& row : rows) {
    std::cout << to_string(row.eval_attack.kind) << ": recovered "
              << format_double(row.breakdown.recovered) << ", detected "
              << format_double(row.breakdown.detected) << ", error "
              << format_double(row.breakdown.error) << "\n";
  }
  return 0;
}

}  // namespace advstat::cli
