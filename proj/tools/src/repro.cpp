#include <iostream>

#include "advstat/defense.hpp"
#include "advstat/parallel.hpp"
#include "advstat/perturb.hpp"
#include "advstat/synth.hpp"
#include "commands.hpp"
#include "manifest.hpp"
#include "report_io.hpp"

namespace advstat::cli {

using nlohmann::json;

namespace {

struct Assertions {
  json entries = json::array();
  bool all_passed = true;

  void check(const std::string& name, bool passed, const std::string& detail) {
    entries.push_back({{"assertion", name}, {"passed", passed}, {"detail", detail}});
    all_passed &= passed;
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << name << "  (" << detail << ")\n";
  }
};

/// Shared desk-scale setup: digits pools and a trained mlp.
struct DigitBench {
  Dataset train_pool;   // model training rows
  Dataset reference;    // reference draws for the tests
  Dataset held;         // benign candidates / crafting inputs
  Classifier mlp;

  DigitBench(std::size_t per_class, std::uint64_t seed, int epochs = 40) {
    const Dataset all = synth_digits(per_class * 3, seed);
    RandomSource rng(mix_seed(seed, 0xbe));
    const auto order = shuffled_indices(all.size(), rng);
    const std::size_t third = all.size() / 3;
    train_pool = all.take_rows({order.data(), third});
    reference = all.take_rows({order.data() + third, third});
    held = all.take_rows({order.data() + 2 * third, all.size() - 2 * third});

    TrainConfig config;
    config.epochs = epochs;
    config.hidden_layers = {32};
    config.seed = mix_seed(seed, 0x7a);
    mlp = train(ModelFamily::mlp, train_pool, config);
  }
};

TrainConfig bench_config(std::uint64_t seed, int epochs = 40) {
  TrainConfig config;
  config.epochs = epochs;
  config.hidden_layers = {32};
  config.seed = seed;
  return config;
}

AugmentedTrainPlan bench_plan(const AttackSpec& attack, std::uint64_t seed) {
  AugmentedTrainPlan plan;
  plan.base_config = bench_config(seed);
  plan.augmentation_attacks = {attack};
  return plan;
}

Matrix crafted_rows(const Classifier& model, const Dataset& data, const AttackSpec& spec) {
  return adversarial_matrix(craft_batch(model, data, spec));
}

// ---- table 1: MMD / energy distance per manipulation --------------------

int repro_table1(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);
  const double sigma = median_pairwise_distance(bench.reference.features, bench.reference.features);
  const KernelSpec kernel = KernelSpec::gaussian(sigma);

  TrainConfig svm_config = bench_config(mix_seed(scale.seed, 1), 25);
  svm_config.learning_rate = 0.02;
  const Classifier svm = train(ModelFamily::linear_svm, bench.train_pool, svm_config);
  TrainConfig tree_config = bench_config(mix_seed(scale.seed, 2));
  const Classifier tree = train(ModelFamily::decision_tree, bench.train_pool, tree_config);

  std::vector<std::pair<std::string, Matrix>> rows;
  rows.emplace_back("original", bench.held.features);
  rows.emplace_back("fgsm_0.07", crafted_rows(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.07)));
  rows.emplace_back("fgsm_0.275",
                    crafted_rows(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.275)));
  rows.emplace_back("jsma", crafted_rows(bench.mlp, bench.held, AttackSpec::jsma_spec(12)));
  rows.emplace_back("svm_attack_0.25",
                    crafted_rows(svm, bench.held, AttackSpec::svm_shift_spec(0.25)));
  rows.emplace_back("dt_attack", crafted_rows(tree, bench.held, AttackSpec::dt_path_spec(4)));
  rows.emplace_back("flipped",
                    geometric_perturb(bench.held, GeometricTransform::flip()).features);
  rows.emplace_back("subsample_6",
                    geometric_perturb(bench.held, GeometricTransform::subsample(6)).features);
  rows.emplace_back("gaussian_blur_2",
                    geometric_perturb(bench.held, GeometricTransform::gaussian_blur(2)).features);

  std::vector<CsvRow> csv;
  double mmd_original = 0.0, mmd_small = 0.0, mmd_large = 0.0;
  for (const auto& [name, candidate] : rows) {
    const double mmd = mmd_biased(bench.reference.features, candidate, kernel);
    const double ed = energy_distance(bench.reference.features, candidate);
    csv.push_back({name, format_double(mmd), format_double(ed)});
    if (name == "original") mmd_original = mmd;
    if (name == "fgsm_0.07") mmd_small = mmd;
    if (name == "fgsm_0.275") mmd_large = mmd;
  }
  write_csv(scale.out / "table1.csv", {"manipulation", "mmd", "energy_distance"}, csv);
  manifest.add_output(scale.out / "table1.csv");

  asserts.check("mmd(fgsm 0.275) > mmd(original)", mmd_large > mmd_original,
                format_double(mmd_large) + " vs " + format_double(mmd_original));
  asserts.check("mmd(fgsm 0.275) > mmd(fgsm 0.07)", mmd_large > mmd_small,
                format_double(mmd_large) + " vs " + format_double(mmd_small));
  asserts.check("mmd(fgsm 0.07) > mmd(original)", mmd_small > mmd_original,
                format_double(mmd_small) + " vs " + format_double(mmd_original));
  return 0;
}

// ---- table 2a: minimum confident sample size -----------------------------

int repro_table2a(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);

  SweepParams params;
  params.sizes = scale.sizes.empty() ? std::vector<std::size_t>{10, 50, 100} : scale.sizes;
  params.repetitions = scale.repetitions;
  params.test.bootstrap_iterations = scale.bootstrap;

  const Matrix adversarial = crafted_rows(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.3));
  const ConfidenceSweep hostile = confident_detection_sweep(
      bench.reference.features, adversarial, params, mix_seed(scale.seed, 3));
  const ConfidenceSweep benign = confident_detection_sweep(
      bench.reference.features, bench.held.features, params, mix_seed(scale.seed, 4));

  write_sweep_csv(scale.out / "table2a_adversarial.csv", hostile);
  write_sweep_csv(scale.out / "table2a_benign.csv", benign);
  manifest.add_output(scale.out / "table2a_adversarial.csv");
  manifest.add_output(scale.out / "table2a_benign.csv");

  const std::size_t largest = *std::max_element(params.sizes.begin(), params.sizes.end());
  asserts.check("fgsm 0.3 confidently detected within the size grid",
                hostile.minimal_confident_size.has_value() &&
                    *hostile.minimal_confident_size <= largest,
                hostile.minimal_confident_size
                    ? "minimal size " + std::to_string(*hostile.minimal_confident_size)
                    : "never confident");
  asserts.check("benign candidates never confidently flagged",
                !benign.minimal_confident_size.has_value(),
                benign.minimal_confident_size
                    ? "flagged at " + std::to_string(*benign.minimal_confident_size)
                    : "no confident size");
  return 0;
}

// ---- table 2b: class-wise tests ------------------------------------------

int repro_table2b(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);

  SweepParams params;
  params.sizes = scale.sizes.empty() ? std::vector<std::size_t>{10, 25, 50} : scale.sizes;
  params.repetitions = scale.repetitions;
  params.test.bootstrap_iterations = scale.bootstrap;

  const BatchResult crafted =
      craft_batch(bench.mlp, bench.held, AttackSpec::jsma_spec(12));
  const Matrix candidates = adversarial_matrix(crafted);
  std::vector<int> original(crafted.outcomes.size()), predicted(crafted.outcomes.size());
  for (std::size_t i = 0; i < crafted.outcomes.size(); ++i) {
    original[i] = crafted.outcomes[i].source_label;
    predicted[i] = crafted.outcomes[i].predicted_after;
  }

  const ConfidenceSweep ungrouped = confident_detection_sweep(
      bench.reference.features, candidates, params, mix_seed(scale.seed, 5));
  const ClasswiseReport by_original = classwise_test(
      bench.reference, candidates, original, Grouping::original, params, mix_seed(scale.seed, 6));
  const ClasswiseReport by_predicted =
      classwise_test(bench.reference, candidates, predicted, Grouping::predicted, params,
                     mix_seed(scale.seed, 7));

  write_sweep_csv(scale.out / "table2b_ungrouped.csv", ungrouped);
  write_classwise_csv(scale.out / "table2b_original.csv", by_original);
  write_classwise_csv(scale.out / "table2b_predicted.csv", by_predicted);
  manifest.add_output(scale.out / "table2b_ungrouped.csv");
  manifest.add_output(scale.out / "table2b_original.csv");
  manifest.add_output(scale.out / "table2b_predicted.csv");

  const auto best = by_predicted.best_minimal_confident_size();
  const auto flat = ungrouped.minimal_confident_size;
  const std::string detail =
      std::string("classwise P ") + (best ? std::to_string(*best) : "none") + ", ungrouped " +
      (flat ? std::to_string(*flat) : "none");
  asserts.check("class-wise (P) minimal size <= ungrouped minimal size",
                best.has_value() && (!flat.has_value() || *best <= *flat), detail);
  return 0;
}

// ---- table 3: outlier-class detection rates ------------------------------

int repro_table3(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);
  const AugmentedTrainPlan plan =
      bench_plan(AttackSpec::fgsm_spec(0.275), mix_seed(scale.seed, 8));
  const Classifier augmented =
      train_augmented(ModelFamily::mlp, bench.train_pool, plan, mix_seed(scale.seed, 9));

  std::vector<AdaptiveRow> rows;
  for (double eps : {0.2, 0.275, 0.3, 0.4}) {
    const AttackSpec attack = AttackSpec::fgsm_spec(eps);
    rows.push_back(AdaptiveRow{plan.augmentation_attacks.front(), attack,
                               evaluate_detection(augmented, bench.held, attack)});
  }
  const AttackSpec jsma_attack = AttackSpec::jsma_spec(12);
  rows.push_back(AdaptiveRow{plan.augmentation_attacks.front(), jsma_attack,
                             evaluate_detection(augmented, bench.held, jsma_attack)});

  write_breakdown_csv(scale.out / "table3.csv", rows);
  manifest.add_output(scale.out / "table3.csv");

  const DetectionBreakdown& at_training_eps = rows[1].breakdown;
  asserts.check("detected >= 0.80 at the training epsilon", at_training_eps.detected >= 0.80,
                "detected " + format_double(at_training_eps.detected));
  bool partitions = true;
  for (const AdaptiveRow& row : rows) {
    partitions &= row.breakdown.recovered_count + row.breakdown.detected_count +
                      row.breakdown.error_count ==
                  row.breakdown.total;
  }
  asserts.check("recovered + detected + error partitions every row", partitions,
                std::to_string(rows.size()) + " rows");

  const double benign_accuracy = dataset_accuracy(augmented, bench.held);
  const double outlier_rate = benign_outlier_rate(augmented, bench.held);
  write_json(scale.out / "table3_benign.json",
             {{"augmented_test_accuracy", benign_accuracy},
              {"benign_outlier_rate", outlier_rate}});
  manifest.add_output(scale.out / "table3_benign.json");
  asserts.check("benign false-outlier rate <= 2%", outlier_rate <= 0.02,
                format_double(outlier_rate));
  return 0;
}

// ---- table 5: adaptive cross-attack evaluation ---------------------------

int repro_table5(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);

  const AttackSpec jsma_attack = AttackSpec::jsma_spec(12);
  const AttackSpec fgsm_attack = AttackSpec::fgsm_spec(0.275);

  const Classifier jsma_trained = train_augmented(
      ModelFamily::mlp, bench.train_pool, bench_plan(jsma_attack, mix_seed(scale.seed, 10)),
      mix_seed(scale.seed, 11));
  const Classifier fgsm_trained = train_augmented(
      ModelFamily::mlp, bench.train_pool, bench_plan(fgsm_attack, mix_seed(scale.seed, 12)),
      mix_seed(scale.seed, 13));

  std::vector<AdaptiveRow> rows;
  for (double eps : {0.1, 0.275, 0.4}) {
    const AttackSpec eval = AttackSpec::fgsm_spec(eps);
    rows.push_back(
        AdaptiveRow{jsma_attack, eval, evaluate_detection(jsma_trained, bench.held, eval)});
  }
  rows.push_back(AdaptiveRow{fgsm_attack, jsma_attack,
                             evaluate_detection(fgsm_trained, bench.held, jsma_attack)});

  write_breakdown_csv(scale.out / "table5.csv", rows);
  manifest.add_output(scale.out / "table5.csv");

  const double jsma_under_fgsm = rows[1].breakdown.error;  // eps 0.275
  const double fgsm_under_jsma = rows.back().breakdown.error;
  asserts.check("jsma-trained model holds error <= 10% under fgsm 0.275",
                jsma_under_fgsm <= 0.10, format_double(jsma_under_fgsm));
  asserts.check("fgsm-trained model suffers >= 3x that error under jsma",
                fgsm_under_jsma >= 3.0 * jsma_under_fgsm,
                format_double(fgsm_under_jsma) + " vs 3 x " + format_double(jsma_under_fgsm));
  return 0;
}

// ---- table 6: black-box transfer ------------------------------------------

int repro_table6(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);
  const AugmentedTrainPlan plan =
      bench_plan(AttackSpec::fgsm_spec(0.275), mix_seed(scale.seed, 14));
  const Classifier victim =
      train_augmented(ModelFamily::mlp, bench.train_pool, plan, mix_seed(scale.seed, 15));

  json results = json::array();
  double detected_small_bb = 0.0, detected_large_bb = 0.0, error_large_bb = 0.0;

  for (SubstituteKind kind : {SubstituteKind::bb, SubstituteKind::bb_plus_one}) {
    const Classifier substitute = train_substitute(kind, ModelFamily::mlp, bench.train_pool, plan,
                                                   mix_seed(scale.seed, 16));
    for (double eps : {0.1, 0.275, 0.4}) {
      const BlackboxReport report =
          blackbox_transfer(victim, substitute, bench.held, AttackSpec::fgsm_spec(eps));
      json entry = breakdown_to_json(report.breakdown);
      entry["substitute"] = to_string(kind);
      entry["substitute_agreement"] = report.substitute_agreement;
      results.push_back(entry);
      if (kind == SubstituteKind::bb && eps == 0.1) detected_small_bb = report.breakdown.detected;
      if (kind == SubstituteKind::bb && eps == 0.275) {
        detected_large_bb = report.breakdown.detected;
        error_large_bb = report.breakdown.error;
      }
    }
  }
  write_json(scale.out / "table6.json", results);
  manifest.add_output(scale.out / "table6.json");

  asserts.check("bb transfer: detected at 0.275 >= detected at 0.1",
                detected_large_bb >= detected_small_bb,
                format_double(detected_large_bb) + " vs " + format_double(detected_small_bb));
  asserts.check("bb transfer: error at 0.275 <= 5%", error_large_bb <= 0.05,
                format_double(error_large_bb));
  return 0;
}

// ---- fig 3: mixtures -------------------------------------------------------

int repro_fig3(const ReproScale& scale, RunManifest& manifest, Assertions& asserts) {
  const DigitBench bench(scale.per_class, scale.seed);

  SweepParams params;
  params.sizes = scale.sizes.empty() ? std::vector<std::size_t>{20, 50} : scale.sizes;
  params.repetitions = scale.repetitions;
  params.test.bootstrap_iterations = scale.bootstrap;
  const std::vector<double> fractions =
      scale.fractions.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0} : scale.fractions;

  const Matrix adversarial = crafted_rows(bench.mlp, bench.train_pool, AttackSpec::fgsm_spec(0.3));
  const MixtureGrid grid =
      mixture_sweep(bench.reference.features, adversarial, bench.held.features, fractions, params,
                    mix_seed(scale.seed, 17));
  write_mixture_csv(scale.out / "fig3.csv", grid);
  manifest.add_output(scale.out / "fig3.csv");

  bool monotone = true;
  std::string detail = "ok";
  for (std::size_t s = 0; s < params.sizes.size(); ++s) {
    for (std::size_t hi = 1; hi < fractions.size(); ++hi) {
      for (std::size_t lo = 0; lo < hi; ++lo) {
        const double high = grid.cells[hi * params.sizes.size() + s].acceptance_frequency;
        const double low = grid.cells[lo * params.sizes.size() + s].acceptance_frequency;
        if (high < low - 0.05) {
          monotone = false;
          detail = "size " + std::to_string(params.sizes[s]) + ": acc(" +
                   format_double(fractions[hi]) + ")=" + format_double(high) + " < acc(" +
                   format_double(fractions[lo]) + ")=" + format_double(low) + " - 0.05";
        }
      }
    }
  }
  asserts.check("acceptance non-decreasing in the benign fraction (0.05 slack)", monotone, detail);
  return 0;
}

}  // namespace

const std::vector<std::string>& repro_tables() {
  static const std::vector<std::string> names = {"table1", "table2a", "table2b", "table3",
                                                 "table5", "table6",  "fig3"};
  return names;
}

int cmd_repro(const std::string& table, const ReproScale& scale) {
  const auto& names = repro_tables();
  if (std::find(names.begin(), names.end(), table) == names.end()) {
    std::string valid;
    for (const std::string& n : names) valid += (valid.empty() ? "" : ", ") + n;
    std::cerr << "unknown table '" << table << "'; valid names: " << valid << "\n";
    return 2;
  }

  std::filesystem::create_directories(scale.out);
  set_max_threads(scale.threads);

  json echo;
  echo["table"] = table;
  echo["per_class"] = scale.per_class;
  echo["repetitions"] = scale.repetitions;
  echo["bootstrap"] = scale.bootstrap;
  echo["seed"] = scale.seed;
  RunManifest manifest("repro", echo);
  Assertions asserts;

  manifest.time_stage(table, [&] {
    if (table == "table1") repro_table1(scale, manifest, asserts);
    if (table == "table2a") repro_table2a(scale, manifest, asserts);
    if (table == "table2b") repro_table2b(scale, manifest, asserts);
    if (table == "table3") repro_table3(scale, manifest, asserts);
    if (table == "table5") repro_table5(scale, manifest, asserts);
    if (table == "table6") repro_table6(scale, manifest, asserts);
    if (table == "fig3") repro_fig3(scale, manifest, asserts);
  });

  json doc;
  doc["table"] = table;
  doc["assertions"] = asserts.entries;
  doc["all_passed"] = asserts.all_passed;
  write_json(scale.out / "assertions.json", doc);
  manifest.add_output(scale.out / "assertions.json");
  manifest.write(scale.out);
  return 0;
}

}  // namespace advstat::cli
