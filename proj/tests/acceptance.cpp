// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit status 0 only when all
// criteria hold. `--only N` runs a single criterion; `--list` names them.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "advstat/attacks.hpp"
#include "advstat/classifier.hpp"
#include "advstat/defense.hpp"
#include "advstat/kernel.hpp"
#include "advstat/parallel.hpp"
#include "advstat/random.hpp"
#include "advstat/stats.hpp"
#include "advstat/synth.hpp"

using namespace advstat;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// shared desk-scale artifacts, built lazily and cached across criteria
// ---------------------------------------------------------------------------

struct Bench {
  Dataset train_pool, reference, held;
  Classifier mlp;
};

TrainConfig mlp_config(std::uint64_t seed) {
  TrainConfig config;
  config.epochs = 40;
  config.hidden_layers = {32};
  config.seed = seed;
  return config;
}

/// Splits a per_class*3 digits draw into equal thirds: model training rows,
/// reference pool, held-out pool.
Bench make_bench(std::size_t per_class, std::uint64_t seed) {
  Bench bench;
  const Dataset all = synth_digits(per_class * 3, seed);
  RandomSource rng(mix_seed(seed, 0xbe));
  const auto order = shuffled_indices(all.size(), rng);
  const std::size_t third = all.size() / 3;
  bench.train_pool = all.take_rows({order.data(), third});
  bench.reference = all.take_rows({order.data() + third, third});
  bench.held = all.take_rows({order.data() + 2 * third, third});
  bench.mlp = train(ModelFamily::mlp, bench.train_pool, mlp_config(mix_seed(seed, 0x7a)));
  return bench;
}

struct Context {
  std::map<std::uint64_t, Bench> benches;            // per_class 150
  std::map<std::uint64_t, Classifier> fgsm_defended; // criterion 8/9/10/11
  std::map<std::uint64_t, Classifier> base_models;

  const Bench& bench(std::uint64_t seed) {
    auto it = benches.find(seed);
    if (it == benches.end()) it = benches.emplace(seed, make_bench(150, seed)).first;
    return it->second;
  }

  AugmentedTrainPlan plan_for(const AttackSpec& attack, std::uint64_t seed) const {
    AugmentedTrainPlan plan;
    plan.base_config = mlp_config(mix_seed(seed, 0x51));
    plan.augmentation_attacks = {attack};
    return plan;
  }

  const Classifier& fgsm_model(std::uint64_t seed) {
    auto it = fgsm_defended.find(seed);
    if (it == fgsm_defended.end()) {
      const Bench& b = bench(seed);
      it = fgsm_defended
               .emplace(seed, train_augmented(ModelFamily::mlp, b.train_pool,
                                              plan_for(AttackSpec::fgsm_spec(0.275), seed),
                                              mix_seed(seed, 0x52)))
               .first;
    }
    return it->second;
  }

  const Classifier& base_model(std::uint64_t seed) {
    auto it = base_models.find(seed);
    if (it == base_models.end()) {
      const Bench& b = bench(seed);
      it = base_models.emplace(seed, train(ModelFamily::mlp, b.train_pool,
                                           mlp_config(mix_seed(seed, 0x51))))
               .first;
    }
    return it->second;
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

// 1: brute-force oracle equivalence for mmd_biased and energy_distance
bool criterion_oracle_equivalence(Context&, std::string& detail) {
  RandomSource rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_below(6);
    const std::size_t m = 1 + rng.next_below(6);
    const std::size_t d = 1 + rng.next_below(4);
    Matrix a(n, d), b(m, d);
    for (double& v : a.values()) v = 4.0 * rng.next_double() - 2.0;
    for (double& v : b.values()) v = 4.0 * rng.next_double() - 2.0;
    const double sigma = 0.5 + rng.next_double();

    // naive triple-loop evaluation
    auto kernel = [sigma](std::span<const double> x, std::span<const double> y) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
      return std::exp(-d2 / (2.0 * sigma * sigma));
    };
    auto dist = [](std::span<const double> x, std::span<const double> y) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
      return std::sqrt(d2);
    };
    double k11 = 0, k22 = 0, k12 = 0, e11 = 0, e22 = 0, e12 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k11 += kernel(a.row(i), a.row(j));
        e11 += dist(a.row(i), a.row(j));
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        k22 += kernel(b.row(i), b.row(j));
        e22 += dist(b.row(i), b.row(j));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        k12 += kernel(a.row(i), b.row(j));
        e12 += dist(a.row(i), b.row(j));
      }
    }
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    const double mmd_naive =
        std::sqrt(std::max(0.0, k11 / (nn * nn) + k22 / (mm * mm) - 2.0 * k12 / (nn * mm)));
    const double ed_naive = 2.0 * e12 / (nn * mm) - e11 / (nn * nn) - e22 / (mm * mm);

    worst = std::max(worst,
                     std::abs(mmd_biased(a, b, KernelSpec::gaussian(sigma)) - mmd_naive));
    worst = std::max(worst, std::abs(energy_distance(a, b) - ed_naive));
  }
  detail = "max deviation " + fmt(worst) + " over 200 instances";
  return worst <= 1e-12;
}

// 2: nominal level under H0
bool criterion_calibration(Context&, std::string& detail) {
  const Dataset pool = synth_digits(100, 11);  // one generator, 1000 rows
  TestParams params;
  params.bootstrap_iterations = 1000;
  params.alpha = 0.05;

  const std::size_t trials = 200;
  std::vector<unsigned char> rejected(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    RandomSource rng(mix_seed(202, t));
    const auto idx = sample_without_replacement(pool.size(), 100, rng);
    const Matrix x1 = pool.features.take_rows({idx.data(), 50});
    const Matrix x2 = pool.features.take_rows({idx.data() + 50, 50});
    rejected[t] = two_sample_test(x1, x2, params, rng.next_u64()).reject_h0 ? 1 : 0;
  });
  std::size_t total = 0;
  for (unsigned char r : rejected) total += r;
  const double rate = static_cast<double>(total) / static_cast<double>(trials);
  detail = "rejection frequency " + fmt(rate) + " over 200 trials";
  return rate >= 0.01 && rate <= 0.12;
}

// 3: table 1 ordering analogue, 3 seeds
bool criterion_table1_ordering(Context& ctx, std::string& detail) {
  std::ostringstream log;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Bench& bench = ctx.bench(seed);
    const double sigma =
        median_pairwise_distance(bench.reference.features, bench.reference.features);
    const KernelSpec kernel = KernelSpec::gaussian(sigma);

    const Matrix strong =
        adversarial_matrix(craft_batch(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.3)));
    const Matrix weak =
        adversarial_matrix(craft_batch(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.07)));

    const double mmd_benign = mmd_biased(bench.reference.features, bench.held.features, kernel);
    const double mmd_strong = mmd_biased(bench.reference.features, strong, kernel);
    const double mmd_weak = mmd_biased(bench.reference.features, weak, kernel);

    log << "seed " << seed << ": " << fmt(mmd_strong) << " / " << fmt(mmd_weak) << " / "
        << fmt(mmd_benign) << "; ";
    if (!(mmd_strong > mmd_benign) || !(mmd_strong > mmd_weak)) {
      detail = log.str() + "ordering violated";
      return false;
    }
  }
  detail = log.str() + "mmd(0.3) > mmd(0.07), mmd(benign) on all seeds";
  return true;
}

// 4: table 2a analogue
bool criterion_table2a(Context& ctx, std::string& detail) {
  const Bench& bench = ctx.bench(1);
  SweepParams params;
  params.sizes = {10, 50, 100};
  params.repetitions = 200;
  params.test.bootstrap_iterations = 1000;

  const Matrix adversarial =
      adversarial_matrix(craft_batch(bench.mlp, bench.held, AttackSpec::fgsm_spec(0.3)));
  const ConfidenceSweep hostile =
      confident_detection_sweep(bench.reference.features, adversarial, params, 404);
  const ConfidenceSweep benign =
      confident_detection_sweep(bench.reference.features, bench.held.features, params, 405);

  const bool hostile_ok =
      hostile.minimal_confident_size.has_value() && *hostile.minimal_confident_size <= 100;
  const bool benign_ok = !benign.minimal_confident_size.has_value();
  // benign acceptance should sit at the nominal level (1 - alpha +- 0.07)
  bool nominal = true;
  for (double f : benign.acceptance_frequency) nominal &= std::abs(f - 0.95) <= 0.07;
  detail = std::string("fgsm minimal size ") +
           (hostile.minimal_confident_size ? std::to_string(*hostile.minimal_confident_size)
                                           : "none") +
           ", benign " + (benign.minimal_confident_size ? "flagged" : "never confident") +
           ", benign acceptance " + fmt(benign.acceptance_frequency.front()) + ".." +
           fmt(benign.acceptance_frequency.back());
  return hostile_ok && benign_ok && nominal;
}

// 5: class-wise improvement for jsma, 3 seeds
bool criterion_classwise(Context& ctx, std::string& detail) {
  SweepParams params;
  params.sizes = {10, 25, 50, 100};
  params.repetitions = 200;
  params.test.bootstrap_iterations = 1000;

  std::ostringstream log;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Bench& bench = ctx.bench(seed);
    const BatchResult crafted =
        craft_batch(bench.mlp, bench.held, AttackSpec::jsma_spec(12));
    const Matrix candidates = adversarial_matrix(crafted);
    std::vector<int> predicted(crafted.outcomes.size());
    for (std::size_t i = 0; i < crafted.outcomes.size(); ++i) {
      predicted[i] = crafted.outcomes[i].predicted_after;
    }

    const ConfidenceSweep ungrouped = confident_detection_sweep(
        bench.reference.features, candidates, params, mix_seed(505, seed));
    const ClasswiseReport grouped =
        classwise_test(bench.reference, candidates, predicted, Grouping::predicted, params,
                       mix_seed(506, seed));

    const auto best = grouped.best_minimal_confident_size();
    const auto flat = ungrouped.minimal_confident_size;
    log << "seed " << seed << ": P " << (best ? std::to_string(*best) : "none") << " vs flat "
        << (flat ? std::to_string(*flat) : "none") << "; ";
    const bool ok = best.has_value() && (!flat.has_value() || *best <= *flat);
    if (!ok) {
      detail = log.str() + "class-wise did not improve";
      return false;
    }
  }
  detail = log.str() + "class-wise minimal <= ungrouped on all seeds";
  return true;
}

// 6: mixture monotonicity
bool criterion_mixture(Context& ctx, std::string& detail) {
  const Bench& bench = ctx.bench(1);
  SweepParams params;
  params.sizes = {20, 50};
  params.repetitions = 200;
  params.test.bootstrap_iterations = 1000;
  const std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};

  const Matrix adversarial =
      adversarial_matrix(craft_batch(bench.mlp, bench.train_pool, AttackSpec::fgsm_spec(0.3)));
  const MixtureGrid grid = mixture_sweep(bench.reference.features, adversarial,
                                         bench.held.features, fractions, params, 606);

  for (std::size_t s = 0; s < params.sizes.size(); ++s) {
    for (std::size_t hi = 1; hi < fractions.size(); ++hi) {
      for (std::size_t lo = 0; lo < hi; ++lo) {
        const double high = grid.cells[hi * params.sizes.size() + s].acceptance_frequency;
        const double low = grid.cells[lo * params.sizes.size() + s].acceptance_frequency;
        if (high < low - 0.05) {
          detail = "size " + std::to_string(params.sizes[s]) + ": acc(" + fmt(fractions[hi]) +
                   ")=" + fmt(high) + " < acc(" + fmt(fractions[lo]) + ")=" + fmt(low) +
                   " - 0.05";
          return false;
        }
      }
    }
  }
  detail = "non-decreasing (0.05 slack) across fractions {0,.25,.5,.75,1} at sizes {20,50}";
  return true;
}

// 7: analytic gradients vs central finite differences
bool criterion_gradients(Context&, std::string& detail) {
  const Dataset digits = synth_digits(5, 13);
  TrainConfig config;
  config.epochs = 3;
  config.seed = 7;
  config.hidden_layers = {8};
  const Classifier mlp = train(ModelFamily::mlp, digits, config);
  const Classifier logreg = train(ModelFamily::logreg, digits, config);

  RandomSource rng(707);
  double worst = 0.0;
  for (const Classifier* model : {&mlp, &logreg}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(64);
      for (double& v : x) v = rng.next_double();
      const int label = static_cast<int>(rng.next_below(10));
      const auto analytic = model->input_gradient_loss(x, label);

      constexpr double h = 1e-5;
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto loss_at = [&](double value) {
          const double keep = x[i];
          x[i] = value;
          const auto p = model->predict_proba(x);
          x[i] = keep;
          return -std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
        };
        const double numeric = (loss_at(x[i] + h) - loss_at(x[i] - h)) / (2.0 * h);
        num += (analytic[i] - numeric) * (analytic[i] - numeric);
        den += numeric * numeric;
      }
      worst = std::max(worst, den == 0.0 ? std::sqrt(num) : std::sqrt(num / den));
    }
  }
  detail = "max relative error " + fmt(worst) + " over 20 instances each";
  return worst < 1e-4;
}

// 8: outlier-class detection at the training epsilon, 2 seeds
bool criterion_detection(Context& ctx, std::string& detail) {
  std::ostringstream log;
  for (std::uint64_t seed : {1, 2}) {
    const Bench& bench = ctx.bench(seed);
    const Classifier& defended = ctx.fgsm_model(seed);
    const DetectionBreakdown b =
        evaluate_detection(defended, bench.held, AttackSpec::fgsm_spec(0.275));

    log << "seed " << seed << ": detected " << fmt(b.detected) << "; ";
    if (b.recovered_count + b.detected_count + b.error_count != b.total) {
      detail = log.str() + "rates do not partition";
      return false;
    }
    if (b.detected < 0.80) {
      detail = log.str() + "below the 80% bar";
      return false;
    }
  }
  detail = log.str() + "detected >= 0.80, partition exact";
  return true;
}

// 9: benign cost of the defense (same runs as 8)
bool criterion_benign_cost(Context& ctx, std::string& detail) {
  std::ostringstream log;
  for (std::uint64_t seed : {1, 2}) {
    const Bench& bench = ctx.bench(seed);
    const double base_acc = dataset_accuracy(ctx.base_model(seed), bench.held);
    const double defended_acc = dataset_accuracy(ctx.fgsm_model(seed), bench.held);
    const double outlier_rate = benign_outlier_rate(ctx.fgsm_model(seed), bench.held);

    log << "seed " << seed << ": acc " << fmt(defended_acc) << " vs base " << fmt(base_acc)
        << ", false-outlier " << fmt(outlier_rate) << "; ";
    if (defended_acc < base_acc - 0.02) {
      detail = log.str() + "accuracy dropped more than 2 points";
      return false;
    }
    if (outlier_rate > 0.02) {
      detail = log.str() + "false-outlier rate above 2%";
      return false;
    }
  }
  detail = log.str() + "within bounds";
  return true;
}

// 10: adaptive asymmetry, 2 seeds
bool criterion_adaptive(Context& ctx, std::string& detail) {
  std::ostringstream log;
  for (std::uint64_t seed : {1, 2}) {
    const Bench& bench = ctx.bench(seed);
    const Classifier jsma_trained =
        train_augmented(ModelFamily::mlp, bench.train_pool,
                        ctx.plan_for(AttackSpec::jsma_spec(12), mix_seed(seed, 0x60)),
                        mix_seed(seed, 0x61));
    const Classifier& fgsm_trained = ctx.fgsm_model(seed);

    const double err_jsma_under_fgsm =
        evaluate_detection(jsma_trained, bench.held, AttackSpec::fgsm_spec(0.275)).error;
    const double err_fgsm_under_jsma =
        evaluate_detection(fgsm_trained, bench.held, AttackSpec::jsma_spec(12)).error;

    log << "seed " << seed << ": " << fmt(err_jsma_under_fgsm) << " vs "
        << fmt(err_fgsm_under_jsma) << "; ";
    if (err_jsma_under_fgsm > 0.10) {
      detail = log.str() + "jsma-trained error above 10% under fgsm";
      return false;
    }
    if (err_fgsm_under_jsma < 3.0 * err_jsma_under_fgsm) {
      detail = log.str() + "reverse direction not 3x worse";
      return false;
    }
  }
  detail = log.str() + "direction holds on both seeds";
  return true;
}

// 11: black-box robustness trend
bool criterion_blackbox(Context& ctx, std::string& detail) {
  const Bench& bench = ctx.bench(1);
  const Classifier& victim = ctx.fgsm_model(1);
  const Classifier substitute =
      train_substitute(SubstituteKind::bb, ModelFamily::mlp, bench.train_pool,
                       ctx.plan_for(AttackSpec::fgsm_spec(0.275), 1), 0xdead);

  const BlackboxReport small =
      blackbox_transfer(victim, substitute, bench.held, AttackSpec::fgsm_spec(0.1));
  const BlackboxReport large =
      blackbox_transfer(victim, substitute, bench.held, AttackSpec::fgsm_spec(0.275));
  const BlackboxReport larger =
      blackbox_transfer(victim, substitute, bench.held, AttackSpec::fgsm_spec(0.4));

  detail = "detected " + fmt(large.breakdown.detected) + " at 0.275 vs " +
           fmt(small.breakdown.detected) + " at 0.1; errors " + fmt(large.breakdown.error) +
           ", " + fmt(larger.breakdown.error);
  if (large.breakdown.detected < small.breakdown.detected) return false;
  if (large.breakdown.error > 0.05 || larger.breakdown.error > 0.05) return false;
  return true;
}

// 12: command-level determinism via the CLI binary
bool criterion_determinism(Context&, std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "advstat_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  auto run = [&](const std::string& args) {
    const std::string command = std::string(ADVSTAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(command.c_str()));
  };
  auto outputs_of = [&](const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    json doc;
    in >> doc;
    return doc.at("outputs");
  };
  auto write_config = [&](const fs::path& path, const std::string& out_dir,
                          const std::string& extra) {
    std::ofstream out(path);
    out << R"({
      "dataset": { "kind": "synth_digits", "per_class": 20, "seed": 7 },
      "split": { "test_fraction": 0.2, "seed": 1 },
      "model": { "family": "mlp", "hidden": [16], "epochs": 15, "seed": 3 },
      "attack": { "kind": "fgsm", "epsilon": 0.275 },)"
        << extra << R"(
      "seed": 42,
      "out": ")" << out_dir << R"("
    })";
  };

  // train twice
  for (int round : {1, 2}) {
    const fs::path config = root / ("train" + std::to_string(round) + ".json");
    write_config(config, (root / ("train_out" + std::to_string(round))).string(), "");
    if (run("train --config " + config.string()) != 0) {
      detail = "train invocation failed";
      return false;
    }
  }
  if (outputs_of(root / "train_out1") != outputs_of(root / "train_out2")) {
    detail = "train outputs differ between identical runs";
    return false;
  }

  // attack twice, against the first model
  const std::string model = (root / "train_out1" / "model.json").string();
  for (int round : {1, 2}) {
    const fs::path config = root / ("attack" + std::to_string(round) + ".json");
    write_config(config, (root / ("attack_out" + std::to_string(round))).string(), "");
    if (run("attack --config " + config.string() + " --model " + model) != 0) {
      detail = "attack invocation failed";
      return false;
    }
  }
  if (outputs_of(root / "attack_out1") != outputs_of(root / "attack_out2")) {
    detail = "attack outputs differ between identical runs";
    return false;
  }

  // stat twice over the crafted file
  const std::string crafted = (root / "attack_out1" / "crafted.csv").string();
  for (int round : {1, 2}) {
    const fs::path config = root / ("stat" + std::to_string(round) + ".json");
    write_config(config, (root / ("stat_out" + std::to_string(round))).string(),
                 R"( "stat": { "mode": "sweep", "sizes": [5, 10], "repetitions": 20,
                     "bootstrap": 200, "candidate": ")" + crafted + R"(" },)");
    if (run("stat --config " + config.string()) != 0) {
      detail = "stat invocation failed";
      return false;
    }
  }
  if (outputs_of(root / "stat_out1") != outputs_of(root / "stat_out2")) {
    detail = "stat outputs differ between identical runs";
    return false;
  }

  // defend twice
  for (int round : {1, 2}) {
    const fs::path config = root / ("defend" + std::to_string(round) + ".json");
    write_config(config, (root / ("defend_out" + std::to_string(round))).string(),
                 R"( "defense": { "attacks": [ { "kind": "fgsm", "epsilon": 0.275 } ] },)");
    if (run("defend --config " + config.string()) != 0) {
      detail = "defend invocation failed";
      return false;
    }
  }
  if (outputs_of(root / "defend_out1") != outputs_of(root / "defend_out2")) {
    detail = "defend outputs differ between identical runs";
    return false;
  }

  // repro twice
  for (int round : {1, 2}) {
    if (run("repro table1 --per-class 30 --out " +
            (root / ("repro_out" + std::to_string(round))).string()) != 0) {
      detail = "repro invocation failed";
      return false;
    }
  }
  if (outputs_of(root / "repro_out1") != outputs_of(root / "repro_out2")) {
    detail = "repro outputs differ between identical runs";
    return false;
  }

  fs::remove_all(root);
  detail = "train, attack, stat, defend, repro: identical digests on repeat runs";
  return true;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(Context&, std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "MMD/ED brute-force oracle equivalence (1e-12)", criterion_oracle_equivalence},
      {2, "test calibration under H0 (rejection in [0.01, 0.12])", criterion_calibration},
      {3, "table 1 ordering analogue (3 seeds)", criterion_table1_ordering},
      {4, "table 2a analogue (confident size <= 100; benign never)", criterion_table2a},
      {5, "class-wise improvement for jsma (3 seeds)", criterion_classwise},
      {6, "mixture monotonicity (fig 3)", criterion_mixture},
      {7, "gradient correctness vs finite differences (1e-4)", criterion_gradients},
      {8, "outlier-class detection >= 80% (2 seeds)", criterion_detection},
      {9, "benign cost bound (<= 2 points, <= 2% false-outlier)", criterion_benign_cost},
      {10, "adaptive asymmetry (table 5 direction, 2 seeds)", criterion_adaptive},
      {11, "black-box robustness trend (table 6)", criterion_blackbox},
      {12, "command determinism (identical digests)", criterion_determinism},
  };

  std::optional<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const Criterion& c : criteria) std::cout << c.id << ": " << c.name << "\n";
      return 0;
    }
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  Context ctx;
  bool all_passed = true;
  for (const Criterion& criterion : criteria) {
    if (only && *only != criterion.id) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = false;
    try {
      passed = criterion.run(ctx, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start);
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << criterion.id << ". " << criterion.name
              << " — " << detail << " [" << elapsed.count() << "s]" << std::endl;
    all_passed &= passed;
  }
  return all_passed ? 0 : 1;
}
