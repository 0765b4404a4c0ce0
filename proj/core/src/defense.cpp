#include "advstat/defense.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"
#include "train_internal.hpp"

namespace advstat {

void AugmentedTrainPlan::validate() const {
  base_config.validate();
  if (augmentation_attacks.empty()) {
    throw ContractError("AugmentedTrainPlan: augmentation attack list must not be empty");
  }
  for (const AttackSpec& a : augmentation_attacks) a.validate();
  if (!(legit_fraction > 0.0 && legit_fraction < 1.0)) {
    throw ContractError("AugmentedTrainPlan: legit fraction must lie inside (0, 1)");
  }
}

std::string to_string(SubstituteKind kind) {
  return kind == SubstituteKind::bb ? "bb" : "bb+1";
}

namespace {

/// Shuffled circular walk over a fixed id set; reshuffles on wrap.
class PoolWalk {
 public:
  PoolWalk(std::span<const std::size_t> ids, RandomSource& rng)
      : ids_(ids.begin(), ids.end()), rng_(&rng) {
    seeded_shuffle(ids_, *rng_);
  }

  std::size_t next() {
    if (cursor_ == ids_.size()) {
      seeded_shuffle(ids_, *rng_);
      cursor_ = 0;
    }
    return ids_[cursor_++];
  }

 private:
  std::vector<std::size_t> ids_;
  RandomSource* rng_;
  std::size_t cursor_ = 0;
};

/// For jsma, the outlier-class protocol targets the strongest original
/// class: second-most-confident, never the outlier.
AttackSpec effective_eval_spec(const AttackSpec& spec) {
  AttackSpec out = spec;
  if (out.kind == AttackKind::jsma &&
      out.target.kind == TargetRule::Kind::second_most_confident) {
    out.target = TargetRule::excluding_outlier();
  }
  return out;
}

DetectionBreakdown classify_outcomes(const Classifier& victim, const BatchResult& crafted,
                                     const AttackSpec& attack) {
  DetectionBreakdown b;
  b.attack = attack;
  b.total = crafted.outcomes.size();
  const int outlier = victim.outlier_class();
  for (const AttackOutcome& o : crafted.outcomes) {
    const int predicted = victim.predict(o.adversarial);
    if (predicted == o.source_label) {
      ++b.recovered_count;
    } else if (predicted == outlier) {
      ++b.detected_count;
    } else {
      ++b.error_count;
    }
  }
  if (b.total > 0) {
    const auto total = static_cast<double>(b.total);
    b.recovered = static_cast<double>(b.recovered_count) / total;
    b.detected = static_cast<double>(b.detected_count) / total;
    b.error = static_cast<double>(b.error_count) / total;
  }
  return b;
}

}  // namespace

std::vector<MixedBatch> plan_mixed_epoch(std::span<const std::size_t> legit_ids,
                                         std::span<const std::size_t> adversarial_ids,
                                         int batch_size, double legit_fraction,
                                         RandomSource& rng) {
  if (legit_ids.empty() || adversarial_ids.empty()) {
    throw ContractError("plan_mixed_epoch: both pools must be non-empty");
  }
  if (batch_size < 2) throw ContractError("plan_mixed_epoch: batch size must be at least 2");

  auto legit_k = static_cast<std::size_t>(
      std::llround(legit_fraction * static_cast<double>(batch_size)));
  legit_k = std::clamp<std::size_t>(legit_k, 1, static_cast<std::size_t>(batch_size) - 1);
  const std::size_t adv_k = static_cast<std::size_t>(batch_size) - legit_k;

  const std::size_t batches =
      (legit_ids.size() + legit_k - 1) / legit_k;  // cover the legit pool once

  PoolWalk legit_walk(legit_ids, rng);
  PoolWalk adv_walk(adversarial_ids, rng);

  std::vector<MixedBatch> plan(batches);
  for (MixedBatch& batch : plan) {
    batch.legit.reserve(legit_k);
    batch.adversarial.reserve(adv_k);
    for (std::size_t i = 0; i < legit_k; ++i) batch.legit.push_back(legit_walk.next());
    for (std::size_t i = 0; i < adv_k; ++i) batch.adversarial.push_back(adv_walk.next());
  }
  return plan;
}

Classifier train_augmented(ModelFamily family, const Dataset& train_data,
                           const AugmentedTrainPlan& plan, std::uint64_t seed) {
  plan.validate();
  if (family == ModelFamily::decision_tree) {
    throw ContractError("train_augmented: decision trees take no outlier class");
  }
  if (train_data.size() == 0) throw ContractError("train_augmented: empty training data");

  // initial model on the raw data
  TrainConfig initial_config = plan.base_config;
  initial_config.seed = mix_seed(seed, 0x01);
  const Classifier initial = train(family, train_data, initial_config);

  // adversarial pool, crafted once against the initial model
  Matrix outlier_rows(0, train_data.dim());
  for (const AttackSpec& attack : plan.augmentation_attacks) {
    const BatchResult crafted = craft_batch(initial, train_data, effective_eval_spec(attack));
    for (const AttackOutcome& o : crafted.outcomes) {
      if (plan.include_failed_crafts || o.succeeded) outlier_rows.append_row(o.adversarial);
    }
  }
  if (outlier_rows.rows() == 0) {
    throw TrainingError("train_augmented: augmentation produced no adversarial rows");
  }

  // combined sample: legitimate rows first, outlier rows after
  const std::size_t n_legit = train_data.size();
  const std::size_t n_adv = outlier_rows.rows();
  Matrix features = vstack(train_data.features, outlier_rows);
  std::vector<int> labels = train_data.labels;
  labels.resize(n_legit + n_adv, train_data.num_classes);  // outlier label = K

  TrainConfig config = plan.base_config;
  config.seed = mix_seed(seed, 0x02);

  // early-stopping carve-out, 10% of each pool
  RandomSource carve_rng = RandomSource(config.seed).derive(0x33);
  std::vector<std::size_t> legit_order = shuffled_indices(n_legit, carve_rng);
  std::vector<std::size_t> adv_order = shuffled_indices(n_adv, carve_rng);
  for (std::size_t& i : adv_order) i += n_legit;

  std::size_t legit_val = 0, adv_val = 0;
  if (config.patience > 0 && config.epochs > 0 && n_legit >= 20 && n_adv >= 20) {
    legit_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n_legit)));
    adv_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n_adv)));
  }

  std::vector<std::size_t> val_rows(legit_order.begin(),
                                    legit_order.begin() + static_cast<std::ptrdiff_t>(legit_val));
  val_rows.insert(val_rows.end(), adv_order.begin(),
                  adv_order.begin() + static_cast<std::ptrdiff_t>(adv_val));
  const std::vector<std::size_t> legit_train(
      legit_order.begin() + static_cast<std::ptrdiff_t>(legit_val), legit_order.end());
  const std::vector<std::size_t> adv_train(
      adv_order.begin() + static_cast<std::ptrdiff_t>(adv_val), adv_order.end());

  const int batch_size = config.batch_size;
  const double fraction = plan.legit_fraction;
  detail::BatchPlanFn batch_plan = [&legit_train, &adv_train, batch_size, fraction](
                                       int, RandomSource& rng) {
    const auto mixed = plan_mixed_epoch(legit_train, adv_train, batch_size, fraction, rng);
    std::vector<std::vector<std::size_t>> batches;
    batches.reserve(mixed.size());
    for (const MixedBatch& b : mixed) {
      std::vector<std::size_t> rows = b.legit;
      rows.insert(rows.end(), b.adversarial.begin(), b.adversarial.end());
      batches.push_back(std::move(rows));
    }
    return batches;
  };

  return detail::train_gradient_model(family, features, labels, train_data.num_classes + 1,
                                      /*outlier_flag=*/true, config, val_rows, batch_plan);
}

DetectionBreakdown evaluate_detection(const Classifier& augmented, const Dataset& test_data,
                                      const AttackSpec& attack) {
  if (!augmented.has_outlier_class()) {
    throw ContractError("evaluate_detection: model has no outlier class");
  }
  const AttackSpec spec = effective_eval_spec(attack);
  const BatchResult crafted = craft_batch(augmented, test_data, spec);
  return classify_outcomes(augmented, crafted, attack);
}

std::vector<AdaptiveRow> adaptive_matrix(const Classifier& augmented,
                                         const AttackSpec& train_attack,
                                         std::span<const AttackSpec> eval_attacks,
                                         const Dataset& test_data) {
  std::vector<AdaptiveRow> rows;
  rows.reserve(eval_attacks.size());
  for (const AttackSpec& eval_attack : eval_attacks) {
    rows.push_back(
        AdaptiveRow{train_attack, eval_attack, evaluate_detection(augmented, test_data, eval_attack)});
  }
  return rows;
}

Classifier train_substitute(SubstituteKind kind, ModelFamily family, const Dataset& train_data,
                            const AugmentedTrainPlan& plan, std::uint64_t seed) {
  if (kind == SubstituteKind::bb_plus_one) {
    return train_augmented(family, train_data, plan, seed);
  }
  TrainConfig config = plan.base_config;
  config.seed = mix_seed(seed, 0x04);
  return train(family, train_data, config);
}

BlackboxReport blackbox_transfer(const Classifier& victim, const Classifier& substitute,
                                 const Dataset& test_data, const AttackSpec& attack) {
  if (!victim.has_outlier_class()) {
    throw ContractError("blackbox_transfer: victim has no outlier class");
  }
  if (victim.input_dim() != substitute.input_dim() ||
      victim.original_classes() != substitute.original_classes()) {
    throw ContractError("blackbox_transfer: substitute shape does not match the victim");
  }

  const AttackSpec spec = effective_eval_spec(attack);
  const BatchResult crafted = craft_batch(substitute, test_data, spec);

  BlackboxReport report;
  report.breakdown = classify_outcomes(victim, crafted, attack);

  // agreement on the raw test rows, restricted to the original classes
  const int original = victim.original_classes();
  std::size_t agree = 0;
  for (std::size_t i = 0; i < test_data.size(); ++i) {
    const auto x = test_data.features.row(i);
    auto restricted_argmax = [original](const std::vector<double>& probs) {
      return static_cast<int>(
          std::max_element(probs.begin(), probs.begin() + original) - probs.begin());
    };
    const int v = restricted_argmax(victim.predict_proba(x));
    const int s = restricted_argmax(substitute.predict_proba(x));
    if (v == s) ++agree;
  }
  report.substitute_agreement =
      test_data.size() == 0 ? 0.0
                            : static_cast<double>(agree) / static_cast<double>(test_data.size());
  return report;
}

std::vector<std::vector<std::size_t>> confusion_matrix(const Classifier& model,
                                                       const Dataset& data) {
  const int k = model.num_outputs();
  for (int y : data.labels) {
    if (y >= model.original_classes()) {
      throw ContractError("confusion_matrix: label outside the model's original classes");
    }
  }
  std::vector<std::vector<std::size_t>> counts(
      static_cast<std::size_t>(k), std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int predicted = model.predict(data.features.row(i));
    ++counts[static_cast<std::size_t>(data.labels[i])][static_cast<std::size_t>(predicted)];
  }
  return counts;
}

double benign_outlier_rate(const Classifier& model, const Dataset& data) {
  if (!model.has_outlier_class() || data.size() == 0) return 0.0;
  const int outlier = model.outlier_class();
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (model.predict(data.features.row(i)) == outlier) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(data.size());
}

}  // namespace advstat
