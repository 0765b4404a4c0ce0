#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advstat/attacks.hpp"
#include "advstat/classifier.hpp"
#include "advstat/dataset.hpp"
#include "advstat/random.hpp"

namespace advstat {

struct AugmentedTrainPlan {
  TrainConfig base_config;
  std::vector<AttackSpec> augmentation_attacks;
  double legit_fraction = 2.0 / 3.0;  // legitimate share of every mini-batch
  /// Crafted rows that failed to flip the prediction still join the outlier
  /// pool when set; they carry the perturbation signature either way.
  bool include_failed_crafts = true;

  void validate() const;  // throws ContractError
};

struct DetectionBreakdown {
  double recovered = 0.0;  // classified as the original label
  double detected = 0.0;   // classified as the outlier class
  double error = 0.0;      // anything else
  std::size_t recovered_count = 0;
  std::size_t detected_count = 0;
  std::size_t error_count = 0;
  std::size_t total = 0;
  AttackSpec attack;
};

/// One epoch of mixed mini-batches: every batch draws round(batch_size *
/// legit_fraction) rows from the legitimate ids and the remainder from the
/// adversarial ids. Both walks are shuffled per epoch and reshuffle on wrap;
/// the epoch covers the legitimate pool at least once.
struct MixedBatch {
  std::vector<std::size_t> legit;
  std::vector<std::size_t> adversarial;
};
std::vector<MixedBatch> plan_mixed_epoch(std::span<const std::size_t> legit_ids,
                                         std::span<const std::size_t> adversarial_ids,
                                         int batch_size, double legit_fraction,
                                         RandomSource& rng);

/// Outlier-class training: fit an initial model on the raw data, craft the
/// augmentation pool against it over the training inputs with every attack in
/// the plan, then train a fresh (K+1)-output model on mixed batches where the
/// crafted rows all carry the outlier label. Deterministic in the seed.
Classifier train_augmented(ModelFamily family, const Dataset& train_data,
                           const AugmentedTrainPlan& plan, std::uint64_t seed);

/// Crafts against the augmented model itself (white-box) on the test rows and
/// classifies every crafted input: original label = recovered, outlier class
/// = detected, anything else = error.
DetectionBreakdown evaluate_detection(const Classifier& augmented, const Dataset& test_data,
                                      const AttackSpec& attack);

struct AdaptiveRow {
  AttackSpec train_attack;
  AttackSpec eval_attack;
  DetectionBreakdown breakdown;
};

/// Detection under attacks other than the one the outlier class was trained
/// on; one row per evaluation attack.
std::vector<AdaptiveRow> adaptive_matrix(const Classifier& augmented,
                                         const AttackSpec& train_attack,
                                         std::span<const AttackSpec> eval_attacks,
                                         const Dataset& test_data);

enum class SubstituteKind { bb, bb_plus_one };

std::string to_string(SubstituteKind kind);

/// The transfer adversary's auxiliary model: same family and data as the
/// victim, independent seed; bb_plus_one additionally trains its own outlier
/// class with the victim's plan.
Classifier train_substitute(SubstituteKind kind, ModelFamily family, const Dataset& train_data,
                            const AugmentedTrainPlan& plan, std::uint64_t seed);

struct BlackboxReport {
  DetectionBreakdown breakdown;
  /// Fraction of test rows where substitute and victim predictions agree,
  /// both restricted to the original classes.
  double substitute_agreement = 0.0;
};

/// Crafts on the substitute over the test rows, then classifies the crafted
/// inputs with the victim. Passing the victim itself as the substitute
/// reduces to evaluate_detection.
BlackboxReport blackbox_transfer(const Classifier& victim, const Classifier& substitute,
                                 const Dataset& test_data, const AttackSpec& attack);

/// counts[true_label][predicted]; (K+1)^2 for outlier-class models, K^2
/// otherwise. Data labels must be original classes.
std::vector<std::vector<std::size_t>> confusion_matrix(const Classifier& model,
                                                       const Dataset& data);

/// Share of rows the model sends to the outlier class.
double benign_outlier_rate(const Classifier& model, const Dataset& data);

}  // namespace advstat
