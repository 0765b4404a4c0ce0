#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advstat/classifier.hpp"
#include "advstat/dataset.hpp"

namespace advstat {

enum class AttackKind { fgsm, jsma, svm_shift, dt_path };

std::string to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);  // FormatError

/// How a targeted attack picks its class: the second-most-confident class on
/// x, the same rule skipping the outlier class, or an explicit class index.
struct TargetRule {
  enum class Kind { second_most_confident, exclude_outlier, explicit_class };
  Kind kind = Kind::second_most_confident;
  int class_index = -1;

  static TargetRule second() { return {Kind::second_most_confident, -1}; }
  static TargetRule excluding_outlier() { return {Kind::exclude_outlier, -1}; }
  static TargetRule explicit_target(int c) { return {Kind::explicit_class, c}; }
};

struct AttackSpec {
  AttackKind kind = AttackKind::fgsm;
  double epsilon = 0.1;   // fgsm, svm_shift
  int budget = 1;         // jsma, dt_path: max features perturbed
  TargetRule target = TargetRule::second();
  bool variance_scaled = false;  // fgsm on tabular domains: step scales per-feature stddev

  static AttackSpec fgsm_spec(double epsilon, bool variance_scaled = false);
  static AttackSpec jsma_spec(int budget, TargetRule target = TargetRule::second());
  static AttackSpec svm_shift_spec(double epsilon);
  static AttackSpec dt_path_spec(int budget);

  void validate() const;  // throws ContractError
};

struct AttackOutcome {
  std::vector<double> original;
  std::vector<double> adversarial;
  int source_label = -1;
  int predicted_before = -1;
  int predicted_after = -1;
  std::size_t features_changed = 0;
  bool succeeded = false;  // adversarial input is misclassified w.r.t. the source label
};

/// One-shot step of epsilon in the direction of the loss-gradient sign,
/// clamped back into the domain. sign(0) = 0. variance_scaled multiplies
/// each feature's step by that feature's stddev (tabular domains).
AttackOutcome fgsm(const Classifier& model, std::span<const double> x, int label, double epsilon,
                   const FeatureDomain& domain, bool variance_scaled = false);

/// Iterative saliency attack: per round, saturate the feature with the
/// largest saliency toward the target class, up to `budget` features, early
/// stopping as soon as the model predicts the target.
AttackOutcome jsma(const Classifier& model, std::span<const double> x, int label,
                   const TargetRule& target, int budget, const FeatureDomain& domain);

/// Shifts x by epsilon along the unit weight vector of the target class of a
/// one-vs-rest linear SVM.
AttackOutcome svm_shift(const Classifier& model, std::span<const double> x, int label,
                        int target_class, double epsilon, const FeatureDomain& domain);

/// Decision-tree attack: walk to the nearest differently-classified leaf and
/// flip the split feature at the deepest common ancestor, repeating until the
/// prediction changes or the budget is spent.
AttackOutcome dt_path(const Classifier& model, std::span<const double> x, int label, int budget,
                      const FeatureDomain& domain);

/// Routes to the attack selected by the spec.
AttackOutcome craft_one(const Classifier& model, std::span<const double> x, int label,
                        const AttackSpec& spec, const FeatureDomain& domain);

struct BatchSummary {
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  double success_rate = 0.0;  // 0 when attempted == 0
  bool no_samples = false;
  double mean_epsilon = 0.0;          // fgsm / svm_shift, over succeeded outcomes
  double mean_features_changed = 0.0; // jsma / dt_path, over succeeded outcomes
  std::vector<std::string> failures;  // per-item errors the batch continued past
};

struct BatchResult {
  std::vector<AttackOutcome> outcomes;  // one per dataset row
  BatchSummary summary;
};

/// Applies the attack to every row. Per-item crafting errors leave that row
/// unperturbed and are recorded; an attack/family mismatch throws up front.
BatchResult craft_batch(const Classifier& model, const Dataset& data, const AttackSpec& spec);

/// Rows of the crafted inputs, in dataset order.
Matrix adversarial_matrix(const BatchResult& result);

}  // namespace advstat
