#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "advstat/dataset.hpp"
#include "advstat/matrix.hpp"

namespace advstat {

enum class ModelFamily { logreg, mlp, linear_svm, decision_tree };

std::string to_string(ModelFamily family);
ModelFamily family_from_string(const std::string& name);  // FormatError on unknown names

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.05;
  double l2_penalty = 1e-4;
  double dropout = 0.25;  // mlp hidden activations, training only
  int patience = 5;       // early-stopping epochs without improvement
  std::uint64_t seed = 0;
  std::vector<int> hidden_layers = {32};  // mlp only
  int max_depth = 8;                      // decision_tree only

  void validate() const;  // throws ContractError
};

struct DenseLayer {
  Matrix weights;            // out x in
  std::vector<double> bias;  // out
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;

  bool is_leaf() const { return feature < 0; }
};

/// A trained model of one of the four families behind one contract:
/// probabilities, argmax prediction, analytic input gradients (differentiable
/// families), structured-text serialization. Immutable once built; safe to
/// share across threads.
class Classifier {
 public:
  Classifier() = default;

  ModelFamily family() const { return family_; }
  int input_dim() const { return input_dim_; }

  /// Number of output classes, including the outlier class when present.
  int num_outputs() const { return num_outputs_; }
  bool has_outlier_class() const { return has_outlier_class_; }
  /// Index of the outlier class (always the last output).
  int outlier_class() const;
  /// Number of original data classes (num_outputs minus the outlier class).
  int original_classes() const { return has_outlier_class_ ? num_outputs_ - 1 : num_outputs_; }

  bool is_differentiable() const { return family_ != ModelFamily::decision_tree; }

  /// Probability vector over all outputs; sums to 1. logreg/mlp: softmax;
  /// linear_svm: softmax over one-vs-rest margins; decision_tree: one-hot of
  /// the leaf class.
  std::vector<double> predict_proba(std::span<const double> x) const;

  /// Argmax of predict_proba; ties break toward the lowest class index.
  int predict(std::span<const double> x) const;

  /// d(cross-entropy at (x, label)) / dx. Decision trees are unsupported.
  std::vector<double> input_gradient_loss(std::span<const double> x, int label) const;

  /// d(pre-softmax score of class c) / dx. For linear families this is the
  /// weight row of c, independent of x.
  std::vector<double> input_gradient_score(std::span<const double> x, int class_index) const;

  /// Pre-softmax scores (logits or margins). Decision trees are unsupported.
  std::vector<double> scores(std::span<const double> x) const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<TreeNode>& tree() const { return tree_; }

  void save(const std::filesystem::path& path) const;
  static Classifier load(const std::filesystem::path& path);

  // construction from explicit parameters (training, deserialization, tests)
  static Classifier from_layers(ModelFamily family, std::vector<DenseLayer> layers,
                                bool outlier_class);
  static Classifier from_tree(std::vector<TreeNode> nodes, int input_dim, int num_classes);

 private:
  ModelFamily family_ = ModelFamily::logreg;
  int input_dim_ = 0;
  int num_outputs_ = 0;
  bool has_outlier_class_ = false;
  std::vector<DenseLayer> layers_;  // logreg/linear_svm: single layer; mlp: hidden + output
  std::vector<TreeNode> tree_;

  void check_input(std::span<const double> x) const;
};

/// Trains a model of the given family. logreg/mlp: mini-batch gradient
/// descent on cross-entropy; linear_svm: one-vs-rest squared hinge with l2,
/// subgradient descent; decision_tree: greedy CART on Gini impurity. The
/// gradient families hold out 10% of the rows and stop early on stalled
/// validation loss. Deterministic given (data, config, seed).
Classifier train(ModelFamily family, const Dataset& data, const TrainConfig& config);

double dataset_accuracy(const Classifier& model, const Dataset& data);
double mean_cross_entropy(const Classifier& model, const Dataset& data);

}  // namespace advstat
