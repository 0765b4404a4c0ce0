#include "advstat/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"

namespace advstat {

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::logreg: return "logreg";
    case ModelFamily::mlp: return "mlp";
    case ModelFamily::linear_svm: return "linear_svm";
    case ModelFamily::decision_tree: return "decision_tree";
  }
  return "unknown";
}

ModelFamily family_from_string(const std::string& name) {
  if (name == "logreg") return ModelFamily::logreg;
  if (name == "mlp") return ModelFamily::mlp;
  if (name == "linear_svm") return ModelFamily::linear_svm;
  if (name == "decision_tree") return ModelFamily::decision_tree;
  throw FormatError("unknown model family: " + name);
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ContractError("TrainConfig: epochs must be nonnegative");
  if (batch_size < 1) throw ContractError("TrainConfig: batch size must be at least 1");
  if (!(learning_rate > 0.0)) throw ContractError("TrainConfig: learning rate must be positive");
  if (l2_penalty < 0.0) throw ContractError("TrainConfig: l2 penalty must be nonnegative");
  if (dropout < 0.0 || dropout >= 1.0) throw ContractError("TrainConfig: dropout must be in [0,1)");
  if (patience < 0) throw ContractError("TrainConfig: patience must be nonnegative");
  if (max_depth < 0) throw ContractError("TrainConfig: max depth must be nonnegative");
  for (int h : hidden_layers) {
    if (h < 1) throw ContractError("TrainConfig: hidden layer widths must be positive");
  }
}

int Classifier::outlier_class() const {
  if (!has_outlier_class_) {
    throw UnsupportedError("classifier was not trained with an outlier class");
  }
  return num_outputs_ - 1;
}

void Classifier::check_input(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw ContractError("input length does not match model input dimension");
  }
}

namespace {

void softmax_in_place(std::vector<double>& scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace

std::vector<double> Classifier::scores(std::span<const double> x) const {
  check_input(x);
  if (family_ == ModelFamily::decision_tree) {
    throw UnsupportedError("decision trees have no score vector");
  }
  std::vector<double> act(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::vector<double> next(layer.bias.size());
    for (std::size_t o = 0; o < next.size(); ++o) {
      double acc = layer.bias[o];
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < act.size(); ++i) acc += w[i] * act[i];
      next[o] = acc;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : next) v = std::max(0.0, v);  // ReLU on hidden layers
    }
    act = std::move(next);
  }
  return act;
}

std::vector<double> Classifier::predict_proba(std::span<const double> x) const {
  if (family_ == ModelFamily::decision_tree) {
    check_input(x);
    int node = 0;
    while (!tree_[static_cast<std::size_t>(node)].is_leaf()) {
      const TreeNode& t = tree_[static_cast<std::size_t>(node)];
      node = x[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
    }
    std::vector<double> probs(static_cast<std::size_t>(num_outputs_), 0.0);
    probs[static_cast<std::size_t>(tree_[static_cast<std::size_t>(node)].leaf_class)] = 1.0;
    return probs;
  }
  std::vector<double> s = scores(x);
  softmax_in_place(s);
  return s;
}

int Classifier::predict(std::span<const double> x) const {
  const std::vector<double> probs = predict_proba(x);
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::vector<double> Classifier::input_gradient_score(std::span<const double> x,
                                                     int class_index) const {
  check_input(x);
  if (!is_differentiable()) {
    throw UnsupportedError("input gradients are undefined for decision trees");
  }
  if (class_index < 0 || class_index >= num_outputs_) {
    throw ContractError("input_gradient_score: class index out of range");
  }
  std::vector<double> delta(static_cast<std::size_t>(num_outputs_), 0.0);
  delta[static_cast<std::size_t>(class_index)] = 1.0;

  // forward pass keeping pre-activations, then backprop delta to the input
  std::vector<std::vector<double>> activations;  // post-activation per layer, [0] = x
  activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::vector<double> z(layer.bias.size());
    const auto& prev = activations.back();
    for (std::size_t o = 0; o < z.size(); ++o) {
      double acc = layer.bias[o];
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev.size(); ++i) acc += w[i] * prev[i];
      z[o] = acc;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : z) v = std::max(0.0, v);
    }
    activations.push_back(std::move(z));
  }

  std::vector<double> grad = delta;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    if (l + 1 < layers_.size()) {
      // grad currently sits after the ReLU of layer l; gate it
      const auto& post = activations[l + 1];
      for (std::size_t o = 0; o < grad.size(); ++o) {
        if (post[o] <= 0.0) grad[o] = 0.0;
      }
    }
    std::vector<double> prev_grad(layer.weights.cols(), 0.0);
    for (std::size_t o = 0; o < grad.size(); ++o) {
      if (grad[o] == 0.0) continue;
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev_grad.size(); ++i) prev_grad[i] += grad[o] * w[i];
    }
    grad = std::move(prev_grad);
  }
  return grad;
}

std::vector<double> Classifier::input_gradient_loss(std::span<const double> x, int label) const {
  check_input(x);
  if (!is_differentiable()) {
    throw UnsupportedError("input gradients are undefined for decision trees");
  }
  if (label < 0 || label >= num_outputs_) {
    throw ContractError("input_gradient_loss: label out of range");
  }
  // d CE / d score_k = p_k - [k == label]; chain through the score Jacobian
  std::vector<double> p = predict_proba(x);
  p[static_cast<std::size_t>(label)] -= 1.0;

  std::vector<std::vector<double>> activations;
  activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::vector<double> z(layer.bias.size());
    const auto& prev = activations.back();
    for (std::size_t o = 0; o < z.size(); ++o) {
      double acc = layer.bias[o];
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev.size(); ++i) acc += w[i] * prev[i];
      z[o] = acc;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : z) v = std::max(0.0, v);
    }
    activations.push_back(std::move(z));
  }

  std::vector<double> grad = std::move(p);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    if (l + 1 < layers_.size()) {
      const auto& post = activations[l + 1];
      for (std::size_t o = 0; o < grad.size(); ++o) {
        if (post[o] <= 0.0) grad[o] = 0.0;
      }
    }
    std::vector<double> prev_grad(layer.weights.cols(), 0.0);
    for (std::size_t o = 0; o < grad.size(); ++o) {
      if (grad[o] == 0.0) continue;
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev_grad.size(); ++i) prev_grad[i] += grad[o] * w[i];
    }
    grad = std::move(prev_grad);
  }
  return grad;
}

Classifier Classifier::from_layers(ModelFamily family, std::vector<DenseLayer> layers,
                                   bool outlier_class) {
  if (family == ModelFamily::decision_tree) {
    throw ContractError("from_layers: decision trees are built from nodes");
  }
  if (layers.empty()) throw ContractError("from_layers: at least one layer required");
  if ((family == ModelFamily::logreg || family == ModelFamily::linear_svm) && layers.size() != 1) {
    throw ContractError("from_layers: linear families take exactly one layer");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weights.rows() != layers[l].bias.size()) {
      throw ContractError("from_layers: bias length must match output count");
    }
    if (l > 0 && layers[l].weights.cols() != layers[l - 1].bias.size()) {
      throw ContractError("from_layers: consecutive layer shapes disagree");
    }
  }
  Classifier c;
  c.family_ = family;
  c.input_dim_ = static_cast<int>(layers.front().weights.cols());
  c.num_outputs_ = static_cast<int>(layers.back().bias.size());
  c.has_outlier_class_ = outlier_class;
  c.layers_ = std::move(layers);
  return c;
}

Classifier Classifier::from_tree(std::vector<TreeNode> nodes, int input_dim, int num_classes) {
  if (nodes.empty()) throw ContractError("from_tree: empty node list");
  for (const TreeNode& t : nodes) {
    if (t.is_leaf()) {
      if (t.leaf_class < 0 || t.leaf_class >= num_classes) {
        throw ContractError("from_tree: leaf class out of range");
      }
    } else {
      if (t.left < 0 || t.right < 0 || t.left >= static_cast<int>(nodes.size()) ||
          t.right >= static_cast<int>(nodes.size())) {
        throw ContractError("from_tree: child index out of range");
      }
      if (t.feature >= input_dim) throw ContractError("from_tree: split feature out of range");
    }
  }
  Classifier c;
  c.family_ = ModelFamily::decision_tree;
  c.input_dim_ = input_dim;
  c.num_outputs_ = num_classes;
  c.has_outlier_class_ = false;
  c.tree_ = std::move(nodes);
  return c;
}

double dataset_accuracy(const Classifier& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (model.predict(data.features.row(i)) == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double mean_cross_entropy(const Classifier& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> p = model.predict_proba(data.features.row(i));
    const double py = std::max(p[static_cast<std::size_t>(data.labels[i])], 1e-300);
    total += -std::log(py);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace advstat
