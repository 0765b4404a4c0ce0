#include "advstat/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "advstat/errors.hpp"

namespace advstat {

namespace {
constexpr double kTreeMargin = 1e-6;
}

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::fgsm: return "fgsm";
    case AttackKind::jsma: return "jsma";
    case AttackKind::svm_shift: return "svm_shift";
    case AttackKind::dt_path: return "dt_path";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "fgsm") return AttackKind::fgsm;
  if (name == "jsma") return AttackKind::jsma;
  if (name == "svm_shift") return AttackKind::svm_shift;
  if (name == "dt_path") return AttackKind::dt_path;
  throw FormatError("unknown attack kind: " + name);
}

AttackSpec AttackSpec::fgsm_spec(double epsilon, bool variance_scaled) {
  AttackSpec s;
  s.kind = AttackKind::fgsm;
  s.epsilon = epsilon;
  s.variance_scaled = variance_scaled;
  s.validate();
  return s;
}

AttackSpec AttackSpec::jsma_spec(int budget, TargetRule target) {
  AttackSpec s;
  s.kind = AttackKind::jsma;
  s.budget = budget;
  s.target = target;
  s.validate();
  return s;
}

AttackSpec AttackSpec::svm_shift_spec(double epsilon) {
  AttackSpec s;
  s.kind = AttackKind::svm_shift;
  s.epsilon = epsilon;
  s.validate();
  return s;
}

AttackSpec AttackSpec::dt_path_spec(int budget) {
  AttackSpec s;
  s.kind = AttackKind::dt_path;
  s.budget = budget;
  s.validate();
  return s;
}

void AttackSpec::validate() const {
  if ((kind == AttackKind::fgsm || kind == AttackKind::svm_shift) && !(epsilon > 0.0)) {
    throw ContractError("AttackSpec: epsilon must be positive");
  }
  if ((kind == AttackKind::jsma || kind == AttackKind::dt_path) && budget < 0) {
    throw ContractError("AttackSpec: feature budget must be nonnegative");
  }
}

namespace {

AttackOutcome make_outcome(const Classifier& model, std::span<const double> x, int label,
                           std::vector<double> adversarial) {
  AttackOutcome out;
  out.original.assign(x.begin(), x.end());
  out.source_label = label;
  out.predicted_before = model.predict(x);
  out.predicted_after = model.predict(adversarial);
  out.features_changed = 0;
  for (std::size_t i = 0; i < out.original.size(); ++i) {
    if (adversarial[i] != out.original[i]) ++out.features_changed;
  }
  out.adversarial = std::move(adversarial);
  out.succeeded = out.predicted_after != label;
  return out;
}

void require_differentiable(const Classifier& model, const char* attack) {
  if (!model.is_differentiable()) {
    throw UnsupportedError(std::string(attack) + ": model family is not differentiable");
  }
}

/// Picks the attack target per the rule: classes ranked by probability,
/// skipping the current prediction (and, where asked, the outlier class).
int resolve_target(const Classifier& model, std::span<const double> x, const TargetRule& rule) {
  if (rule.kind == TargetRule::Kind::explicit_class) {
    if (rule.class_index < 0 || rule.class_index >= model.num_outputs()) {
      throw ContractError("attack target class out of range");
    }
    return rule.class_index;
  }
  const std::vector<double> probs = model.predict_proba(x);
  const int current = static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                                       probs.begin());
  const bool skip_outlier =
      rule.kind == TargetRule::Kind::exclude_outlier && model.has_outlier_class();
  const int outlier = skip_outlier ? model.outlier_class() : -1;

  int best = -1;
  double best_p = -1.0;
  for (int c = 0; c < model.num_outputs(); ++c) {
    if (c == current || c == outlier) continue;
    if (probs[static_cast<std::size_t>(c)] > best_p) {
      best_p = probs[static_cast<std::size_t>(c)];
      best = c;
    }
  }
  if (best < 0) throw AttackError("no valid target class for the attack");
  return best;
}

}  // namespace

AttackOutcome fgsm(const Classifier& model, std::span<const double> x, int label, double epsilon,
                   const FeatureDomain& domain, bool variance_scaled) {
  require_differentiable(model, "fgsm");
  if (!(epsilon > 0.0)) throw ContractError("fgsm: epsilon must be positive");
  if (variance_scaled && domain.kind != DomainKind::tabular) {
    throw ContractError("fgsm: variance scaling needs a tabular domain");
  }

  const std::vector<double> grad = model.input_gradient_loss(x, label);
  std::vector<double> adv(x.begin(), x.end());
  for (std::size_t i = 0; i < adv.size(); ++i) {
    const double sign = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
    const double step = variance_scaled ? epsilon * domain.stddev[i] : epsilon;
    adv[i] += step * sign;
  }
  domain.clamp_row(adv);
  return make_outcome(model, x, label, std::move(adv));
}

AttackOutcome jsma(const Classifier& model, std::span<const double> x, int label,
                   const TargetRule& target, int budget, const FeatureDomain& domain) {
  require_differentiable(model, "jsma");
  const int t = resolve_target(model, x, target);
  const std::size_t d = x.size();

  std::vector<double> adv(x.begin(), x.end());
  std::vector<bool> used(d, false);

  for (int round = 0; round < budget; ++round) {
    if (model.predict(adv) == t) break;

    // input Jacobian of the pre-softmax scores
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(model.num_outputs()));
    for (int c = 0; c < model.num_outputs(); ++c) {
      jac[static_cast<std::size_t>(c)] = model.input_gradient_score(adv, c);
    }

    double best_saliency = 0.0;
    std::ptrdiff_t best_feature = -1;
    for (std::size_t i = 0; i < d; ++i) {
      if (used[i]) continue;
      if (domain.kind != DomainKind::tabular && adv[i] >= 1.0) continue;  // saturated
      const double toward = jac[static_cast<std::size_t>(t)][i];
      double others = 0.0;
      for (int c = 0; c < model.num_outputs(); ++c) {
        if (c != t) others += jac[static_cast<std::size_t>(c)][i];
      }
      if (toward <= 0.0 || others >= 0.0) continue;
      const double saliency = toward * std::abs(others);
      if (saliency > best_saliency) {
        best_saliency = saliency;
        best_feature = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (best_feature < 0) break;  // no admissible feature left

    const auto f = static_cast<std::size_t>(best_feature);
    adv[f] = domain.clamp_value(domain.saturation_target(adv, f), f);
    used[f] = true;
  }

  return make_outcome(model, x, label, std::move(adv));
}

AttackOutcome svm_shift(const Classifier& model, std::span<const double> x, int label,
                        int target_class, double epsilon, const FeatureDomain& domain) {
  if (model.family() != ModelFamily::linear_svm) {
    throw UnsupportedError("svm_shift: model family must be linear_svm");
  }
  if (target_class < 0 || target_class >= model.num_outputs()) {
    throw ContractError("svm_shift: target class out of range");
  }
  if (model.predict(x) == target_class) {
    throw ContractError("svm_shift: target class equals the current prediction");
  }
  if (!(epsilon >= 0.0)) throw ContractError("svm_shift: epsilon must be nonnegative");

  const auto w = model.layers().front().weights.row(static_cast<std::size_t>(target_class));
  double norm = 0.0;
  for (double v : w) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw AttackError("svm_shift: degenerate model, zero weight vector");

  std::vector<double> adv(x.begin(), x.end());
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] += epsilon * w[i] / norm;
  domain.clamp_row(adv);
  return make_outcome(model, x, label, std::move(adv));
}

namespace {

struct TreePaths {
  std::vector<int> parent;
  std::vector<std::vector<int>> adjacency;
};

TreePaths tree_graph(const std::vector<TreeNode>& nodes) {
  TreePaths g;
  g.parent.assign(nodes.size(), -1);
  g.adjacency.assign(nodes.size(), {});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    const auto left = static_cast<std::size_t>(nodes[i].left);
    const auto right = static_cast<std::size_t>(nodes[i].right);
    g.parent[left] = static_cast<int>(i);
    g.parent[right] = static_cast<int>(i);
    g.adjacency[i].push_back(static_cast<int>(left));
    g.adjacency[i].push_back(static_cast<int>(right));
    g.adjacency[left].push_back(static_cast<int>(i));
    g.adjacency[right].push_back(static_cast<int>(i));
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

int leaf_of(const std::vector<TreeNode>& nodes, std::span<const double> x) {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& t = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
  }
  return node;
}

/// Nearest leaf (hop count over the undirected tree graph) with a class
/// other than `cls`; -1 when none exists.
int nearest_other_leaf(const std::vector<TreeNode>& nodes, const TreePaths& g, int start,
                       int cls) {
  std::vector<bool> seen(nodes.size(), false);
  std::deque<int> queue{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    const TreeNode& t = nodes[static_cast<std::size_t>(node)];
    if (node != start && t.is_leaf() && t.leaf_class != cls) return node;
    for (int next : g.adjacency[static_cast<std::size_t>(node)]) {
      if (!seen[static_cast<std::size_t>(next)]) {
        seen[static_cast<std::size_t>(next)] = true;
        queue.push_back(next);
      }
    }
  }
  return -1;
}

int lowest_common_ancestor(const TreePaths& g, int a, int b) {
  std::vector<bool> on_path(g.parent.size(), false);
  for (int n = a; n != -1; n = g.parent[static_cast<std::size_t>(n)]) {
    on_path[static_cast<std::size_t>(n)] = true;
  }
  for (int n = b; n != -1; n = g.parent[static_cast<std::size_t>(n)]) {
    if (on_path[static_cast<std::size_t>(n)]) return n;
  }
  return 0;
}

/// True when `node` lies in the subtree rooted at `root`.
bool in_subtree(const TreePaths& g, int root, int node) {
  for (int n = node; n != -1; n = g.parent[static_cast<std::size_t>(n)]) {
    if (n == root) return true;
  }
  return false;
}

}  // namespace

AttackOutcome dt_path(const Classifier& model, std::span<const double> x, int label, int budget,
                      const FeatureDomain& domain) {
  if (model.family() != ModelFamily::decision_tree) {
    throw UnsupportedError("dt_path: model family must be decision_tree");
  }
  const std::vector<TreeNode>& nodes = model.tree();
  if (nodes.size() == 1) throw AttackError("dt_path: single-leaf tree has no target");

  const TreePaths graph = tree_graph(nodes);
  const int initial_prediction = model.predict(x);

  std::vector<double> adv(x.begin(), x.end());
  for (int round = 0; round < budget; ++round) {
    const int current_leaf = leaf_of(nodes, adv);
    const int current_class = nodes[static_cast<std::size_t>(current_leaf)].leaf_class;
    if (current_class != initial_prediction) break;

    const int target_leaf = nearest_other_leaf(nodes, graph, current_leaf, current_class);
    if (target_leaf < 0) throw AttackError("dt_path: no leaf with another class");

    const int ancestor = lowest_common_ancestor(graph, current_leaf, target_leaf);
    const TreeNode& pivot = nodes[static_cast<std::size_t>(ancestor)];
    const auto f = static_cast<std::size_t>(pivot.feature);
    const bool go_left = in_subtree(graph, pivot.left, target_leaf);

    if (domain.kind == DomainKind::binary) {
      adv[f] = adv[f] >= 0.5 ? 0.0 : 1.0;
    } else {
      adv[f] = go_left ? pivot.threshold - kTreeMargin : pivot.threshold + kTreeMargin;
      adv[f] = domain.clamp_value(adv[f], f);
    }
  }

  return make_outcome(model, x, label, std::move(adv));
}

AttackOutcome craft_one(const Classifier& model, std::span<const double> x, int label,
                        const AttackSpec& spec, const FeatureDomain& domain) {
  switch (spec.kind) {
    case AttackKind::fgsm:
      return fgsm(model, x, label, spec.epsilon, domain, spec.variance_scaled);
    case AttackKind::jsma:
      return jsma(model, x, label, spec.target, spec.budget, domain);
    case AttackKind::svm_shift: {
      int target = spec.target.kind == TargetRule::Kind::explicit_class
                       ? spec.target.class_index
                       : resolve_target(model, x, spec.target);
      return svm_shift(model, x, label, target, spec.epsilon, domain);
    }
    case AttackKind::dt_path:
      return dt_path(model, x, label, spec.budget, domain);
  }
  throw ContractError("craft_one: unknown attack kind");
}

BatchResult craft_batch(const Classifier& model, const Dataset& data, const AttackSpec& spec) {
  spec.validate();
  // attack/family compatibility is a batch-level contract
  if (spec.kind == AttackKind::dt_path && model.family() != ModelFamily::decision_tree) {
    throw UnsupportedError("craft_batch: dt_path requires a decision tree model");
  }
  if (spec.kind == AttackKind::svm_shift && model.family() != ModelFamily::linear_svm) {
    throw UnsupportedError("craft_batch: svm_shift requires a linear_svm model");
  }
  if ((spec.kind == AttackKind::fgsm || spec.kind == AttackKind::jsma) &&
      !model.is_differentiable()) {
    throw UnsupportedError("craft_batch: " + to_string(spec.kind) +
                           " requires a differentiable model");
  }

  BatchResult result;
  result.summary.attempted = data.size();
  result.summary.no_samples = data.size() == 0;
  result.outcomes.reserve(data.size());

  double epsilon_sum = 0.0;
  double changed_sum = 0.0;

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features.row(i);
    AttackOutcome outcome;
    try {
      outcome = craft_one(model, x, data.labels[i], spec, data.domain);
    } catch (const AttackError& e) {
      // leave the row unperturbed, note the failure, keep going
      outcome = AttackOutcome{};
      outcome.original.assign(x.begin(), x.end());
      outcome.adversarial = outcome.original;
      outcome.source_label = data.labels[i];
      outcome.predicted_before = model.predict(x);
      outcome.predicted_after = outcome.predicted_before;
      outcome.succeeded = false;
      result.summary.failures.push_back("row " + std::to_string(i) + ": " + e.what());
    }
    if (outcome.succeeded) {
      ++result.summary.succeeded;
      epsilon_sum += spec.epsilon;
      changed_sum += static_cast<double>(outcome.features_changed);
    }
    result.outcomes.push_back(std::move(outcome));
  }

  if (result.summary.attempted > 0) {
    result.summary.success_rate = static_cast<double>(result.summary.succeeded) /
                                  static_cast<double>(result.summary.attempted);
  }
  if (result.summary.succeeded > 0) {
    result.summary.mean_epsilon = epsilon_sum / static_cast<double>(result.summary.succeeded);
    result.summary.mean_features_changed =
        changed_sum / static_cast<double>(result.summary.succeeded);
  }
  return result;
}

Matrix adversarial_matrix(const BatchResult& result) {
  Matrix out;
  for (const AttackOutcome& o : result.outcomes) out.append_row(o.adversarial);
  return out;
}

}  // namespace advstat
