#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "advstat/classifier.hpp"
#include "advstat/errors.hpp"
#include "advstat/random.hpp"
#include "train_internal.hpp"

namespace advstat {

namespace {

// ---------------------------------------------------------------------------
// gradient families: logreg, mlp, linear_svm
// ---------------------------------------------------------------------------

struct Net {
  ModelFamily family;
  std::vector<DenseLayer> layers;
};

Net init_net(ModelFamily family, int input_dim, int num_outputs,
             const std::vector<int>& hidden, RandomSource& rng) {
  std::vector<int> widths;
  widths.push_back(input_dim);
  if (family == ModelFamily::mlp) {
    for (int h : hidden) widths.push_back(h);
  }
  widths.push_back(num_outputs);

  Net net{family, {}};
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(widths[l]);
    const auto fan_out = static_cast<std::size_t>(widths[l + 1]);
    DenseLayer layer{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0)};
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t o = 0; o < fan_out; ++o) {
      auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < fan_in; ++i) {
        w[i] = bound * (2.0 * rng.next_double() - 1.0);
      }
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> bias;

  explicit Gradients(const Net& net) {
    for (const DenseLayer& l : net.layers) {
      weights.emplace_back(l.weights.rows(), l.weights.cols());
      bias.emplace_back(l.bias.size(), 0.0);
    }
  }
  void reset() {
    for (Matrix& m : weights) std::fill(m.values().begin(), m.values().end(), 0.0);
    for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
  }
};

// forward for one sample; activations[l] is the post-activation input of
// layer l, activations[L] the output scores. dropout_mask empty in eval.
void forward(const Net& net, std::span<const double> x,
             std::vector<std::vector<double>>& activations,
             const std::vector<std::vector<double>>* dropout_scale) {
  activations.assign(1, std::vector<double>(x.begin(), x.end()));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    const auto& prev = activations.back();
    std::vector<double> z(layer.bias.size());
    for (std::size_t o = 0; o < z.size(); ++o) {
      double acc = layer.bias[o];
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev.size(); ++i) acc += w[i] * prev[i];
      z[o] = acc;
    }
    if (l + 1 < net.layers.size()) {
      for (double& v : z) v = std::max(0.0, v);
      if (dropout_scale != nullptr) {
        const auto& scale = (*dropout_scale)[l];
        for (std::size_t o = 0; o < z.size(); ++o) z[o] *= scale[o];
      }
    }
    activations.push_back(std::move(z));
  }
}

double sample_loss(const Net& net, const std::vector<double>& scores, int label) {
  if (net.family == ModelFamily::linear_svm) {
    double loss = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      const double y = static_cast<int>(c) == label ? 1.0 : -1.0;
      const double h = std::max(0.0, 1.0 - y * scores[c]);
      loss += h * h;
    }
    return loss;
  }
  // softmax cross-entropy, computed stably from the raw scores
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  return std::log(sum) + top - scores[static_cast<std::size_t>(label)];
}

// dL/dscores for one sample
std::vector<double> output_delta(const Net& net, const std::vector<double>& scores, int label) {
  std::vector<double> delta(scores.size());
  if (net.family == ModelFamily::linear_svm) {
    for (std::size_t c = 0; c < scores.size(); ++c) {
      const double y = static_cast<int>(c) == label ? 1.0 : -1.0;
      const double h = std::max(0.0, 1.0 - y * scores[c]);
      delta[c] = -2.0 * h * y;
    }
    return delta;
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    delta[c] = std::exp(scores[c] - top);
    sum += delta[c];
  }
  for (double& v : delta) v /= sum;
  delta[static_cast<std::size_t>(label)] -= 1.0;
  return delta;
}

// accumulates gradients for one sample; returns its loss
double backward(const Net& net, const std::vector<std::vector<double>>& activations,
                const std::vector<std::vector<double>>* dropout_scale, int label,
                Gradients& grads) {
  const std::vector<double>& scores = activations.back();
  const double loss = sample_loss(net, scores, label);

  std::vector<double> delta = output_delta(net, scores, label);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    const auto& input = activations[l];
    auto& gw = grads.weights[l];
    auto& gb = grads.bias[l];
    for (std::size_t o = 0; o < delta.size(); ++o) {
      if (delta[o] != 0.0) {
        auto g = gw.row(o);
        for (std::size_t i = 0; i < input.size(); ++i) g[i] += delta[o] * input[i];
      }
      gb[o] += delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev_delta(layer.weights.cols(), 0.0);
    for (std::size_t o = 0; o < delta.size(); ++o) {
      if (delta[o] == 0.0) continue;
      const auto w = layer.weights.row(o);
      for (std::size_t i = 0; i < prev_delta.size(); ++i) prev_delta[i] += delta[o] * w[i];
    }
    // gate through the ReLU (and dropout) of layer l-1
    const auto& post = activations[l];
    for (std::size_t i = 0; i < prev_delta.size(); ++i) {
      if (post[i] <= 0.0) {
        prev_delta[i] = 0.0;
      } else if (dropout_scale != nullptr) {
        prev_delta[i] *= (*dropout_scale)[l - 1][i];
      }
    }
    delta = std::move(prev_delta);
  }
  return loss;
}

double eval_mean_loss(const Net& net, const Matrix& features, const std::vector<int>& labels,
                      std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  std::vector<std::vector<double>> activations;
  for (std::size_t r : rows) {
    forward(net, features.row(r), activations, nullptr);
    total += sample_loss(net, activations.back(), labels[r]);
  }
  return total / static_cast<double>(rows.size());
}

// ---------------------------------------------------------------------------
// CART decision tree
// ---------------------------------------------------------------------------

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

int majority_class(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  int best_class = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > best) {
      best = counts[c];
      best_class = static_cast<int>(c);
    }
  }
  return best_class;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

SplitChoice best_split(const Matrix& features, const std::vector<int>& labels,
                       const std::vector<std::size_t>& rows, int num_classes) {
  SplitChoice best;
  const std::size_t n = rows.size();
  std::vector<std::pair<double, int>> column(n);

  for (std::size_t f = 0; f < features.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {features(rows[i], f), labels[rows[i]]};
    }
    std::sort(column.begin(), column.end());
    if (column.front().first == column.back().first) continue;  // constant feature

    std::vector<std::size_t> left(static_cast<std::size_t>(num_classes), 0);
    std::vector<std::size_t> right(static_cast<std::size_t>(num_classes), 0);
    for (const auto& [v, y] : column) ++right[static_cast<std::size_t>(y)];

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto y = static_cast<std::size_t>(column[i].second);
      ++left[y];
      --right[y];
      if (column[i].first == column[i + 1].first) continue;  // not a boundary
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      const double weighted = (static_cast<double>(nl) * gini(left, nl) +
                               static_cast<double>(nr) * gini(right, nr)) /
                              static_cast<double>(n);
      if (weighted < best.impurity) {
        best.found = true;
        best.impurity = weighted;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (column[i].first + column[i + 1].first);
      }
    }
  }
  return best;
}

int build_tree(const Matrix& features, const std::vector<int>& labels,
               const std::vector<std::size_t>& rows, int num_classes, int depth, int max_depth,
               std::vector<TreeNode>& nodes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t r : rows) ++counts[static_cast<std::size_t>(labels[r])];

  const int node_index = static_cast<int>(nodes.size());
  nodes.emplace_back();

  const bool pure = gini(counts, rows.size()) == 0.0;
  SplitChoice choice;
  if (!pure && depth < max_depth) {
    choice = best_split(features, labels, rows, num_classes);
  }
  if (!choice.found) {
    nodes[static_cast<std::size_t>(node_index)].leaf_class = majority_class(counts);
    return node_index;
  }

  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t r : rows) {
    if (features(r, static_cast<std::size_t>(choice.feature)) <= choice.threshold) {
      left_rows.push_back(r);
    } else {
      right_rows.push_back(r);
    }
  }

  const int left = build_tree(features, labels, left_rows, num_classes, depth + 1, max_depth, nodes);
  const int right =
      build_tree(features, labels, right_rows, num_classes, depth + 1, max_depth, nodes);
  TreeNode& node = nodes[static_cast<std::size_t>(node_index)];
  node.feature = choice.feature;
  node.threshold = choice.threshold;
  node.left = left;
  node.right = right;
  return node_index;
}

}  // namespace

namespace detail {

Classifier train_gradient_model(ModelFamily family, const Matrix& features,
                                const std::vector<int>& labels, int num_outputs,
                                bool outlier_flag, const TrainConfig& config,
                                std::span<const std::size_t> val_rows, const BatchPlanFn& plan) {
  RandomSource root(config.seed);
  RandomSource init_rng = root.derive(0x11);
  RandomSource dropout_rng = root.derive(0x22);

  Net net = init_net(family, static_cast<int>(features.cols()), num_outputs,
                     config.hidden_layers, init_rng);
  const bool use_dropout = family == ModelFamily::mlp && config.dropout > 0.0;
  const double keep = 1.0 - config.dropout;

  Gradients grads(net);
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> dropout_scale(net.layers.size() > 0 ? net.layers.size() - 1 : 0);

  const bool track_best = config.patience > 0 && !val_rows.empty();
  Net best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    RandomSource epoch_rng = root.derive(0x1000 + static_cast<std::uint64_t>(epoch));
    const auto batches = plan(epoch, epoch_rng);

    for (const auto& batch : batches) {
      if (batch.empty()) continue;
      grads.reset();
      double batch_loss = 0.0;

      for (std::size_t r : batch) {
        const std::vector<std::vector<double>>* scale_ptr = nullptr;
        if (use_dropout) {
          for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
            auto& scale = dropout_scale[l];
            scale.assign(net.layers[l].bias.size(), 0.0);
            for (double& s : scale) {
              s = dropout_rng.next_double() < keep ? 1.0 / keep : 0.0;
            }
          }
          scale_ptr = &dropout_scale;
        }
        forward(net, features.row(r), activations, scale_ptr);
        batch_loss += backward(net, activations, scale_ptr, labels[r], grads);
      }

      batch_loss /= static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch));
      }

      const double scale = config.learning_rate / static_cast<double>(batch.size());
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        DenseLayer& layer = net.layers[l];
        auto& w = layer.weights.values();
        const auto& gw = grads.weights[l].values();
        for (std::size_t i = 0; i < w.size(); ++i) {
          w[i] -= scale * gw[i] + config.learning_rate * 2.0 * config.l2_penalty * w[i];
        }
        for (std::size_t o = 0; o < layer.bias.size(); ++o) {
          layer.bias[o] -= scale * grads.bias[l][o];
        }
      }
    }

    if (track_best) {
      const double v = eval_mean_loss(net, features, labels, val_rows);
      if (v < best_val) {
        best_val = v;
        best = net;
        stall = 0;
      } else if (++stall > config.patience) {
        break;
      }
    }
  }

  return Classifier::from_layers(family, track_best ? std::move(best.layers)
                                                    : std::move(net.layers),
                                 outlier_flag);
}

}  // namespace detail

Classifier train(ModelFamily family, const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.size() == 0) throw ContractError("train: empty dataset");

  const std::set<int> distinct(data.labels.begin(), data.labels.end());
  if (distinct.size() < 2) {
    throw ContractError("train: dataset labels cover fewer than 2 classes");
  }

  if (family == ModelFamily::decision_tree) {
    std::vector<std::size_t> rows(data.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<TreeNode> nodes;
    build_tree(data.features, data.labels, rows, data.num_classes, 0, config.max_depth, nodes);
    return Classifier::from_tree(std::move(nodes), static_cast<int>(data.dim()),
                                 data.num_classes);
  }

  // hold out 10% for early stopping when the dataset can spare it
  RandomSource carve_rng = RandomSource(config.seed).derive(0x33);
  std::vector<std::size_t> order = shuffled_indices(data.size(), carve_rng);
  std::size_t val_n = 0;
  if (config.patience > 0 && config.epochs > 0 && data.size() >= 20) {
    val_n = static_cast<std::size_t>(
        std::llround(0.1 * static_cast<double>(data.size())));
    val_n = std::min(val_n, data.size() - 1);
  }
  const std::vector<std::size_t> val_rows(order.begin(),
                                          order.begin() + static_cast<std::ptrdiff_t>(val_n));
  const std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(val_n),
                                            order.end());

  const int batch_size = config.batch_size;
  detail::BatchPlanFn plan = [&train_rows, batch_size](int, RandomSource& rng) {
    std::vector<std::size_t> shuffled = train_rows;
    seeded_shuffle(shuffled, rng);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < shuffled.size();
         start += static_cast<std::size_t>(batch_size)) {
      const std::size_t stop =
          std::min(shuffled.size(), start + static_cast<std::size_t>(batch_size));
      batches.emplace_back(shuffled.begin() + static_cast<std::ptrdiff_t>(start),
                           shuffled.begin() + static_cast<std::ptrdiff_t>(stop));
    }
    return batches;
  };

  return detail::train_gradient_model(family, data.features, data.labels, data.num_classes,
                                      /*outlier_flag=*/false, config, val_rows, plan);
}

}  // namespace advstat
