#include <cmath>

#include <doctest.h>

#include "advstat/attacks.hpp"
#include "advstat/classifier.hpp"
#include "advstat/errors.hpp"
#include "advstat/synth.hpp"
#include "test_support.hpp"

using namespace advstat;

namespace {

Classifier linear_two_class(std::vector<double> w_class1, ModelFamily family = ModelFamily::logreg) {
  const std::size_t d = w_class1.size();
  Matrix weights(2, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) weights(1, i) = w_class1[i];
  DenseLayer layer{std::move(weights), std::vector<double>(2, 0.0)};
  return Classifier::from_layers(family, {std::move(layer)}, false);
}

Classifier stump(int feature, double threshold, int left_class, int right_class) {
  std::vector<TreeNode> nodes(3);
  nodes[0].feature = feature;
  nodes[0].threshold = threshold;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].leaf_class = left_class;
  nodes[2].leaf_class = right_class;
  return Classifier::from_tree(std::move(nodes), 2, 2);
}

}  // namespace

TEST_CASE("fgsm steps along the gradient sign and clips") {
  // w = (1, -1) for class 1; y = 0 makes the loss gradient sign (+, -)
  Classifier model = linear_two_class({1.0, -1.0});
  const FeatureDomain pixel = FeatureDomain::pixel();

  auto out = fgsm(model, std::vector<double>{0.5, 0.5}, 0, 0.1, pixel);
  CHECK(out.adversarial[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.adversarial[1] == doctest::Approx(0.4).epsilon(1e-12));

  // clipping holds a pixel already at 1.0
  auto clipped = fgsm(model, std::vector<double>{1.0, 0.5}, 0, 0.1, pixel);
  CHECK(clipped.adversarial[0] == 1.0);

  // zero gradient leaves the input untouched
  Classifier zero = linear_two_class({0.0, 0.0});
  auto still = fgsm(zero, std::vector<double>{0.4, 0.4}, 0, 0.1, pixel);
  CHECK(still.adversarial == still.original);
  CHECK_FALSE(still.succeeded);
  CHECK(still.features_changed == 0);
}

TEST_CASE("fgsm respects the linf bound and the domain, variance scaling works") {
  const Dataset tab = synth_tabular(20, 3);
  TrainConfig config;
  config.epochs = 10;
  config.seed = 2;
  const Classifier model = train(ModelFamily::logreg, tab, config);

  for (std::size_t i = 0; i < 10; ++i) {
    const auto x = tab.features.row(i);
    const auto plain = fgsm(model, x, tab.labels[i], 0.25, tab.domain, false);
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(std::abs(plain.adversarial[j] - x[j]) <= 0.25 + 1e-12);
    }
    const auto scaled = fgsm(model, x, tab.labels[i], 0.25, tab.domain, true);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double step = std::abs(scaled.adversarial[j] - x[j]);
      CHECK((step == doctest::Approx(0.0) ||
             step == doctest::Approx(0.25 * tab.domain.stddev[j]).epsilon(1e-9)));
    }
  }

  // binary domains round the stepped result back to bits
  const Dataset mal = synth_binary_malware(30, 30, 24, 4);
  TrainConfig mconfig;
  mconfig.epochs = 10;
  mconfig.seed = 3;
  const Classifier mmodel = train(ModelFamily::logreg, mal, mconfig);
  const auto out = fgsm(mmodel, mal.features.row(0), mal.labels[0], 0.6, mal.domain);
  for (double v : out.adversarial) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("jsma saliency picks the strongest admissible feature") {
  // class-1 score gradient (2, 0.1), class-0 gradient (-2, -0.1)
  Matrix weights(2, 2, std::vector<double>{-2.0, -0.1, 2.0, 0.1});
  Classifier model = Classifier::from_layers(
      ModelFamily::logreg, {DenseLayer{std::move(weights), {0.0, 0.0}}}, false);

  const FeatureDomain pixel = FeatureDomain::pixel();
  auto out = jsma(model, std::vector<double>{0.0, 0.0}, 0, TargetRule::explicit_target(1), 1,
                  pixel);
  // feature 0 carries the larger saliency, gets saturated to the domain max
  CHECK(out.adversarial[0] == 1.0);
  CHECK(out.adversarial[1] == 0.0);
  CHECK(out.features_changed == 1);

  // already classified as the target: zero changes, success
  auto already = jsma(model, std::vector<double>{1.0, 1.0}, 0, TargetRule::explicit_target(1), 5,
                      pixel);
  CHECK(already.features_changed == 0);
  CHECK(already.succeeded);

  // empty budget
  auto frozen = jsma(model, std::vector<double>{0.0, 0.0}, 0, TargetRule::explicit_target(1), 0,
                     pixel);
  CHECK(frozen.adversarial == frozen.original);
  CHECK_FALSE(frozen.succeeded);
}

TEST_CASE("jsma respects the feature budget on a real model" * doctest::timeout(120)) {
  const Dataset digits = synth_digits(30, 6);
  TrainConfig config;
  config.epochs = 15;
  config.seed = 4;
  config.hidden_layers = {16};
  const Classifier model = train(ModelFamily::mlp, digits, config);

  for (int budget : {1, 4, 10}) {
    for (std::size_t i = 0; i < 20; ++i) {
      const auto out = jsma(model, digits.features.row(i), digits.labels[i],
                            TargetRule::second(), budget, digits.domain);
      CHECK(out.features_changed <= static_cast<std::size_t>(budget));
      CHECK(digits.domain.contains(out.adversarial));
    }
  }
}

TEST_CASE("jsma with no admissible target raises the attack error") {
  // one original class plus the outlier: excluding both the prediction and
  // the outlier leaves nothing to aim at
  Matrix weights(2, 2, std::vector<double>{1.0, 0.0, 0.0, 1.0});
  Classifier model = Classifier::from_layers(
      ModelFamily::logreg, {DenseLayer{std::move(weights), {1.0, 0.0}}}, /*outlier_class=*/true);
  REQUIRE(model.original_classes() == 1);
  REQUIRE(model.predict(std::vector<double>{1.0, 0.0}) == 0);
  CHECK_THROWS_AS(jsma(model, std::vector<double>{1.0, 0.0}, 0, TargetRule::excluding_outlier(),
                       3, FeatureDomain::pixel()),
                  AttackError);
}

TEST_CASE("svm shift moves along the target weight direction") {
  Matrix weights(2, 2, std::vector<double>{0.0, 0.0, 3.0, 4.0});
  Classifier svm = Classifier::from_layers(
      ModelFamily::linear_svm, {DenseLayer{std::move(weights), {0.5, 0.0}}}, false);
  // bias keeps class 0 as the prediction at the origin

  const FeatureDomain unbounded =
      FeatureDomain::tabular(std::vector<double>(2, 0.0), std::vector<double>(2, 1.0));
  auto out = svm_shift(svm, std::vector<double>{0.0, 0.0}, 0, 1, 1.0, unbounded);
  CHECK(out.adversarial[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.adversarial[1] == doctest::Approx(0.8).epsilon(1e-12));

  // delta parallel to w_t: cosine = 1
  double dot = 0.0, dn = 0.0, wn = 0.0;
  const std::vector<double> w{3.0, 4.0};
  for (std::size_t i = 0; i < 2; ++i) {
    const double delta = out.adversarial[i] - out.original[i];
    dot += delta * w[i];
    dn += delta * delta;
    wn += w[i] * w[i];
  }
  CHECK(dot / std::sqrt(dn * wn) == doctest::Approx(1.0).epsilon(1e-12));

  // epsilon 0 keeps x
  auto none = svm_shift(svm, std::vector<double>{0.0, 0.0}, 0, 1, 0.0, unbounded);
  CHECK(none.adversarial == none.original);

  // degenerate zero weight vector
  Matrix zeros(2, 2, 0.0);
  Classifier degenerate = Classifier::from_layers(
      ModelFamily::linear_svm, {DenseLayer{std::move(zeros), {0.5, 0.0}}}, false);
  CHECK_THROWS_AS(svm_shift(degenerate, std::vector<double>{0.0, 0.0}, 0, 1, 1.0, unbounded),
                  AttackError);

  // wrong family
  Classifier lr = linear_two_class({1.0, 1.0});
  CHECK_THROWS_AS(svm_shift(lr, std::vector<double>{0.0, 0.0}, 0, 1, 1.0, unbounded),
                  UnsupportedError);
}

TEST_CASE("dt_path crosses the stump threshold") {
  Classifier tree = stump(0, 0.5, 0, 1);
  const FeatureDomain pixel = FeatureDomain::pixel();

  auto out = dt_path(tree, std::vector<double>{0.3, 0.9}, 0, 3, pixel);
  CHECK(out.adversarial[0] == doctest::Approx(0.5 + 1e-6));
  CHECK(out.predicted_after == 1);
  CHECK(out.features_changed == 1);
  CHECK(out.succeeded);

  // budget 0 leaves x untouched
  auto frozen = dt_path(tree, std::vector<double>{0.3, 0.9}, 0, 0, pixel);
  CHECK(frozen.adversarial == frozen.original);
  CHECK_FALSE(frozen.succeeded);

  // single-leaf tree has no target
  std::vector<TreeNode> only_leaf(1);
  only_leaf[0].leaf_class = 0;
  Classifier lone = Classifier::from_tree(std::move(only_leaf), 2, 2);
  CHECK_THROWS_AS(dt_path(lone, std::vector<double>{0.0, 0.0}, 0, 1, pixel), AttackError);
}

TEST_CASE("dt_path defeats the xor tree within one feature change") {
  Dataset xor_data;
  xor_data.features = Matrix(4, 2, std::vector<double>{0, 0, 1, 1, 0, 1, 1, 0});
  xor_data.labels = {0, 0, 1, 1};
  xor_data.num_classes = 2;
  xor_data.domain = FeatureDomain::binary();

  TrainConfig config;
  config.max_depth = 2;
  const Classifier tree = train(ModelFamily::decision_tree, xor_data, config);
  REQUIRE(dataset_accuracy(tree, xor_data) == doctest::Approx(1.0));

  for (std::size_t i = 0; i < 4; ++i) {
    const auto out =
        dt_path(tree, xor_data.features.row(i), xor_data.labels[i], 1, xor_data.domain);
    CHECK(out.succeeded);
    CHECK(out.features_changed == 1);
  }
}

TEST_CASE("attacks are deterministic and stay inside the domain" * doctest::timeout(300)) {
  // 1000 crafted points per attack
  const Dataset digits = synth_digits(100, 12);
  TrainConfig config;
  config.epochs = 10;
  config.seed = 9;
  config.hidden_layers = {12};
  const Classifier mlp = train(ModelFamily::mlp, digits, config);
  const Classifier svm = train(ModelFamily::linear_svm, digits, config);
  const Classifier tree = train(ModelFamily::decision_tree, digits, config);

  const AttackSpec specs[] = {AttackSpec::fgsm_spec(0.2), AttackSpec::jsma_spec(5),
                              AttackSpec::svm_shift_spec(0.5), AttackSpec::dt_path_spec(4)};
  const Classifier* models[] = {&mlp, &mlp, &svm, &tree};

  for (int a = 0; a < 4; ++a) {
    const BatchResult first = craft_batch(*models[a], digits, specs[a]);
    const BatchResult second = craft_batch(*models[a], digits, specs[a]);
    REQUIRE(first.outcomes.size() == digits.size());
    for (std::size_t i = 0; i < first.outcomes.size(); ++i) {
      CHECK(first.outcomes[i].adversarial == second.outcomes[i].adversarial);
      CHECK(digits.domain.contains(first.outcomes[i].adversarial));
      // exact perturbation accounting
      std::size_t changed = 0;
      for (std::size_t j = 0; j < 64; ++j) {
        if (first.outcomes[i].adversarial[j] != first.outcomes[i].original[j]) ++changed;
      }
      CHECK(changed == first.outcomes[i].features_changed);
    }
  }
}

TEST_CASE("fgsm success is monotone in epsilon, with slack" * doctest::timeout(120)) {
  const Dataset digits = synth_digits(40, 23);
  TrainConfig config;
  config.epochs = 20;
  config.seed = 14;
  config.hidden_layers = {16};
  const Classifier model = train(ModelFamily::mlp, digits, config);

  double previous = -1.0;
  for (double eps : {0.05, 0.15, 0.3, 0.5}) {
    const BatchResult crafted = craft_batch(model, digits, AttackSpec::fgsm_spec(eps));
    CHECK(crafted.summary.success_rate >= previous - 0.02);
    previous = crafted.summary.success_rate;
  }
}

TEST_CASE("craft_batch summary and incompatibility handling") {
  const Dataset digits = synth_digits(3, 2);
  TrainConfig config;
  config.epochs = 5;
  config.seed = 7;
  const Classifier logreg = train(ModelFamily::logreg, digits, config);

  // wrong family up front
  CHECK_THROWS_AS(craft_batch(logreg, digits, AttackSpec::dt_path_spec(2)), UnsupportedError);
  const Classifier tree = train(ModelFamily::decision_tree, digits, config);
  CHECK_THROWS_AS(craft_batch(tree, digits, AttackSpec::fgsm_spec(0.1)), UnsupportedError);

  // empty dataset: no samples flag
  Dataset empty;
  empty.features = Matrix(0, 64);
  empty.num_classes = 10;
  empty.domain = FeatureDomain::pixel();
  const BatchResult none = craft_batch(logreg, empty, AttackSpec::fgsm_spec(0.1));
  CHECK(none.summary.no_samples);
  CHECK(none.summary.attempted == 0);
  CHECK(none.summary.success_rate == 0.0);
  CHECK(none.outcomes.empty());

  // fgsm on digits: succeeded outcomes echo the epsilon
  const BatchResult crafted = craft_batch(logreg, digits, AttackSpec::fgsm_spec(0.3));
  if (crafted.summary.succeeded > 0) {
    CHECK(crafted.summary.mean_epsilon == doctest::Approx(0.3));
  }
}
