#include "advstat/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"
#include "advstat/random.hpp"

namespace advstat {

FeatureDomain FeatureDomain::tabular(std::vector<double> mean, std::vector<double> stddev) {
  if (mean.size() != stddev.size()) {
    throw ContractError("FeatureDomain::tabular: mean/stddev length mismatch");
  }
  for (double s : stddev) {
    if (!(s > 0.0)) throw ContractError("FeatureDomain::tabular: stddev must be positive");
  }
  return {DomainKind::tabular, std::move(mean), std::move(stddev)};
}

double FeatureDomain::clamp_value(double value, std::size_t) const {
  switch (kind) {
    case DomainKind::pixel:
      return std::clamp(value, 0.0, 1.0);
    case DomainKind::binary:
      return value >= 0.5 ? 1.0 : 0.0;
    case DomainKind::tabular:
      return value;
  }
  return value;
}

void FeatureDomain::clamp_row(std::span<double> row) const {
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = clamp_value(row[i], i);
}

double FeatureDomain::saturation_target(std::span<const double> x, std::size_t feature) const {
  switch (kind) {
    case DomainKind::pixel:
    case DomainKind::binary:
      return 1.0;
    case DomainKind::tabular:
      return x[feature] + 2.0 * stddev[feature];
  }
  return 1.0;
}

bool FeatureDomain::contains(std::span<const double> row) const {
  for (double v : row) {
    if (!std::isfinite(v)) return false;
    if (kind == DomainKind::pixel && (v < 0.0 || v > 1.0)) return false;
    if (kind == DomainKind::binary && v != 0.0 && v != 1.0) return false;
  }
  return true;
}

void Dataset::validate() const {
  if (labels.size() != features.rows()) {
    throw ContractError("Dataset: label count differs from row count");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw ContractError("Dataset: label out of range");
  }
  if (domain.kind == DomainKind::tabular && domain.stddev.size() != features.cols()) {
    throw ContractError("Dataset: tabular domain stats do not match feature count");
  }
  for (std::size_t r = 0; r < features.rows(); ++r) {
    if (!domain.contains(features.row(r))) {
      throw ContractError("Dataset: row violates its feature domain");
    }
  }
}

Dataset Dataset::take_rows(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = features.take_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels[i]);
  out.num_classes = num_classes;
  out.domain = domain;
  out.name = name;
  return out;
}

Matrix Dataset::rows_of_class(int cls) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cls) idx.push_back(i);
  }
  return features.take_rows(idx);
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (data.size() < 2) throw ContractError("split: dataset needs at least 2 rows");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw ContractError("split: test fraction must lie strictly inside (0, 1)");
  }
  const std::size_t n = data.size();
  const std::size_t test_n =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  if (test_n == 0 || test_n == n) {
    throw ContractError("split: fraction yields an empty train or test half");
  }

  RandomSource rng(spec.seed);
  const std::vector<std::size_t> order = shuffled_indices(n, rng);
  const std::span<const std::size_t> test_idx(order.data(), test_n);
  const std::span<const std::size_t> train_idx(order.data() + test_n, n - test_n);
  return {data.take_rows(train_idx), data.take_rows(test_idx)};
}

}  // namespace advstat
