#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advstat/matrix.hpp"

namespace advstat {

enum class DomainKind { pixel, binary, tabular };

/// Feature-domain descriptor: what a legal input row looks like, and how to
/// push a perturbed row back into the domain.
struct FeatureDomain {
  DomainKind kind = DomainKind::pixel;
  std::vector<double> mean;    // tabular only, one entry per feature
  std::vector<double> stddev;  // tabular only, all positive

  static FeatureDomain pixel() { return {DomainKind::pixel, {}, {}}; }
  static FeatureDomain binary() { return {DomainKind::binary, {}, {}}; }
  static FeatureDomain tabular(std::vector<double> mean, std::vector<double> stddev);

  /// pixel: clamps into [0,1]; binary: rounds to {0,1}; tabular: unchanged.
  double clamp_value(double value, std::size_t feature) const;
  void clamp_row(std::span<double> row) const;

  /// Saturation value a single-feature attack pushes feature i of x towards:
  /// pixel/binary 1.0, tabular x_i + 2 stddev_i.
  double saturation_target(std::span<const double> x, std::size_t feature) const;

  bool contains(std::span<const double> row) const;
};

struct Dataset {
  Matrix features;          // N x d
  std::vector<int> labels;  // length N, each in [0, num_classes)
  int num_classes = 0;
  FeatureDomain domain;
  std::string name;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }

  /// Enforces the structural invariants; throws ContractError.
  void validate() const;

  Dataset take_rows(std::span<const std::size_t> indices) const;

  /// Feature rows whose label equals cls.
  Matrix rows_of_class(int cls) const;
};

struct SplitSpec {
  double test_fraction = 0.1;  // strictly inside (0, 1)
  std::uint64_t seed = 0;
};

/// Disjoint (train, test) partition with test size round(N * fraction),
/// deterministic in the seed. Both halves keep the domain and class count.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

}  // namespace advstat
