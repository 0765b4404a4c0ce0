#pragma once

#include "advstat/matrix.hpp"

namespace advstat {

enum class KernelKind { gaussian, identity };

/// Kernel used by the two-sample machinery. The identity kind stands for
/// "no kernel": kernel_matrix then returns raw Euclidean distances, which is
/// what the energy distance consumes.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double bandwidth = 1.0;  // sigma; gaussian only

  static KernelSpec gaussian(double sigma) { return {KernelKind::gaussian, sigma}; }
  static KernelSpec identity() { return {KernelKind::identity, 1.0}; }
};

/// result(i, j) = k(a_i, b_j). Gaussian: exp(-|a_i - b_j|^2 / (2 sigma^2));
/// identity: |a_i - b_j|.
Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelSpec& spec);

/// Median of all pairwise Euclidean distances over the pooled rows of a and
/// b, self-pairs excluded. Returns 1.0 when the median is zero (all points
/// equal), so it is always usable as a Gaussian bandwidth.
double median_pairwise_distance(const Matrix& a, const Matrix& b);

}  // namespace advstat
