#include "advstat/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"

namespace advstat {

Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
  if (a.cols() != b.cols()) {
    throw ContractError("kernel_matrix: feature dimension mismatch");
  }
  if (spec.kind == KernelKind::gaussian && !(spec.bandwidth > 0.0)) {
    throw ContractError("kernel_matrix: gaussian bandwidth must be positive");
  }

  Matrix out(a.rows(), b.rows());
  const double inv_two_sigma_sq =
      spec.kind == KernelKind::gaussian ? 1.0 / (2.0 * spec.bandwidth * spec.bandwidth) : 0.0;

  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double d2 = squared_distance(ai, b.row(j));
      dst[j] = spec.kind == KernelKind::gaussian ? std::exp(-d2 * inv_two_sigma_sq)
                                                 : std::sqrt(d2);
    }
  }
  return out;
}

double median_pairwise_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw ContractError("median_pairwise_distance: empty input");
  }
  if (a.cols() != b.cols()) {
    throw ContractError("median_pairwise_distance: feature dimension mismatch");
  }

  const Matrix pooled = vstack(a, b);
  const std::size_t n = pooled.rows();
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(euclidean_distance(pooled.row(i), pooled.row(j)));
    }
  }
  if (dists.empty()) return 1.0;  // single pooled point

  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower =
        *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  return median == 0.0 ? 1.0 : median;
}

}  // namespace advstat
