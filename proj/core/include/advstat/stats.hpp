#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advstat/dataset.hpp"
#include "advstat/kernel.hpp"
#include "advstat/matrix.hpp"

namespace advstat {

/// Root of the biased squared MMD estimator with a Gaussian kernel:
/// sqrt(max(0, mean k(x1,x1) + mean k(x2,x2) - 2 mean k(x1,x2))), diagonal
/// terms included.
double mmd_biased(const Matrix& x1, const Matrix& x2, const KernelSpec& kernel);

/// 2 mean|x1_i - x2_j| - mean|x1_i - x1_j| - mean|x2_i - x2_j|, means taken
/// over all ordered pairs, diagonals included. The "no kernel" special case
/// of the MMD.
double energy_distance(const Matrix& x1, const Matrix& x2);

enum class ResampleMode { permutation, bootstrap_replacement };

struct TestParams {
  /// Gaussian kernel bandwidth; when absent, the median heuristic over the
  /// pooled observed sample is used, fixed once for all iterations.
  std::optional<double> bandwidth;
  int bootstrap_iterations = 1000;
  double alpha = 0.05;
  ResampleMode resample = ResampleMode::permutation;
};

struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject_h0 = false;  // reject iff p_value < alpha
  std::size_t n = 0;
  std::size_t m = 0;
  int bootstrap_iterations = 0;
  KernelSpec kernel;  // as resolved (actual bandwidth used)
};

/// Two-sample bootstrap hypothesis test on the biased MMD. The null
/// distribution comes from re-splitting the pooled rows (permutation by
/// default, with-replacement resampling optionally); the p-value is
/// (1 + #{resampled statistic >= observed}) / (B + 1). Deterministic in the
/// seed; iteration i draws from a generator seeded with mix(seed, i).
TestReport two_sample_test(const Matrix& x1, const Matrix& x2, const TestParams& params,
                           std::uint64_t seed);

struct SweepParams {
  std::vector<std::size_t> sizes;
  int repetitions = 200;
  TestParams test;
};

struct ConfidenceSweep {
  std::vector<std::size_t> sizes;
  std::vector<double> acceptance_frequency;  // one entry per size
  int repetitions = 0;
  /// Smallest tried size at which every repetition rejected H0.
  std::optional<std::size_t> minimal_confident_size;
};

/// For each size s, repeats R times: draw s rows from each pool without
/// replacement, run the test, record acceptance. "Confidently detected at s"
/// means zero acceptances.
ConfidenceSweep confident_detection_sweep(const Matrix& reference_pool,
                                          const Matrix& candidate_pool, const SweepParams& params,
                                          std::uint64_t seed);
ConfidenceSweep confident_detection_sweep(const Dataset& reference_pool,
                                          const Matrix& candidate_pool, const SweepParams& params,
                                          std::uint64_t seed);

enum class Grouping { original, predicted };

struct ClasswiseReport {
  Grouping grouping = Grouping::original;
  std::map<int, ConfidenceSweep> per_class;
  std::vector<std::string> warnings;  // classes skipped for lack of rows

  /// Smallest per-class minimal confident size, absent when no class has one.
  std::optional<std::size_t> best_minimal_confident_size() const;
};

/// Partitions the candidates by the provided labels (original class of the
/// inputs they derive from, or the attacked model's predictions) and sweeps
/// each group against the reference rows of that class. Classes whose pools
/// cannot supply the largest size are skipped with a warning.
ClasswiseReport classwise_test(const Dataset& reference, const Matrix& candidates,
                               std::span<const int> candidate_labels, Grouping grouping,
                               const SweepParams& params, std::uint64_t seed);

struct MixtureCell {
  double benign_fraction = 0.0;
  std::size_t size = 0;
  double acceptance_frequency = 0.0;
};

struct MixtureGrid {
  std::vector<MixtureCell> cells;  // fraction-major, then size
  int repetitions = 0;
};

/// For each (benign fraction, size): candidate samples mix round(frac*size)
/// benign rows with the remainder adversarial, tested against same-size
/// reference draws over R repetitions.
MixtureGrid mixture_sweep(const Matrix& reference_pool, const Matrix& adversarial_pool,
                          const Matrix& benign_pool, std::span<const double> benign_fractions,
                          const SweepParams& params, std::uint64_t seed);

}  // namespace advstat
