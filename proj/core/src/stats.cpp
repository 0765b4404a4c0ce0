#include "advstat/stats.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"
#include "advstat/parallel.hpp"
#include "advstat/random.hpp"

namespace advstat {

double mmd_biased(const Matrix& x1, const Matrix& x2, const KernelSpec& kernel) {
  if (x1.cols() != x2.cols()) throw ContractError("mmd_biased: feature dimension mismatch");
  if (x1.rows() == 0 || x2.rows() == 0) throw ContractError("mmd_biased: empty sample");

  const Matrix k11 = kernel_matrix(x1, x1, kernel);
  const Matrix k22 = kernel_matrix(x2, x2, kernel);
  const Matrix k12 = kernel_matrix(x1, x2, kernel);

  auto total = [](const Matrix& k) {
    double s = 0.0;
    for (double v : k.values()) s += v;
    return s;
  };

  const double n = static_cast<double>(x1.rows());
  const double m = static_cast<double>(x2.rows());
  const double squared =
      total(k11) / (n * n) + total(k22) / (m * m) - 2.0 * total(k12) / (n * m);
  return std::sqrt(std::max(0.0, squared));
}

double energy_distance(const Matrix& x1, const Matrix& x2) {
  if (x1.cols() != x2.cols()) throw ContractError("energy_distance: feature dimension mismatch");
  if (x1.rows() == 0 || x2.rows() == 0) throw ContractError("energy_distance: empty sample");

  const KernelSpec distances = KernelSpec::identity();
  auto mean = [](const Matrix& k) {
    double s = 0.0;
    for (double v : k.values()) s += v;
    return s / static_cast<double>(k.values().size());
  };

  return 2.0 * mean(kernel_matrix(x1, x2, distances)) -
         mean(kernel_matrix(x1, x1, distances)) - mean(kernel_matrix(x2, x2, distances));
}

namespace {

/// Sum over the full kernel sub-block indexed by rows (symmetric pooled
/// kernel, diagonal included).
double block_sum(const Matrix& kernel, std::span<const std::size_t> rows) {
  double acc = 0.0;
  for (std::size_t i : rows) {
    const auto krow = kernel.row(i);
    for (std::size_t j : rows) acc += krow[j];
  }
  return acc;
}

double statistic_from_sums(double s11, double s22, double s12, double n, double m) {
  const double squared = s11 / (n * n) + s22 / (m * m) - 2.0 * s12 / (n * m);
  return std::sqrt(std::max(0.0, squared));
}

}  // namespace

TestReport two_sample_test(const Matrix& x1, const Matrix& x2, const TestParams& params,
                           std::uint64_t seed) {
  if (x1.cols() != x2.cols()) throw ContractError("two_sample_test: dimension mismatch");
  if (x1.rows() < 2 || x2.rows() < 2) {
    throw ContractError("two_sample_test: each sample needs at least 2 rows");
  }
  if (params.bootstrap_iterations < 1) {
    throw ContractError("two_sample_test: bootstrap iterations must be at least 1");
  }
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw ContractError("two_sample_test: alpha must lie inside (0, 1)");
  }

  const std::size_t n = x1.rows();
  const std::size_t m = x2.rows();
  const std::size_t pooled_n = n + m;

  // bandwidth frozen once on the pooled observed sample
  const double sigma =
      params.bandwidth.has_value() ? *params.bandwidth : median_pairwise_distance(x1, x2);
  const KernelSpec kernel = KernelSpec::gaussian(sigma);

  const double observed = mmd_biased(x1, x2, kernel);

  const Matrix pooled = vstack(x1, x2);
  const Matrix k = kernel_matrix(pooled, pooled, kernel);
  double k_total = 0.0;
  for (double v : k.values()) k_total += v;

  const int iterations = params.bootstrap_iterations;
  std::size_t at_least = 0;
  std::vector<std::size_t> first(n), second(m);

  for (int b = 0; b < iterations; ++b) {
    RandomSource rng(mix_seed(seed, static_cast<std::uint64_t>(b) + 1));
    double s11, s22, s12;
    if (params.resample == ResampleMode::permutation) {
      const std::vector<std::size_t> order = shuffled_indices(pooled_n, rng);
      std::copy(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), first.begin());
      std::copy(order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), second.begin());
      s11 = block_sum(k, first);
      s22 = block_sum(k, second);
      s12 = 0.5 * (k_total - s11 - s22);  // the split partitions the pool
    } else {
      for (auto& i : first) i = rng.next_below(pooled_n);
      for (auto& i : second) i = rng.next_below(pooled_n);
      s11 = block_sum(k, first);
      s22 = block_sum(k, second);
      s12 = 0.0;
      for (std::size_t i : first) {
        const auto krow = k.row(i);
        for (std::size_t j : second) s12 += krow[j];
      }
    }
    const double stat = statistic_from_sums(s11, s22, s12, static_cast<double>(n),
                                            static_cast<double>(m));
    if (stat >= observed) ++at_least;
  }

  TestReport report;
  report.statistic = observed;
  report.p_value = static_cast<double>(1 + at_least) / static_cast<double>(iterations + 1);
  report.alpha = params.alpha;
  report.reject_h0 = report.p_value < params.alpha;
  report.n = n;
  report.m = m;
  report.bootstrap_iterations = iterations;
  report.kernel = kernel;
  return report;
}

ConfidenceSweep confident_detection_sweep(const Matrix& reference_pool,
                                          const Matrix& candidate_pool, const SweepParams& params,
                                          std::uint64_t seed) {
  if (params.sizes.empty()) throw ContractError("sweep: size list must not be empty");
  if (params.repetitions < 1) throw ContractError("sweep: repetitions must be at least 1");
  const std::size_t largest = *std::max_element(params.sizes.begin(), params.sizes.end());
  if (largest > reference_pool.rows() || largest > candidate_pool.rows()) {
    throw ContractError("sweep: requested size exceeds a pool");
  }

  ConfidenceSweep sweep;
  sweep.sizes = params.sizes;
  sweep.repetitions = params.repetitions;
  sweep.acceptance_frequency.resize(params.sizes.size(), 0.0);

  for (std::size_t si = 0; si < params.sizes.size(); ++si) {
    const std::size_t s = params.sizes[si];
    const auto reps = static_cast<std::size_t>(params.repetitions);
    std::vector<unsigned char> accepted(reps, 0);

    parallel_for(reps, [&](std::size_t r) {
      RandomSource rep_rng(mix_seed(mix_seed(seed, si), r));
      const auto ref_idx = sample_without_replacement(reference_pool.rows(), s, rep_rng);
      const auto cand_idx = sample_without_replacement(candidate_pool.rows(), s, rep_rng);
      const Matrix ref = reference_pool.take_rows(ref_idx);
      const Matrix cand = candidate_pool.take_rows(cand_idx);
      const TestReport report = two_sample_test(ref, cand, params.test, rep_rng.next_u64());
      accepted[r] = report.reject_h0 ? 0 : 1;
    });

    std::size_t accepts = 0;
    for (unsigned char a : accepted) accepts += a;
    sweep.acceptance_frequency[si] =
        static_cast<double>(accepts) / static_cast<double>(params.repetitions);
    if (accepts == 0 && !sweep.minimal_confident_size.has_value()) {
      sweep.minimal_confident_size = s;
    }
  }

  // the minimal size is the smallest tried size with zero acceptances
  if (sweep.minimal_confident_size.has_value()) {
    std::optional<std::size_t> smallest;
    for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
      if (sweep.acceptance_frequency[si] == 0.0) {
        if (!smallest || sweep.sizes[si] < *smallest) smallest = sweep.sizes[si];
      }
    }
    sweep.minimal_confident_size = smallest;
  }
  return sweep;
}

ConfidenceSweep confident_detection_sweep(const Dataset& reference_pool,
                                          const Matrix& candidate_pool, const SweepParams& params,
                                          std::uint64_t seed) {
  return confident_detection_sweep(reference_pool.features, candidate_pool, params, seed);
}

std::optional<std::size_t> ClasswiseReport::best_minimal_confident_size() const {
  std::optional<std::size_t> best;
  for (const auto& [cls, sweep] : per_class) {
    if (sweep.minimal_confident_size && (!best || *sweep.minimal_confident_size < *best)) {
      best = sweep.minimal_confident_size;
    }
  }
  return best;
}

ClasswiseReport classwise_test(const Dataset& reference, const Matrix& candidates,
                               std::span<const int> candidate_labels, Grouping grouping,
                               const SweepParams& params, std::uint64_t seed) {
  if (candidate_labels.size() != candidates.rows()) {
    throw ContractError("classwise_test: one label per candidate row required");
  }
  if (params.sizes.empty()) throw ContractError("classwise_test: size list must not be empty");
  const std::size_t largest = *std::max_element(params.sizes.begin(), params.sizes.end());

  ClasswiseReport report;
  report.grouping = grouping;

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < candidate_labels.size(); ++i) {
    groups[candidate_labels[i]].push_back(i);
  }

  for (const auto& [cls, rows] : groups) {
    const Matrix class_reference = reference.rows_of_class(cls);
    if (class_reference.rows() < largest) {
      report.warnings.push_back("class " + std::to_string(cls) +
                                " skipped: reference rows fewer than the largest size");
      continue;
    }
    if (rows.size() < largest) {
      report.warnings.push_back("class " + std::to_string(cls) +
                                " skipped: candidate rows fewer than the largest size");
      continue;
    }
    const Matrix class_candidates = candidates.take_rows(rows);
    report.per_class[cls] = confident_detection_sweep(
        class_reference, class_candidates, params,
        mix_seed(seed, static_cast<std::uint64_t>(cls)));
  }
  return report;
}

MixtureGrid mixture_sweep(const Matrix& reference_pool, const Matrix& adversarial_pool,
                          const Matrix& benign_pool, std::span<const double> benign_fractions,
                          const SweepParams& params, std::uint64_t seed) {
  if (benign_fractions.empty()) throw ContractError("mixture_sweep: fraction list empty");
  for (double f : benign_fractions) {
    if (f < 0.0 || f > 1.0) throw ContractError("mixture_sweep: fractions must lie in [0, 1]");
  }
  if (params.sizes.empty()) throw ContractError("mixture_sweep: size list must not be empty");
  const std::size_t largest = *std::max_element(params.sizes.begin(), params.sizes.end());
  if (largest > reference_pool.rows() || largest > adversarial_pool.rows() ||
      largest > benign_pool.rows()) {
    throw ContractError("mixture_sweep: requested size exceeds a pool");
  }

  MixtureGrid grid;
  grid.repetitions = params.repetitions;

  std::uint64_t cell_index = 0;
  for (double fraction : benign_fractions) {
    for (std::size_t s : params.sizes) {
      const auto benign_k =
          static_cast<std::size_t>(std::llround(fraction * static_cast<double>(s)));
      const std::size_t adv_k = s - benign_k;
      const auto reps = static_cast<std::size_t>(params.repetitions);
      std::vector<unsigned char> accepted(reps, 0);

      parallel_for(reps, [&](std::size_t r) {
        RandomSource rep_rng(mix_seed(mix_seed(seed, cell_index), r));
        const auto ref_idx = sample_without_replacement(reference_pool.rows(), s, rep_rng);
        Matrix candidate(0, reference_pool.cols());
        if (benign_k > 0) {
          const auto idx = sample_without_replacement(benign_pool.rows(), benign_k, rep_rng);
          candidate = benign_pool.take_rows(idx);
        }
        if (adv_k > 0) {
          const auto idx = sample_without_replacement(adversarial_pool.rows(), adv_k, rep_rng);
          candidate = candidate.rows() == 0 ? adversarial_pool.take_rows(idx)
                                            : vstack(candidate, adversarial_pool.take_rows(idx));
        }
        const Matrix ref = reference_pool.take_rows(ref_idx);
        const TestReport report = two_sample_test(ref, candidate, params.test, rep_rng.next_u64());
        accepted[r] = report.reject_h0 ? 0 : 1;
      });

      std::size_t accepts = 0;
      for (unsigned char a : accepted) accepts += a;
      grid.cells.push_back(MixtureCell{
          fraction, s, static_cast<double>(accepts) / static_cast<double>(params.repetitions)});
      ++cell_index;
    }
  }
  return grid;
}

}  // namespace advstat
