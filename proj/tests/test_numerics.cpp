#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "advstat/errors.hpp"
#include "advstat/kernel.hpp"
#include "advstat/matrix.hpp"
#include "advstat/random.hpp"
#include "test_support.hpp"

using namespace advstat;
using advstat::testing::random_matrix;

namespace {

// independent oracle: pooled pairwise distances, brute sort
double median_oracle(const Matrix& a, const Matrix& b) {
  const Matrix pooled = vstack(a, b);
  std::vector<double> d;
  for (std::size_t i = 0; i < pooled.rows(); ++i) {
    for (std::size_t j = i + 1; j < pooled.rows(); ++j) {
      d.push_back(euclidean_distance(pooled.row(i), pooled.row(j)));
    }
  }
  std::sort(d.begin(), d.end());
  if (d.empty()) return 1.0;
  const std::size_t mid = d.size() / 2;
  const double median = d.size() % 2 == 1 ? d[mid] : 0.5 * (d[mid - 1] + d[mid]);
  return median == 0.0 ? 1.0 : median;
}

}  // namespace

TEST_CASE("matrix basics and invariants") {
  Matrix m(2, 3, 1.5);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 1.5);
  CHECK(m.all_finite());

  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ContractError);

  Matrix stacked = vstack(Matrix(1, 2, 0.0), Matrix(2, 2, 1.0));
  CHECK(stacked.rows() == 3);
  CHECK(stacked(0, 0) == 0.0);
  CHECK(stacked(2, 1) == 1.0);

  const std::vector<std::size_t> pick{2, 0};
  Matrix taken = stacked.take_rows(pick);
  CHECK(taken.rows() == 2);
  CHECK(taken(0, 0) == 1.0);
  CHECK(taken(1, 0) == 0.0);
}

TEST_CASE("gaussian kernel matches the closed form") {
  // k(x, x) = 1
  Matrix a(1, 2, std::vector<double>{0.0, 0.0});
  Matrix k = kernel_matrix(a, a, KernelSpec::gaussian(1.0));
  CHECK(k(0, 0) == doctest::Approx(1.0));

  // k(0, 1) with sigma 1 = exp(-0.5)
  Matrix x(1, 1, std::vector<double>{0.0});
  Matrix y(1, 1, std::vector<double>{1.0});
  k = kernel_matrix(x, y, KernelSpec::gaussian(1.0));
  CHECK(k(0, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  // identity kind returns distances
  Matrix z(1, 1, std::vector<double>{3.0});
  k = kernel_matrix(x, z, KernelSpec::identity());
  CHECK(k(0, 0) == doctest::Approx(3.0));

  CHECK_THROWS_AS(kernel_matrix(x, Matrix(1, 2, 0.0), KernelSpec::gaussian(1.0)), ContractError);
  CHECK_THROWS_AS(kernel_matrix(x, y, KernelSpec::gaussian(0.0)), ContractError);
}

TEST_CASE("gaussian kernel entries lie in (0,1], symmetric, unit diagonal") {
  RandomSource rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(5, 3, rng);
    const Matrix b = random_matrix(4, 3, rng);
    const KernelSpec spec = KernelSpec::gaussian(0.5 + rng.next_double());

    const Matrix kab = kernel_matrix(a, b, spec);
    const Matrix kba = kernel_matrix(b, a, spec);
    for (std::size_t i = 0; i < kab.rows(); ++i) {
      for (std::size_t j = 0; j < kab.cols(); ++j) {
        CHECK(kab(i, j) > 0.0);
        CHECK(kab(i, j) <= 1.0);
        CHECK(kab(i, j) == doctest::Approx(kba(j, i)).epsilon(1e-15));
      }
    }
    const Matrix kaa = kernel_matrix(a, a, spec);
    for (std::size_t i = 0; i < kaa.rows(); ++i) CHECK(kaa(i, i) == doctest::Approx(1.0));
  }
}

TEST_CASE("median pairwise distance examples") {
  Matrix a(1, 1, std::vector<double>{0.0});
  Matrix b(1, 1, std::vector<double>{2.0});
  CHECK(median_pairwise_distance(a, b) == doctest::Approx(2.0));

  // all-equal pooled sample falls back to 1.0
  Matrix c(2, 1, std::vector<double>{5.0, 5.0});
  CHECK(median_pairwise_distance(c, c) == doctest::Approx(1.0));

  Matrix d(2, 1, std::vector<double>{0.0, 0.0});
  Matrix e(2, 1, std::vector<double>{1.0, 1.0});
  CHECK(median_pairwise_distance(d, e) == doctest::Approx(1.0));

  CHECK_THROWS_AS(median_pairwise_distance(Matrix(), b), ContractError);
}

TEST_CASE("median pairwise distance matches brute-force oracle and is symmetric") {
  RandomSource rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_below(6);
    const std::size_t m = 1 + rng.next_below(6);
    const std::size_t cols = 1 + rng.next_below(4);
    const Matrix a = random_matrix(n, cols, rng);
    const Matrix b = random_matrix(m, cols, rng);
    const double got = median_pairwise_distance(a, b);
    CHECK(got == doctest::Approx(median_oracle(a, b)).epsilon(1e-12));
    CHECK(got == doctest::Approx(median_pairwise_distance(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("seeded shuffle is deterministic and a permutation") {
  std::vector<int> empty;
  RandomSource rng(3);
  seeded_shuffle(empty, rng);
  CHECK(empty.empty());

  std::vector<int> one{7};
  seeded_shuffle(one, rng);
  CHECK(one == std::vector<int>{7});

  std::vector<int> a{0, 1, 2, 3};
  std::vector<int> b{0, 1, 2, 3};
  RandomSource r1(42), r2(42);
  seeded_shuffle(a, r1);
  seeded_shuffle(b, r2);
  CHECK(a == b);

  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> items;
    const std::size_t n = rng.next_below(20);
    for (std::size_t i = 0; i < n; ++i) items.push_back(static_cast<int>(rng.next_below(5)));
    std::vector<int> before = items;
    seeded_shuffle(items, rng);
    std::sort(before.begin(), before.end());
    std::vector<int> after = items;
    std::sort(after.begin(), after.end());
    CHECK(before == after);
  }
}

TEST_CASE("random source is platform-stable and uniform-ish") {
  RandomSource a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomSource rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const std::uint64_t k = rng.next_below(17);
    CHECK(k < 17);
  }

  // derived streams differ from the parent and from each other
  RandomSource base(9);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 16; ++s) firsts.insert(base.derive(s).next_u64());
  CHECK(firsts.size() == 16);
}

TEST_CASE("sample_without_replacement draws distinct indices") {
  RandomSource rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.next_below(50);
    const std::size_t k = rng.next_below(n + 1);
    const auto idx = sample_without_replacement(n, k, rng);
    CHECK(idx.size() == k);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    CHECK(unique.size() == k);
    for (std::size_t i : idx) CHECK(i < n);
  }
  CHECK_THROWS_AS(sample_without_replacement(3, 4, rng), ContractError);
}

TEST_CASE("gaussian draws have sane moments") {
  RandomSource rng(77);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_gaussian();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}
