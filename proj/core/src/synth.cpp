#include "advstat/synth.hpp"

#include <array>
#include <cmath>

#include "advstat/errors.hpp"
#include "advstat/random.hpp"

namespace advstat {

namespace {

constexpr std::size_t kDigitSide = 8;
constexpr double kInkValue = 0.85;
constexpr double kPaperValue = 0.10;
constexpr double kPixelNoise = 0.1;

// 8x8 stroke templates, one per digit.
constexpr std::array<std::array<const char*, 8>, 10> kDigitGlyphs = {{
    {"..####..",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     "..####.."},
    {"....#...",
     "...##...",
     "..#.#...",
     "....#...",
     "....#...",
     "....#...",
     "....#...",
     "..#####."},
    {"..####..",
     ".#....#.",
     "......#.",
     ".....#..",
     "....#...",
     "...#....",
     "..#.....",
     ".######."},
    {"..####..",
     ".#....#.",
     "......#.",
     "...###..",
     "......#.",
     "......#.",
     ".#....#.",
     "..####.."},
    {"....##..",
     "...#.#..",
     "..#..#..",
     ".#...#..",
     ".######.",
     ".....#..",
     ".....#..",
     ".....#.."},
    {".######.",
     ".#......",
     ".#......",
     ".#####..",
     "......#.",
     "......#.",
     ".#....#.",
     "..####.."},
    {"..####..",
     ".#......",
     ".#......",
     ".#####..",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     "..####.."},
    {".######.",
     "......#.",
     ".....#..",
     "....#...",
     "....#...",
     "...#....",
     "...#....",
     "...#...."},
    {"..####..",
     ".#....#.",
     ".#....#.",
     "..####..",
     ".#....#.",
     ".#....#.",
     ".#....#.",
     "..####.."},
    {"..####..",
     ".#....#.",
     ".#....#.",
     "..#####.",
     "......#.",
     "......#.",
     ".....#..",
     "..###..."},
}};

}  // namespace

Dataset synth_digits(std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) throw ContractError("synth_digits: per_class must be at least 1");

  constexpr std::size_t d = kDigitSide * kDigitSide;
  Dataset out;
  out.features = Matrix(per_class * 10, d);
  out.labels.resize(per_class * 10);
  out.num_classes = 10;
  out.domain = FeatureDomain::pixel();
  out.name = "synth_digits";

  RandomSource rng(seed);
  std::size_t row_index = 0;
  for (int cls = 0; cls < 10; ++cls) {
    for (std::size_t k = 0; k < per_class; ++k, ++row_index) {
      auto row = out.features.row(row_index);
      for (std::size_t r = 0; r < kDigitSide; ++r) {
        for (std::size_t c = 0; c < kDigitSide; ++c) {
          const double base =
              kDigitGlyphs[static_cast<std::size_t>(cls)][r][c] == '#' ? kInkValue : kPaperValue;
          const double v = base + kPixelNoise * rng.next_gaussian();
          row[r * kDigitSide + c] = std::clamp(v, 0.0, 1.0);
        }
      }
      out.labels[row_index] = cls;
    }
  }
  return out;
}

Dataset synth_binary_malware(std::size_t n_benign, std::size_t n_malicious, std::size_t d,
                             std::uint64_t seed) {
  if (d < 20) throw ContractError("synth_binary_malware: d must be at least 20");

  RandomSource profile_rng = RandomSource(seed).derive(0);
  RandomSource row_rng = RandomSource(seed).derive(1);

  // first half of the features separate the classes; the rest are shared
  std::vector<double> p_benign(d), p_malicious(d);
  const std::size_t discriminative = d / 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (j < discriminative) {
      p_benign[j] = 0.05 + 0.25 * profile_rng.next_double();
      p_malicious[j] = 0.65 + 0.30 * profile_rng.next_double();
    } else {
      p_benign[j] = 0.10 + 0.60 * profile_rng.next_double();
      p_malicious[j] = p_benign[j];
    }
  }

  Dataset out;
  out.features = Matrix(n_benign + n_malicious, d);
  out.labels.resize(n_benign + n_malicious);
  out.num_classes = 2;
  out.domain = FeatureDomain::binary();
  out.name = "synth_binary_malware";

  for (std::size_t i = 0; i < n_benign + n_malicious; ++i) {
    const bool malicious = i >= n_benign;
    const auto& profile = malicious ? p_malicious : p_benign;
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = row_rng.next_double() < profile[j] ? 1.0 : 0.0;
    }
    out.labels[i] = malicious ? 1 : 0;
  }
  return out;
}

Dataset synth_tabular(std::size_t n_per_class, std::uint64_t seed) {
  constexpr std::size_t d = 5;
  constexpr std::array<double, d> kMean0 = {1.0, -0.5, 2.0, 0.0, 1.5};
  constexpr std::array<double, d> kMean1 = {2.2, 0.5, 0.5, 0.8, 0.5};
  constexpr std::array<double, d> kStd0 = {0.5, 0.4, 0.8, 0.3, 0.6};
  constexpr std::array<double, d> kStd1 = {0.6, 0.5, 0.7, 0.4, 0.5};

  Dataset out;
  out.features = Matrix(2 * n_per_class, d);
  out.labels.resize(2 * n_per_class);
  out.num_classes = 2;
  out.name = "synth_tabular";

  RandomSource rng(seed);
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const bool second = i >= n_per_class;
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double mu = second ? kMean1[j] : kMean0[j];
      const double sd = second ? kStd1[j] : kStd0[j];
      row[j] = mu + sd * rng.next_gaussian();
    }
    out.labels[i] = second ? 1 : 0;
  }

  // pooled empirical stats drive variance-scaled perturbations
  const std::size_t n = out.features.rows();
  std::vector<double> mean(d, 0.0), sq(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = out.features.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] += row[j];
      sq[j] += row[j] * row[j];
    }
  }
  std::vector<double> stddev(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    mean[j] /= static_cast<double>(n);
    const double var = sq[j] / static_cast<double>(n) - mean[j] * mean[j];
    stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  out.domain = FeatureDomain::tabular(std::move(mean), std::move(stddev));
  return out;
}

}  // namespace advstat
