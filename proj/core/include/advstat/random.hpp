#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace advstat {

/// Mixes a task/stream index into a master seed. Used to derive independent
/// per-task generators whose output does not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic 64-bit generator (splitmix64). The same seed produces the
/// same sequence on every platform; the distributions below are hand-rolled
/// for the same reason (std:: distributions are implementation-defined).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double next_double();

  /// Uniform double in (0, 1].
  double next_double_open();

  /// Standard normal via Box-Muller.
  double next_gaussian();

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  /// Independent generator for the given stream index, derived from the
  /// original seed (not the current state).
  RandomSource derive(std::uint64_t stream) const {
    return RandomSource(mix_seed(seed_, stream));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle; a permutation of the input, deterministic
/// given the generator state.
template <typename T>
void seeded_shuffle(std::vector<T>& items, RandomSource& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// [0, n) in shuffled order.
std::vector<std::size_t> shuffled_indices(std::size_t n, RandomSource& rng);

/// k distinct indices drawn uniformly from [0, n), k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    RandomSource& rng);

}  // namespace advstat
