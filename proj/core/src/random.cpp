#include "advstat/random.hpp"

#include <cmath>
#include <numbers>

#include "advstat/errors.hpp"

namespace advstat {

namespace {

std::uint64_t splitmix_step(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  std::uint64_t z = splitmix_step(state);
  // second round so nearby streams decorrelate fully
  state ^= z;
  return splitmix_step(state);
}

std::uint64_t RandomSource::next_u64() { return splitmix_step(state_); }

double RandomSource::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_double_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::next_gaussian() {
  const double u1 = next_double_open();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomSource::next_below(std::uint64_t bound) {
  if (bound == 0) throw ContractError("next_below: bound must be positive");
  // rejection sampling keeps the draw exactly uniform
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RandomSource& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  seeded_shuffle(idx, rng);
  return idx;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    RandomSource& rng) {
  if (k > n) throw ContractError("sample_without_replacement: k exceeds population");
  // partial Fisher-Yates: first k slots of a virtual shuffle
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace advstat
