#pragma once

#include <cstdint>

#include "advstat/dataset.hpp"

namespace advstat {

/// 10-class 8x8 pixel digits: fixed stroke templates plus per-pixel Gaussian
/// noise (stddev 0.1, clamped to [0,1]). Deterministic in the seed.
Dataset synth_digits(std::size_t per_class, std::uint64_t seed);

/// 2-class binary feature set (benign = 0, malicious = 1). Each class draws
/// features from its own per-feature Bernoulli activation profile; roughly
/// half the features are discriminative, the rest shared noise. d >= 20.
Dataset synth_binary_malware(std::size_t n_benign, std::size_t n_malicious, std::size_t d,
                             std::uint64_t seed);

/// 2-class, 5-feature tabular data with class-dependent per-feature means and
/// spreads. The pooled per-feature mean/stddev are recorded in the domain.
Dataset synth_tabular(std::size_t n_per_class, std::uint64_t seed);

}  // namespace advstat
