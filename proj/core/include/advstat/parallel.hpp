#pragma once

#include <cstddef>
#include <functional>

namespace advstat {

/// Caps the worker count used by parallel_for. 0 restores the hardware
/// default. Intended to be set once at startup (CLI --threads flag).
void set_max_threads(unsigned count);
unsigned max_threads();

/// Runs fn(i) for every i in [0, n), split across up to max_threads()
/// workers. Results must not depend on execution order; callers that need
/// randomness derive a per-index seed. Rethrows the first exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace advstat
