#pragma once

// Shared mini-batch gradient engine. Used by plain train() and by the
// augmented (outlier-class) training in defense.cpp, which supplies its own
// batch plan. Not installed; not part of the public surface.

#include <functional>
#include <span>
#include <vector>

#include "advstat/classifier.hpp"
#include "advstat/random.hpp"

namespace advstat::detail {

/// Produces the batches for one epoch as lists of row indices into the
/// feature matrix. The generator is derived per epoch from the config seed,
/// so plans are deterministic and independent of scheduling.
using BatchPlanFn =
    std::function<std::vector<std::vector<std::size_t>>(int epoch, RandomSource& rng)>;

/// Gradient training over explicit rows. val_rows may be empty (no early
/// stopping). Throws TrainingError when a batch loss turns non-finite.
Classifier train_gradient_model(ModelFamily family, const Matrix& features,
                                const std::vector<int>& labels, int num_outputs,
                                bool outlier_flag, const TrainConfig& config,
                                std::span<const std::size_t> val_rows, const BatchPlanFn& plan);

}  // namespace advstat::detail
