#pragma once

#include "advstat/dataset.hpp"

namespace advstat {

/// Geometric image perturbations used to put statistical distances in
/// context: not adversarial, just distribution shifts of known shape.
struct GeometricTransform {
  enum class Kind { flip, subsample, gaussian_blur };
  Kind kind = Kind::flip;
  int param = 0;  // subsample: retained square side; blur: radius in pixels

  static GeometricTransform flip() { return {Kind::flip, 0}; }
  static GeometricTransform subsample(int side) { return {Kind::subsample, side}; }
  static GeometricTransform gaussian_blur(int radius) { return {Kind::gaussian_blur, radius}; }
};

/// Applies the transform to every image of a pixel dataset with square
/// images. flip mirrors horizontally; subsample keeps a centered k-wide
/// square and rescales back by nearest neighbour; gaussian_blur convolves
/// with a truncated renormalized Gaussian (sigma = radius/2), clamping at
/// the edges. Labels, N and d are preserved.
Dataset geometric_perturb(const Dataset& data, const GeometricTransform& transform);

}  // namespace advstat
