#include "advstat/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "advstat/errors.hpp"

namespace advstat {

namespace {

std::size_t image_side(const Dataset& data) {
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(double(data.dim()))));
  if (side * side != data.dim()) {
    throw ContractError("geometric_perturb: images must be square");
  }
  return side;
}

void flip_image(std::span<const double> src, std::span<double> dst, std::size_t side) {
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      dst[r * side + c] = src[r * side + (side - 1 - c)];
    }
  }
}

void subsample_image(std::span<const double> src, std::span<double> dst, std::size_t side,
                     std::size_t keep) {
  const std::size_t offset = (side - keep) / 2;
  for (std::size_t r = 0; r < side; ++r) {
    const std::size_t sr = offset + r * keep / side;
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t sc = offset + c * keep / side;
      dst[r * side + c] = src[sr * side + sc];
    }
  }
}

// separable convolution; edge reads clamp to the border pixel
void blur_image(std::span<const double> src, std::span<double> dst, std::size_t side,
                const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int s = static_cast<int>(side);
  std::vector<double> tmp(side * side);

  auto clamp_idx = [s](int i) { return std::clamp(i, 0, s - 1); };

  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        acc += taps[static_cast<std::size_t>(t + radius)] *
               src[static_cast<std::size_t>(r) * side + static_cast<std::size_t>(clamp_idx(c + t))];
      }
      tmp[static_cast<std::size_t>(r) * side + static_cast<std::size_t>(c)] = acc;
    }
  }
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        acc += taps[static_cast<std::size_t>(t + radius)] *
               tmp[static_cast<std::size_t>(clamp_idx(r + t)) * side + static_cast<std::size_t>(c)];
      }
      dst[static_cast<std::size_t>(r) * side + static_cast<std::size_t>(c)] =
          std::clamp(acc, 0.0, 1.0);
    }
  }
}

std::vector<double> gaussian_taps(int radius) {
  const double sigma = radius / 2.0;
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-(t * t) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

}  // namespace

Dataset geometric_perturb(const Dataset& data, const GeometricTransform& transform) {
  if (data.domain.kind != DomainKind::pixel) {
    throw ContractError("geometric_perturb: requires a pixel-domain dataset");
  }
  const std::size_t side = image_side(data);

  if (transform.kind == GeometricTransform::Kind::subsample &&
      (transform.param < 1 || static_cast<std::size_t>(transform.param) > side)) {
    throw ContractError("geometric_perturb: subsample side out of range");
  }
  if (transform.kind == GeometricTransform::Kind::gaussian_blur && transform.param < 1) {
    throw ContractError("geometric_perturb: blur radius must be at least 1");
  }

  Dataset out = data;
  const std::vector<double> taps = transform.kind == GeometricTransform::Kind::gaussian_blur
                                       ? gaussian_taps(transform.param)
                                       : std::vector<double>{};

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto src = data.features.row(i);
    auto dst = out.features.row(i);
    switch (transform.kind) {
      case GeometricTransform::Kind::flip:
        flip_image(src, dst, side);
        break;
      case GeometricTransform::Kind::subsample:
        subsample_image(src, dst, side, static_cast<std::size_t>(transform.param));
        break;
      case GeometricTransform::Kind::gaussian_blur:
        blur_image(src, dst, side, taps);
        break;
    }
  }
  return out;
}

}  // namespace advstat
