#pragma once

#include <filesystem>

#include "advstat/dataset.hpp"

namespace advstat {

/// Reads an IDX image/label file pair (the format MNIST ships in: big-endian
/// magic 0x803 for images, 0x801 for labels). Pixels are scaled to [0,1] by
/// dividing the raw byte by 255. Throws FormatError naming the offending file.
Dataset load_idx_images(const std::filesystem::path& image_path,
                        const std::filesystem::path& label_path);

/// Reads a rectangular numeric CSV. The label column may hold arbitrary text;
/// labels map to 0..K-1 in first-appearance order. The domain is binary when
/// every feature value is exactly 0 or 1, tabular otherwise (with per-feature
/// mean/stddev computed from the data). Throws FormatError with the row number.
Dataset load_csv(const std::filesystem::path& path, std::size_t label_column, bool has_header);

}  // namespace advstat
