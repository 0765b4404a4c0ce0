#pragma once

// Shared helpers for the unit suites.

#include <filesystem>
#include <string>
#include <vector>

#include "advstat/matrix.hpp"
#include "advstat/random.hpp"

namespace advstat::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, RandomSource& rng,
                            double low = -2.0, double high = 2.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = low + (high - low) * rng.next_double();
  return m;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("advstat_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  const std::filesystem::path& path() const { return base_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path base_;
};

}  // namespace advstat::testing
