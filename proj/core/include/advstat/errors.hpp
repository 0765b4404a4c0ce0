#pragma once

#include <stdexcept>
#include <string>

namespace advstat {

// A caller broke a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed external input: file contents, config schema, version tags.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Operation not defined for this model family or configuration.
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// Training failed: divergence (non-finite loss) or an empty augmentation pool.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// Crafting could not proceed: no valid target class, degenerate model,
// single-leaf tree.
class AttackError : public std::runtime_error {
 public:
  explicit AttackError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace advstat
