#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace advstat::cli {

/// Collects what a command produced: config echo, per-stage wall-clock
/// timings, and a digest inventory of every output file. Written last as
/// manifest.json in the output directory.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config_echo);

  /// Runs fn, recording its wall-clock time under the stage name.
  template <typename Fn>
  auto time_stage(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(name, start);
    } else {
      auto result = fn();
      record(name, start);
      return result;
    }
  }

  /// Registers an output file; its digest is computed immediately.
  void add_output(const std::filesystem::path& path);

  void write(const std::filesystem::path& directory) const;

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point start);

  std::string command_;
  nlohmann::json config_;
  nlohmann::json timings_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::array();
};

}  // namespace advstat::cli
