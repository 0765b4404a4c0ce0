#include "manifest.hpp"

#include "advstat/version.hpp"
#include "report_io.hpp"

namespace advstat::cli {

RunManifest::RunManifest(std::string command, nlohmann::json config_echo)
    : command_(std::move(command)), config_(std::move(config_echo)) {}

void RunManifest::record(const std::string& name, std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  timings_[name] = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs_.push_back({{"path", path.filename().string()}, {"fnv1a64", file_digest(path)}});
}

void RunManifest::write(const std::filesystem::path& directory) const {
  nlohmann::json doc;
  doc["tool"] = "advstat";
  doc["version"] = kVersion;
  doc["command"] = command_;
  doc["config"] = config_;
  doc["timings_ms"] = timings_;
  doc["outputs"] = outputs_;
  write_json(directory / "manifest.json", doc);
}

}  // namespace advstat::cli
