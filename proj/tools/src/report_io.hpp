#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "advstat/attacks.hpp"
#include "advstat/defense.hpp"
#include "advstat/matrix.hpp"
#include "advstat/stats.hpp"

namespace advstat::cli {

/// Shortest decimal that round-trips the double.
std::string format_double(double value);

using CsvRow = std::vector<std::string>;

/// Writes header + rows; bytes are deterministic for identical content.
void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// FNV-1a 64-bit digest of the file's bytes, as "0x..." hex.
std::string file_digest(const std::filesystem::path& path);

// ---- crafted adversarial sets -----------------------------------------

/// CSV with one row per input: features, original label, predicted label,
/// features-changed count.
void write_crafted_csv(const std::filesystem::path& path, const BatchResult& result,
                       std::size_t dim);

struct CraftedSet {
  Matrix features;
  std::vector<int> original_labels;   // empty for bare matrices
  std::vector<int> predicted_labels;  // empty for bare matrices
};

/// Reads a crafted CSV written by write_crafted_csv, or a bare headerless
/// numeric CSV (all columns features).
CraftedSet read_candidate_file(const std::filesystem::path& path);

// ---- report serialization ----------------------------------------------

nlohmann::json report_to_json(const TestReport& report);
nlohmann::json sweep_to_json(const ConfidenceSweep& sweep);
nlohmann::json breakdown_to_json(const DetectionBreakdown& breakdown);
nlohmann::json summary_to_json(const BatchSummary& summary);
nlohmann::json attack_to_json(const AttackSpec& spec);

void write_sweep_csv(const std::filesystem::path& path, const ConfidenceSweep& sweep);
void write_mixture_csv(const std::filesystem::path& path, const MixtureGrid& grid);
void write_classwise_csv(const std::filesystem::path& path, const ClasswiseReport& report);
void write_breakdown_csv(const std::filesystem::path& path,
                         const std::vector<AdaptiveRow>& rows);
void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<std::size_t>>& counts);

}  // namespace advstat::cli
