#include "report_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "advstat/errors.hpp"

namespace advstat::cli {

using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const CsvRow& header,
               const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  auto emit = [&out](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit(header);
  for (const CsvRow& row : rows) emit(row);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << doc.dump(2) << '\n';
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file for digest: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(chunk))) break;
  }
  std::ostringstream hex;
  hex << "0x" << std::hex << hash;
  return hex.str();
}

void write_crafted_csv(const std::filesystem::path& path, const BatchResult& result,
                       std::size_t dim) {
  CsvRow header;
  header.reserve(dim + 3);
  for (std::size_t i = 0; i < dim; ++i) header.push_back("f" + std::to_string(i));
  header.push_back("original_label");
  header.push_back("predicted_label");
  header.push_back("features_changed");

  std::vector<CsvRow> rows;
  rows.reserve(result.outcomes.size());
  for (const AttackOutcome& o : result.outcomes) {
    CsvRow row;
    row.reserve(dim + 3);
    for (double v : o.adversarial) row.push_back(format_double(v));
    row.push_back(std::to_string(o.source_label));
    row.push_back(std::to_string(o.predicted_after));
    row.push_back(std::to_string(o.features_changed));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double_or_throw(const std::string& cell, std::size_t row) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw FormatError("candidate file: non-numeric cell in row " + std::to_string(row));
  }
  return v;
}

}  // namespace

CraftedSet read_candidate_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open candidate file: " + path.string());

  CraftedSet set;
  std::string line;
  std::size_t row_number = 0;
  bool crafted_layout = false;
  std::size_t dim = 0;

  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);

    if (row_number == 1) {
      // crafted files open with a header ending in the three label columns
      if (fields.size() >= 4 && fields[fields.size() - 3] == "original_label") {
        crafted_layout = true;
        dim = fields.size() - 3;
        continue;
      }
      dim = fields.size();
    }

    const std::size_t expected = crafted_layout ? dim + 3 : dim;
    if (fields.size() != expected) {
      throw FormatError("candidate file: ragged row " + std::to_string(row_number));
    }
    std::vector<double> features(dim);
    for (std::size_t i = 0; i < dim; ++i) features[i] = parse_double_or_throw(fields[i], row_number);
    set.features.append_row(features);
    if (crafted_layout) {
      set.original_labels.push_back(
          static_cast<int>(parse_double_or_throw(fields[dim], row_number)));
      set.predicted_labels.push_back(
          static_cast<int>(parse_double_or_throw(fields[dim + 1], row_number)));
    }
  }
  if (set.features.rows() == 0 && !crafted_layout) {
    throw FormatError("candidate file is empty: " + path.string());
  }
  return set;
}

json attack_to_json(const AttackSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == AttackKind::fgsm || spec.kind == AttackKind::svm_shift) {
    j["epsilon"] = spec.epsilon;
  }
  if (spec.kind == AttackKind::jsma || spec.kind == AttackKind::dt_path) {
    j["budget"] = spec.budget;
  }
  if (spec.variance_scaled) j["variance_scaled"] = true;
  return j;
}

json report_to_json(const TestReport& report) {
  json j;
  j["statistic"] = report.statistic;
  j["p_value"] = report.p_value;
  j["alpha"] = report.alpha;
  j["decision"] = report.reject_h0 ? "reject" : "accept";
  j["n"] = report.n;
  j["m"] = report.m;
  j["bootstrap_iterations"] = report.bootstrap_iterations;
  j["kernel"] = {{"kind", report.kernel.kind == KernelKind::gaussian ? "gaussian" : "identity"},
                 {"bandwidth", report.kernel.bandwidth}};
  return j;
}

json sweep_to_json(const ConfidenceSweep& sweep) {
  json j;
  j["sizes"] = sweep.sizes;
  j["acceptance_frequency"] = sweep.acceptance_frequency;
  j["repetitions"] = sweep.repetitions;
  if (sweep.minimal_confident_size) {
    j["minimal_confident_size"] = *sweep.minimal_confident_size;
  } else {
    j["minimal_confident_size"] = nullptr;
  }
  return j;
}

json breakdown_to_json(const DetectionBreakdown& breakdown) {
  json j;
  j["recovered"] = breakdown.recovered;
  j["detected"] = breakdown.detected;
  j["error"] = breakdown.error;
  j["recovered_count"] = breakdown.recovered_count;
  j["detected_count"] = breakdown.detected_count;
  j["error_count"] = breakdown.error_count;
  j["total"] = breakdown.total;
  j["attack"] = attack_to_json(breakdown.attack);
  return j;
}

json summary_to_json(const BatchSummary& summary) {
  json j;
  j["attempted"] = summary.attempted;
  j["succeeded"] = summary.succeeded;
  j["success_rate"] = summary.success_rate;
  j["mean_epsilon"] = summary.mean_epsilon;
  j["mean_features_changed"] = summary.mean_features_changed;
  if (summary.no_samples) j["note"] = "no samples";
  if (!summary.failures.empty()) j["failures"] = summary.failures;
  return j;
}

void write_sweep_csv(const std::filesystem::path& path, const ConfidenceSweep& sweep) {
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < sweep.sizes.size(); ++i) {
    rows.push_back({std::to_string(sweep.sizes[i]), format_double(sweep.acceptance_frequency[i]),
                    std::to_string(sweep.repetitions)});
  }
  write_csv(path, {"size", "acceptance_frequency", "R"}, rows);
}

void write_mixture_csv(const std::filesystem::path& path, const MixtureGrid& grid) {
  std::vector<CsvRow> rows;
  for (const MixtureCell& cell : grid.cells) {
    rows.push_back({format_double(cell.benign_fraction), std::to_string(cell.size),
                    format_double(cell.acceptance_frequency), std::to_string(grid.repetitions)});
  }
  write_csv(path, {"benign_fraction", "size", "acceptance_frequency", "R"}, rows);
}

void write_classwise_csv(const std::filesystem::path& path, const ClasswiseReport& report) {
  std::vector<CsvRow> rows;
  for (const auto& [cls, sweep] : report.per_class) {
    for (std::size_t i = 0; i < sweep.sizes.size(); ++i) {
      rows.push_back({std::to_string(cls), std::to_string(sweep.sizes[i]),
                      format_double(sweep.acceptance_frequency[i]),
                      std::to_string(sweep.repetitions)});
    }
  }
  write_csv(path, {"class", "size", "acceptance_frequency", "R"}, rows);
}

void write_breakdown_csv(const std::filesystem::path& path,
                         const std::vector<AdaptiveRow>& rows) {
  std::vector<CsvRow> csv;
  for (const AdaptiveRow& row : rows) {
    const AttackSpec& eval = row.eval_attack;
    const std::string parameter = eval.kind == AttackKind::fgsm || eval.kind == AttackKind::svm_shift
                                      ? format_double(eval.epsilon)
                                      : std::to_string(eval.budget);
    csv.push_back({to_string(row.train_attack.kind), to_string(eval.kind), parameter,
                   format_double(row.breakdown.recovered), format_double(row.breakdown.detected),
                   format_double(row.breakdown.error)});
  }
  write_csv(path, {"train_attack", "eval_attack", "parameter", "recovered", "detected", "error"},
            csv);
}

void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<std::size_t>>& counts) {
  CsvRow header{"true_label"};
  for (std::size_t c = 0; c < counts.size(); ++c) header.push_back("pred_" + std::to_string(c));
  std::vector<CsvRow> rows;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    CsvRow row{std::to_string(r)};
    for (std::size_t c = 0; c < counts[r].size(); ++c) row.push_back(std::to_string(counts[r][c]));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace advstat::cli
