#include "advstat/loaders.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "advstat/errors.hpp"

namespace advstat {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in, const std::filesystem::path& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw FormatError("IDX file truncated: " + path.string());
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  return in;
}

}  // namespace

Dataset load_idx_images(const std::filesystem::path& image_path,
                        const std::filesystem::path& label_path) {
  std::ifstream images = open_binary(image_path);
  const std::uint32_t image_magic = read_be_u32(images, image_path);
  if (image_magic != kIdxImageMagic) {
    throw FormatError("bad IDX image magic in " + image_path.string());
  }
  const std::uint32_t n_images = read_be_u32(images, image_path);
  const std::uint32_t rows = read_be_u32(images, image_path);
  const std::uint32_t cols = read_be_u32(images, image_path);

  std::ifstream labels = open_binary(label_path);
  const std::uint32_t label_magic = read_be_u32(labels, label_path);
  if (label_magic != kIdxLabelMagic) {
    throw FormatError("bad IDX label magic in " + label_path.string());
  }
  const std::uint32_t n_labels = read_be_u32(labels, label_path);
  if (n_images != n_labels) {
    throw FormatError("IDX image/label count mismatch between " + image_path.string() +
                      " and " + label_path.string());
  }

  const std::size_t d = std::size_t(rows) * cols;
  Dataset out;
  out.features = Matrix(n_images, d);
  out.labels.resize(n_images);
  out.domain = FeatureDomain::pixel();
  out.name = image_path.stem().string();

  std::vector<unsigned char> buf(d);
  int max_label = -1;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    images.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(d));
    if (!images) throw FormatError("IDX file truncated: " + image_path.string());
    auto row = out.features.row(i);
    for (std::size_t p = 0; p < d; ++p) row[p] = buf[p] / 255.0;

    char raw_label;
    labels.read(&raw_label, 1);
    if (!labels) throw FormatError("IDX file truncated: " + label_path.string());
    const int y = static_cast<unsigned char>(raw_label);
    out.labels[i] = y;
    max_label = std::max(max_label, y);
  }
  out.num_classes = max_label + 1;
  out.validate();
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row_number) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("non-numeric cell in row " + std::to_string(row_number));
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::size_t label_column, bool has_header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path.string());

  Dataset out;
  out.name = path.stem().string();
  std::unordered_map<std::string, int> label_ids;

  std::string line;
  std::size_t row_number = 0;
  std::size_t expected_fields = 0;
  bool all_binary = true;

  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (has_header && row_number == 1) continue;
    if (line.empty()) continue;

    const std::vector<std::string> fields = split_fields(line);
    if (expected_fields == 0) {
      expected_fields = fields.size();
      if (label_column >= expected_fields) {
        throw FormatError("label column " + std::to_string(label_column) +
                          " out of range for " + std::to_string(expected_fields) + " columns");
      }
    } else if (fields.size() != expected_fields) {
      throw FormatError("ragged CSV: row " + std::to_string(row_number) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(expected_fields));
    }

    std::vector<double> row;
    row.reserve(expected_fields - 1);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_column) continue;
      const double v = parse_cell(fields[c], row_number);
      if (v != 0.0 && v != 1.0) all_binary = false;
      row.push_back(v);
    }
    out.features.append_row(row);

    const std::string& label_text = fields[label_column];
    auto [it, inserted] = label_ids.emplace(label_text, static_cast<int>(label_ids.size()));
    out.labels.push_back(it->second);
  }

  if (out.features.rows() == 0) throw FormatError("empty CSV: " + path.string());
  out.num_classes = static_cast<int>(label_ids.size());

  if (all_binary) {
    out.domain = FeatureDomain::binary();
  } else {
    const std::size_t n = out.features.rows();
    const std::size_t d = out.features.cols();
    std::vector<double> mean(d, 0.0), sq(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = out.features.row(r);
      for (std::size_t c = 0; c < d; ++c) {
        mean[c] += row[c];
        sq[c] += row[c] * row[c];
      }
    }
    std::vector<double> stddev(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
      mean[c] /= static_cast<double>(n);
      const double var = sq[c] / static_cast<double>(n) - mean[c] * mean[c];
      // constant features keep stddev 1.0 so the domain invariant holds
      stddev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    out.domain = FeatureDomain::tabular(std::move(mean), std::move(stddev));
  }

  out.validate();
  return out;
}

}  // namespace advstat
