#include <fstream>

#include <json.hpp>

#include "advstat/classifier.hpp"
#include "advstat/errors.hpp"

namespace advstat {

namespace {

constexpr const char* kFormatTag = "advstat-model";
constexpr int kFormatVersion = 1;

using nlohmann::json;

json layer_to_json(const DenseLayer& layer) {
  return json{{"outputs", layer.weights.rows()},
              {"inputs", layer.weights.cols()},
              {"weights", layer.weights.values()},
              {"bias", layer.bias}};
}

DenseLayer layer_from_json(const json& j) {
  const auto outputs = j.at("outputs").get<std::size_t>();
  const auto inputs = j.at("inputs").get<std::size_t>();
  auto weights = j.at("weights").get<std::vector<double>>();
  auto bias = j.at("bias").get<std::vector<double>>();
  if (weights.size() != outputs * inputs || bias.size() != outputs) {
    throw FormatError("model file: layer shape does not match its payload");
  }
  return DenseLayer{Matrix(outputs, inputs, std::move(weights)), std::move(bias)};
}

}  // namespace

void Classifier::save(const std::filesystem::path& path) const {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["family"] = to_string(family_);
  doc["input_dim"] = input_dim_;
  doc["num_outputs"] = num_outputs_;
  doc["has_outlier_class"] = has_outlier_class_;

  if (family_ == ModelFamily::decision_tree) {
    json nodes = json::array();
    for (const TreeNode& t : tree_) {
      nodes.push_back(json{{"feature", t.feature},
                           {"threshold", t.threshold},
                           {"left", t.left},
                           {"right", t.right},
                           {"leaf_class", t.leaf_class}});
    }
    doc["tree"] = std::move(nodes);
  } else {
    json layers = json::array();
    for (const DenseLayer& l : layers_) layers.push_back(layer_to_json(l));
    doc["layers"] = std::move(layers);
  }

  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model file: " + path.string());
  out << doc.dump(2) << '\n';
}

Classifier Classifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file: " + path.string());

  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("corrupt model file " + path.string() + ": " + e.what());
  }

  try {
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw FormatError("not an advstat model file: " + path.string());
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw FormatError("unsupported model file version in " + path.string());
    }
    const ModelFamily family = family_from_string(doc.at("family").get<std::string>());
    const int input_dim = doc.at("input_dim").get<int>();
    const int num_outputs = doc.at("num_outputs").get<int>();
    const bool outlier = doc.at("has_outlier_class").get<bool>();

    if (family == ModelFamily::decision_tree) {
      std::vector<TreeNode> nodes;
      for (const json& jn : doc.at("tree")) {
        TreeNode t;
        t.feature = jn.at("feature").get<int>();
        t.threshold = jn.at("threshold").get<double>();
        t.left = jn.at("left").get<int>();
        t.right = jn.at("right").get<int>();
        t.leaf_class = jn.at("leaf_class").get<int>();
        nodes.push_back(t);
      }
      return Classifier::from_tree(std::move(nodes), input_dim, num_outputs);
    }

    std::vector<DenseLayer> layers;
    for (const json& jl : doc.at("layers")) layers.push_back(layer_from_json(jl));
    Classifier model = Classifier::from_layers(family, std::move(layers), outlier);
    if (model.input_dim() != input_dim || model.num_outputs() != num_outputs) {
      throw FormatError("model file header disagrees with layer shapes: " + path.string());
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError("malformed model file " + path.string() + ": " + e.what());
  } catch (const ContractError& e) {
    throw FormatError("malformed model file " + path.string() + ": " + e.what());
  }
}

}  // namespace advstat
