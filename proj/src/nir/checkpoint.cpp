#include "equivar/nir/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "equivar/errors.hpp"

namespace equivar::nir {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "equivar-nir";
constexpr int kVersion = 1;

template <typename T>
T field_as(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + "/" + key, 0, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "/" + key, 0, e.what());
  }
}

}  // namespace

json rule_to_json(const DatasetRule& rule) {
  json concepts = json::array();
  for (const auto& c : rule.concepts) {
    concepts.push_back({{"name", c.name}, {"coefficients", c.coefficients}, {"threshold", c.threshold}});
  }
  return {{"input_dim", rule.input_dim},
          {"concepts", concepts},
          {"task", {{"name", rule.task.name}, {"weights", rule.task.weights}, {"bias", rule.task.bias}}},
          {"samples", rule.samples},
          {"train_fraction", rule.train_fraction},
          {"low", rule.low},
          {"high", rule.high},
          {"seed", rule.seed}};
}

DatasetRule rule_from_json(const json& j, const std::string& field) {
  DatasetRule r;
  r.input_dim = field_as<std::size_t>(j, "input_dim", field);
  const json concepts = field_as<json>(j, "concepts", field);
  if (!concepts.is_array()) throw ParseError(field + "/concepts", 0, "expected an array");
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const std::string where = field + "/concepts/" + std::to_string(i);
    r.concepts.push_back(ConceptRule{field_as<std::string>(concepts[i], "name", where),
                                     field_as<std::vector<double>>(concepts[i], "coefficients", where),
                                     field_as<double>(concepts[i], "threshold", where)});
  }
  const json task = field_as<json>(j, "task", field);
  r.task = TaskRule{field_as<std::string>(task, "name", field + "/task"),
                    field_as<std::vector<double>>(task, "weights", field + "/task"),
                    field_as<double>(task, "bias", field + "/task")};
  r.samples = field_as<std::size_t>(j, "samples", field);
  if (j.contains("train_fraction")) r.train_fraction = field_as<double>(j, "train_fraction", field);
  if (j.contains("low")) r.low = field_as<double>(j, "low", field);
  if (j.contains("high")) r.high = field_as<double>(j, "high", field);
  if (j.contains("seed")) r.seed = field_as<std::uint64_t>(j, "seed", field);
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(field, 0, e.what());
  }
  return r;
}

json to_json(const Checkpoint& cp) {
  json layers = json::array();
  for (const auto& l : cp.model.generator().layers()) {
    std::vector<double> w;
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    }
    layers.push_back({{"rows", l.weights.rows()},
                      {"cols", l.weights.cols()},
                      {"weights", w},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  json j{{"format", kFormat},
         {"version", kVersion},
         {"execution", "linear-sigmoid"},
         {"concepts", cp.model.concept_names()},
         {"layer_sizes", cp.model.generator().sizes()},
         {"layers", layers}};
  j["config"] = cp.config ? to_json(*cp.config) : json(nullptr);
  j["rule"] = cp.rule ? rule_to_json(*cp.rule) : json(nullptr);
  if (cp.rule) j["rule_description"] = cp.rule->describe();
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (field_as<std::string>(j, "format", "") != kFormat) throw ParseError("/format", 0, "not a nir checkpoint");
  if (field_as<int>(j, "version", "") != kVersion) throw ParseError("/version", 0, "unsupported checkpoint version");
  const auto concepts = field_as<std::vector<std::string>>(j, "concepts", "");
  const json layers = field_as<json>(j, "layers", "");
  std::vector<Mlp::Layer> parsed;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string where = "/layers/" + std::to_string(i);
    const auto rows = field_as<Eigen::Index>(layers[i], "rows", where);
    const auto cols = field_as<Eigen::Index>(layers[i], "cols", where);
    const auto w = field_as<std::vector<double>>(layers[i], "weights", where);
    const auto b = field_as<std::vector<double>>(layers[i], "bias", where);
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
      throw ParseError(where, 0, "parameter count does not match the declared shape");
    }
    Mlp::Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) l.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      l.bias(r) = b[static_cast<std::size_t>(r)];
    }
    parsed.push_back(std::move(l));
  }
  Checkpoint cp{NirModel(Mlp(std::move(parsed)), concepts), std::nullopt, std::nullopt};
  if (j.contains("config") && !j["config"].is_null()) {
    try {
      cp.config = train_config_from_json(j["config"]);
    } catch (const ParseError& e) {
      throw ParseError("/config" + e.field(), 0, e.what());
    }
  }
  if (j.contains("rule") && !j["rule"].is_null()) cp.rule = rule_from_json(j["rule"], "/rule");
  return cp;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << to_json(cp).dump(1) << "\n";
  if (!out) throw Error("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    // byte offset -> line
    const std::string text = buf.str();
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError("", line, e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace equivar::nir
