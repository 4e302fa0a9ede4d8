#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "equivar/nir/dataset.hpp"
#include "equivar/nir/model.hpp"
#include "equivar/nir/train.hpp"

namespace equivar::nir {

struct Checkpoint {
  NirModel model;
  std::optional<TrainConfig> config;
  std::optional<DatasetRule> rule;
};

nlohmann::json rule_to_json(const DatasetRule& rule);
// Throws ParseError naming the offending field.
DatasetRule rule_from_json(const nlohmann::json& j, const std::string& field = "");

nlohmann::json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
// Throws ParseError (with the line for malformed JSON) or Error on I/O failure.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace equivar::nir
