#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "equivar/nir/model.hpp"

namespace equivar::nir {

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 300;
  std::size_t batch_size = 32;
  double concept_weight = 1.0;
  std::vector<std::size_t> hidden{16, 16};
  std::uint64_t seed = 13;

  // Throws InvalidArgument.
  void validate() const;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double task_loss = 0.0;
  double concept_loss = 0.0;
};

struct TrainResult {
  NirModel model;
  std::vector<EpochLoss> trace;  // full training-set loss after each epoch
};

// Plain minibatch SGD over a Fisher-Yates shuffle per epoch. All randomness
// comes from config.seed. Throws Divergence on a non-finite loss.
TrainResult train(NirModel model, const SyntheticDataset& data, const TrainConfig& config);
// Initializes from config.seed first.
TrainResult train(const SyntheticDataset& data, const std::vector<std::string>& concept_names,
                  const TrainConfig& config);

nlohmann::json to_json(const TrainConfig& config);
// Missing keys keep their defaults. Throws ParseError.
TrainConfig train_config_from_json(const nlohmann::json& j);

// "epoch,task_loss,concept_loss" rows.
std::string loss_trace_csv(const std::vector<EpochLoss>& trace);

}  // namespace equivar::nir
