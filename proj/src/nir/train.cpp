#include "equivar/nir/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "equivar/errors.hpp"

namespace equivar::nir {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("train config: learning_rate must be positive");
  }
  if (epochs == 0) throw InvalidArgument("train config: epochs must be positive");
  if (batch_size == 0) throw InvalidArgument("train config: batch_size must be positive");
  if (!(concept_weight >= 0.0)) throw InvalidArgument("train config: concept_weight must be non-negative");
  for (std::size_t h : hidden) {
    if (h == 0) throw InvalidArgument("train config: hidden layer sizes must be positive");
  }
}

namespace {

SyntheticDataset gather(const SyntheticDataset& data, const std::vector<std::size_t>& order, std::size_t begin,
                        std::size_t end) {
  const auto n = static_cast<Eigen::Index>(end - begin);
  SyntheticDataset b{Eigen::MatrixXd(data.inputs.rows(), n), Eigen::MatrixXd(data.concept_labels.rows(), n),
                     Eigen::VectorXd(n)};
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto src = static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(s)]);
    b.inputs.col(s) = data.inputs.col(src);
    b.concept_labels.col(s) = data.concept_labels.col(src);
    b.task_labels(s) = data.task_labels(src);
  }
  return b;
}

}  // namespace

TrainResult train(NirModel model, const SyntheticDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.size() == 0) throw InvalidArgument("train: empty dataset");
  if (static_cast<std::size_t>(data.inputs.rows()) != model.input_dim()) {
    throw DimensionMismatch("train: dataset inputs do not match the model");
  }
  Rng shuffle{config.seed, 1};
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochLoss> trace;
  std::vector<double> totals;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto [grad, batch_loss] = model.backward(gather(data, order, begin, end), config.concept_weight);
      (void)batch_loss;
      model.generator().apply(grad, config.learning_rate);
    }
    const LossBreakdown l = model.loss(data);
    trace.push_back(EpochLoss{epoch, l.task, l.concepts});
    totals.push_back(l.total(config.concept_weight));
    if (!std::isfinite(totals.back()) || !model.generator().finite()) {
      throw Divergence("training diverged at epoch " + std::to_string(epoch), totals);
    }
  }
  return TrainResult{std::move(model), std::move(trace)};
}

TrainResult train(const SyntheticDataset& data, const std::vector<std::string>& concept_names,
                  const TrainConfig& config) {
  config.validate();
  Rng init{config.seed, 0};
  NirModel model =
      NirModel::initialize(static_cast<std::size_t>(data.inputs.rows()), concept_names, config.hidden, init);
  return train(std::move(model), data, config);
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},     {"batch_size", c.batch_size},
          {"concept_weight", c.concept_weight}, {"hidden", c.hidden}, {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("", 0, "train config must be a JSON object");
  TrainConfig c;
  auto read = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<std::decay_t<decltype(out)>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("/") + key, 0, e.what());
    }
  };
  read("learning_rate", c.learning_rate);
  read("epochs", c.epochs);
  read("batch_size", c.batch_size);
  read("concept_weight", c.concept_weight);
  read("hidden", c.hidden);
  read("seed", c.seed);
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "learning_rate" && key != "epochs" && key != "batch_size" && key != "concept_weight" &&
        key != "hidden" && key != "seed") {
      throw ParseError("/" + key, 0, "unknown train config key");
    }
  }
  return c;
}

std::string loss_trace_csv(const std::vector<EpochLoss>& trace) {
  std::string out = "epoch,task_loss,concept_loss\n";
  char buf[96];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e.epoch, e.task_loss, e.concept_loss);
    out += buf;
  }
  return out;
}

}  // namespace equivar::nir
