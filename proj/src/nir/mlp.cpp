#include "equivar/nir/mlp.hpp"

#include <cmath>
#include <string>

#include "equivar/errors.hpp"

namespace equivar::nir {

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("mlp needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weights.rows()) {
      throw DimensionMismatch("mlp layer " + std::to_string(l) + ": bias does not match weight rows");
    }
    if (l > 0 && layers_[l].weights.cols() != layers_[l - 1].weights.rows()) {
      throw DimensionMismatch("mlp layer " + std::to_string(l) + " does not chain onto the previous layer");
    }
  }
}

Mlp Mlp::glorot(const std::vector<std::size_t>& sizes, Rng& rng) {
  if (sizes.size() < 2) throw InvalidArgument("mlp needs input and output sizes");
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Layer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    }
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::vector<std::size_t> Mlp::sizes() const {
  std::vector<std::size_t> out{input_dim()};
  for (const auto& l : layers_) out.push_back(static_cast<std::size_t>(l.weights.rows()));
  return out;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Trace* trace) const {
  if (static_cast<std::size_t>(x.rows()) != input_dim()) {
    throw DimensionMismatch("mlp expects " + std::to_string(input_dim()) + " inputs, got " +
                            std::to_string(x.rows()));
  }
  if (trace) {
    trace->activations.clear();
    trace->activations.push_back(x);
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    a = std::move(z);
    if (trace) trace->activations.push_back(a);
  }
  return a;
}

Mlp::Gradient Mlp::backward(const Trace& trace, const Eigen::MatrixXd& output_grad) const {
  Gradient g;
  g.layers.resize(layers_.size());
  Eigen::MatrixXd delta = output_grad;  // dLoss / d(pre-activation) of the current layer
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = trace.activations[l];
    g.layers[l].weights = delta * input.transpose();
    g.layers[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd up = layers_[l].weights.transpose() * delta;
    // input = tanh(z) for hidden layers, so dtanh = 1 - input^2.
    delta = up.array() * (1.0 - input.array().square());
  }
  return g;
}

void Mlp::apply(const Gradient& g, double step) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weights -= step * g.layers[l].weights;
    layers_[l].bias -= step * g.layers[l].bias;
  }
}

bool Mlp::finite() const {
  for (const auto& l : layers_) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

}  // namespace equivar::nir
