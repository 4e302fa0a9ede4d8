#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "equivar/random.hpp"

namespace equivar::nir {

// Fully connected network: tanh on every hidden layer, identity on the output.
// Batches are column-major: one sample per column.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
  };

  // Activations kept by forward() for the backward pass.
  struct Trace {
    std::vector<Eigen::MatrixXd> activations;  // input, then every layer output
  };

  struct Gradient {
    std::vector<Layer> layers;
  };

  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);
  // Uniform Glorot initialization, biases zero.
  static Mlp glorot(const std::vector<std::size_t>& sizes, Rng& rng);

  std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().weights.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().weights.rows()); }
  std::vector<std::size_t> sizes() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Trace* trace = nullptr) const;
  // Gradient of a loss with respect to the parameters, given dLoss/dOutput.
  Gradient backward(const Trace& trace, const Eigen::MatrixXd& output_grad) const;
  void apply(const Gradient& g, double step);

  bool finite() const;

 private:
  std::vector<Layer> layers_;
};

}  // namespace equivar::nir
