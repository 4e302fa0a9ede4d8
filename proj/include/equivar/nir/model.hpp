#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equivar/nir/dataset.hpp"
#include "equivar/nir/mlp.hpp"

namespace equivar::nir {

struct NirOutput {
  Eigen::VectorXd concepts;  // c in (0,1)^k
  Eigen::VectorXd weights;   // w_1..w_k
  double bias = 0.0;         // w_0
  double y_hat = 0.5;

  // Per-concept terms w_j * c_j of the execution logit.
  Eigen::VectorXd contributions() const { return weights.cwiseProduct(concepts); }
};

// The transparent execution head: logistic(w . c + w_0).
double execute(const Eigen::VectorXd& concepts, const Eigen::VectorXd& weights, double bias);

struct LossBreakdown {
  double task = 0.0;     // mean binary cross-entropy of y_hat
  double concepts = 0.0;  // mean over samples of the summed concept cross-entropies
  double total(double concept_weight) const { return task + concept_weight * concepts; }
};

// Generator output rows: k concept logits, then w_1..w_k, then w_0.
class NirModel {
 public:
  NirModel(Mlp generator, std::vector<std::string> concept_names);
  static NirModel initialize(std::size_t input_dim, std::vector<std::string> concept_names,
                             const std::vector<std::size_t>& hidden, Rng& rng);

  std::size_t input_dim() const { return generator_.input_dim(); }
  std::size_t concept_count() const { return concept_names_.size(); }
  const std::vector<std::string>& concept_names() const { return concept_names_; }
  const Mlp& generator() const { return generator_; }
  Mlp& generator() { return generator_; }

  // Throws DimensionMismatch.
  NirOutput forward(std::span<const double> x) const;
  NirOutput forward(const Eigen::VectorXd& x) const;

  LossBreakdown loss(const SyntheticDataset& batch) const;
  // Exact gradient of task BCE + concept_weight * concept BCE, batch-averaged.
  std::pair<Mlp::Gradient, LossBreakdown> backward(const SyntheticDataset& batch, double concept_weight) const;

 private:
  Mlp generator_;
  std::vector<std::string> concept_names_;
};

struct Accuracy {
  double task = 0.0;
  std::vector<double> concepts;
};

Accuracy evaluate(const NirModel& model, const SyntheticDataset& data);

// Forward pass with generated weights overridden after generation. Index k
// (the concept count) addresses the bias w_0. Throws IndexOutOfRange.
NirOutput functional_intervention(const NirModel& model, const std::vector<std::pair<std::size_t, double>>& edits,
                                  std::span<const double> x);

}  // namespace equivar::nir
