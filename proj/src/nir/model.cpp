#include "equivar/nir/model.hpp"

#include <cmath>
#include <string>

#include "equivar/errors.hpp"

namespace equivar::nir {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Binary cross-entropy of logistic(z) against label y.
double bce_logit(double z, double y) { return softplus(z) - y * z; }

}  // namespace

double execute(const Eigen::VectorXd& concepts, const Eigen::VectorXd& weights, double bias) {
  if (concepts.size() != weights.size()) throw DimensionMismatch("execution head: concepts and weights differ in size");
  return logistic(weights.dot(concepts) + bias);
}

NirModel::NirModel(Mlp generator, std::vector<std::string> concept_names)
    : generator_(std::move(generator)), concept_names_(std::move(concept_names)) {
  if (concept_names_.empty()) throw InvalidArgument("nir model needs at least one concept");
  if (generator_.output_dim() != 2 * concept_names_.size() + 1) {
    throw DimensionMismatch("generator must emit " + std::to_string(2 * concept_names_.size() + 1) +
                            " values (concept logits, weights, bias)");
  }
}

NirModel NirModel::initialize(std::size_t input_dim, std::vector<std::string> concept_names,
                              const std::vector<std::size_t>& hidden, Rng& rng) {
  std::vector<std::size_t> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2 * concept_names.size() + 1);
  return NirModel(Mlp::glorot(sizes, rng), std::move(concept_names));
}

NirOutput NirModel::forward(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) {
    throw DimensionMismatch("nir model expects " + std::to_string(input_dim()) + " inputs, got " +
                            std::to_string(x.size()));
  }
  const Eigen::VectorXd o = generator_.forward(x);
  const auto k = static_cast<Eigen::Index>(concept_count());
  NirOutput out;
  out.concepts = o.head(k).unaryExpr([](double z) { return logistic(z); });
  out.weights = o.segment(k, k);
  out.bias = o(2 * k);
  out.y_hat = execute(out.concepts, out.weights, out.bias);
  return out;
}

NirOutput NirModel::forward(std::span<const double> x) const {
  return forward(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()))));
}

LossBreakdown NirModel::loss(const SyntheticDataset& batch) const {
  const Eigen::MatrixXd o = generator_.forward(batch.inputs);
  const auto k = static_cast<Eigen::Index>(concept_count());
  const auto n = o.cols();
  LossBreakdown l;
  for (Eigen::Index s = 0; s < n; ++s) {
    double z = o(2 * k, s);
    for (Eigen::Index j = 0; j < k; ++j) {
      z += o(k + j, s) * logistic(o(j, s));
      l.concepts += bce_logit(o(j, s), batch.concept_labels(j, s));
    }
    l.task += bce_logit(z, batch.task_labels(s));
  }
  l.task /= static_cast<double>(n);
  l.concepts /= static_cast<double>(n);
  return l;
}

std::pair<Mlp::Gradient, LossBreakdown> NirModel::backward(const SyntheticDataset& batch, double concept_weight) const {
  Mlp::Trace trace;
  const Eigen::MatrixXd o = generator_.forward(batch.inputs, &trace);
  const auto k = static_cast<Eigen::Index>(concept_count());
  const auto n = o.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd grad(o.rows(), n);
  LossBreakdown l;
  for (Eigen::Index s = 0; s < n; ++s) {
    double z = o(2 * k, s);
    for (Eigen::Index j = 0; j < k; ++j) z += o(k + j, s) * logistic(o(j, s));
    const double y = batch.task_labels(s);
    l.task += bce_logit(z, y);
    const double dz = (logistic(z) - y) * inv_n;
    grad(2 * k, s) = dz;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double c = logistic(o(j, s));
      const double t = batch.concept_labels(j, s);
      l.concepts += bce_logit(o(j, s), t);
      grad(k + j, s) = dz * c;
      grad(j, s) = dz * o(k + j, s) * c * (1.0 - c) + concept_weight * (c - t) * inv_n;
    }
  }
  l.task *= inv_n;
  l.concepts *= inv_n;
  return {generator_.backward(trace, grad), l};
}

Accuracy evaluate(const NirModel& model, const SyntheticDataset& data) {
  Accuracy acc;
  acc.concepts.assign(model.concept_count(), 0.0);
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    const NirOutput o = model.forward(Eigen::VectorXd(data.inputs.col(col)));
    if ((o.y_hat >= 0.5 ? 1.0 : 0.0) == data.task_labels(col)) acc.task += 1.0;
    for (std::size_t j = 0; j < model.concept_count(); ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      if ((o.concepts(row) > 0.5 ? 1.0 : 0.0) == data.concept_labels(row, col)) acc.concepts[j] += 1.0;
    }
  }
  const double n = static_cast<double>(data.size());
  acc.task /= n;
  for (double& a : acc.concepts) a /= n;
  return acc;
}

NirOutput functional_intervention(const NirModel& model, const std::vector<std::pair<std::size_t, double>>& edits,
                                  std::span<const double> x) {
  NirOutput out = model.forward(x);
  const std::size_t k = model.concept_count();
  for (const auto& [index, value] : edits) {
    if (index > k) {
      throw IndexOutOfRange("weight index " + std::to_string(index) + " out of range (0.." + std::to_string(k) +
                            ", " + std::to_string(k) + " is the bias)");
    }
    if (index == k) {
      out.bias = value;
    } else {
      out.weights(static_cast<Eigen::Index>(index)) = value;
    }
  }
  out.y_hat = execute(out.concepts, out.weights, out.bias);
  return out;
}

}  // namespace equivar::nir
