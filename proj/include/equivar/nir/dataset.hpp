#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equivar/factored_model.hpp"

namespace equivar::nir {

// Concept j is 1[coefficients . x > threshold].
struct ConceptRule {
  std::string name;
  std::vector<double> coefficients;
  double threshold = 0.0;
};

// Task label is 1[weights . c + bias > 0] over the binary concepts.
struct TaskRule {
  std::string name;
  std::vector<double> weights;
  double bias = 0.0;
};

struct DatasetRule {
  std::size_t input_dim = 0;
  std::vector<ConceptRule> concepts;
  TaskRule task;
  std::size_t samples = 0;
  double train_fraction = 0.75;
  double low = -1.0;
  double high = 1.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument.
  void validate() const;
  std::vector<std::string> concept_names() const;
  std::string describe() const;
};

struct SyntheticDataset {
  Eigen::MatrixXd inputs;          // input_dim x n
  Eigen::MatrixXd concept_labels;  // k x n, entries 0/1
  Eigen::VectorXd task_labels;     // n, entries 0/1

  std::size_t size() const { return static_cast<std::size_t>(inputs.cols()); }
  SyntheticDataset slice(std::size_t begin, std::size_t end) const;
};

// Inputs uniform on [low, high]^d, labels from the rule.
SyntheticDataset generate(const DatasetRule& rule);
// First train_fraction of the rows, then the rest.
std::pair<SyntheticDataset, SyntheticDataset> split(const SyntheticDataset& data, double train_fraction);

std::vector<std::size_t> concept_labels_of(const DatasetRule& rule, const Eigen::VectorXd& x);
std::size_t task_label_of(const DatasetRule& rule, const std::vector<std::size_t>& concepts);
// Every row's labels agree with the rule.
bool consistent(const DatasetRule& rule, const SyntheticDataset& data);

// Human reference model of the rule: concepts are independent uniform roots
// with domain {"0","1"}, the task a deterministic child of all concepts.
FactoredModel rule_model(const DatasetRule& rule);

}  // namespace equivar::nir
