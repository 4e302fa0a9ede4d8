#pragma once

#include <vector>

#include "equivar/action.hpp"
#include "equivar/equivariance.hpp"
#include "equivar/factored_model.hpp"
#include "equivar/nir/model.hpp"

namespace equivar::nir {

struct Cell {
  std::vector<std::size_t> concepts;  // thresholded assignment
  std::size_t count = 0;
  Eigen::VectorXd concept_centroid;
  Eigen::VectorXd weight_centroid;
  double bias_centroid = 0.0;
  double y_hat = 0.0;  // head executed at the centroid
};

struct Discretization {
  FactoredModel model;                             // (C_1..C_k, Y)
  std::vector<Cell> cells;                         // realized cells, odometer order
  std::vector<std::vector<std::size_t>> empty_cells;  // never realized; excluded from the region
  std::vector<CompoundAction> region;              // Do(all concepts) per realized cell
};

// Concepts thresholded at 0.5; the concept joint is the empirical cell
// frequency (chain factorized), Y given a realized cell is a point mass on the
// head's decision at the cell centroid, uniform for empty cells.
Discretization discretize(const NirModel& model, const SyntheticDataset& data, const std::string& task_name);

struct TransparencyReport {
  Discretization discretization;
  EquivarianceReport semantic;  // region check against the rule model
};

TransparencyReport check_transparency(const NirModel& model, const SyntheticDataset& data, const DatasetRule& rule,
                                      const VerifyOptions& options = {});

}  // namespace equivar::nir
