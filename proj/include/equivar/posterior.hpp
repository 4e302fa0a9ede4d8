#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/distribution.hpp"
#include "equivar/factored_model.hpp"

namespace equivar {

// Posterior restricted to its support: only joint states consistent with the
// action's targets are listed.
struct SparseDistribution {
  std::vector<std::uint64_t> states;
  std::vector<double> weights;
};

// Evaluates action posteriors of one model by truncated factorization over the
// states consistent with the action. Observation-only actions read a cached
// joint, so a batch of compound observations costs O(consistent states) each.
class PosteriorEvaluator {
 public:
  explicit PosteriorEvaluator(const FactoredModel& model, std::uint64_t cap = kDefaultStateCap);

  const FactoredModel& model() const { return *model_; }
  const Distribution& joint() const { return joint_; }
  std::uint64_t state_count() const { return model_->system().state_count(); }

  // Normalized posterior, or nullopt when the observed event has zero mass.
  std::optional<SparseDistribution> evaluate(std::span<const Action> action) const;
  Distribution evaluate_dense(std::span<const Action> action) const;

 private:
  const FactoredModel* model_;
  Distribution joint_;
};

}  // namespace equivar
