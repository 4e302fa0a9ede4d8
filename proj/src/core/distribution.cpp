#include "equivar/distribution.hpp"

#include <cmath>
#include <numeric>

#include "equivar/errors.hpp"

namespace equivar {

Distribution::Distribution(VariableSystem system, std::vector<double> weights)
    : system_(std::move(system)), weights_(std::move(weights)) {
  if (weights_.size() != system_.state_count()) {
    throw InvalidModel("distribution table size does not match the system's joint state count");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidModel("distribution has a negative weight");
  }
}

double Distribution::mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

double total_variation(const Distribution& p, const Distribution& q) {
  if (!(p.system() == q.system())) throw SystemMismatch("total variation over different systems");
  double sum = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) sum += std::abs(p[s] - q[s]);
  return 0.5 * sum;
}

}  // namespace equivar
