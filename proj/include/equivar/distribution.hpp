#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "equivar/variable_system.hpp"

namespace equivar {

// Dense probability table over every joint state of a system.
class Distribution {
 public:
  Distribution(VariableSystem system, std::vector<double> weights);

  const VariableSystem& system() const { return system_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::uint64_t state) const { return weights_[state]; }
  double probability(std::span<const std::size_t> assignment) const {
    return weights_[system_.encode(assignment)];
  }
  double mass() const;

 private:
  VariableSystem system_;
  std::vector<double> weights_;
};

// 0.5 * sum |p - q|. Throws SystemMismatch unless both share a system.
double total_variation(const Distribution& p, const Distribution& q);

}  // namespace equivar
