#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/distribution.hpp"
#include "equivar/variable_system.hpp"

namespace equivar {

// Map tau from a source (machine) system onto a target (human) system.
//
// omega sends every source variable to a target variable and must be onto. The
// source variables sharing a target h form the block B_h (ascending indices);
// value_maps[h] gives h's value for every joint assignment of B_h, listed in
// odometer order over the block. Nothing requires tau to be invertible, and no
// inverse is ever built.
class Translation {
 public:
  Translation(VariableSystem source, VariableSystem target, std::vector<std::size_t> omega,
              std::vector<std::vector<std::size_t>> value_maps);

  static Translation identity(const VariableSystem& system);

  const VariableSystem& source() const { return source_; }
  const VariableSystem& target() const { return target_; }
  std::size_t omega(std::size_t source_index) const { return omega_[source_index]; }
  const std::vector<std::size_t>& omega() const { return omega_; }
  std::span<const std::size_t> block(std::size_t target_index) const { return blocks_[target_index]; }
  const std::vector<std::size_t>& value_map(std::size_t target_index) const { return value_maps_[target_index]; }
  const std::vector<std::vector<std::size_t>>& value_maps() const { return value_maps_; }

  // Value of target variable h under a full source assignment.
  std::size_t block_value(std::size_t h, std::span<const std::size_t> source_assignment) const;
  Assignment apply(std::span<const std::size_t> source_assignment) const;
  std::uint64_t apply_state(std::uint64_t source_state) const;

  // Translation between the subsystems on a block-closed set of source
  // variables (kept in the given order) and their targets (ascending).
  // Throws InvalidArgument when `source_subset` splits a block.
  Translation restrict(std::span<const std::size_t> source_subset) const;

 private:
  VariableSystem source_;
  VariableSystem target_;
  std::vector<std::size_t> omega_;
  std::vector<std::vector<std::size_t>> value_maps_;
  std::vector<std::vector<std::size_t>> blocks_;
};

// second after first: source of `first` to target of `second`.
Translation compose(const Translation& first, const Translation& second);

// Target weight of u is the total source weight of tau^-1(u). Throws SystemMismatch.
Distribution pushforward(const Distribution& dist, const Translation& t);

// Same kind of action on omega(i), valued by the block map. Throws
// AmbiguousTranslation when the action leaves the block's translated value
// undetermined, or mixes kinds inside one block.
Action translate_action(const Action& action, const Translation& t);
CompoundAction translate_action(std::span<const Action> action, const Translation& t);

}  // namespace equivar
