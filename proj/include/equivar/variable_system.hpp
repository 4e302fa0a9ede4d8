#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace equivar {

// Largest joint table any exact operation will materialize by default.
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 24;

using Assignment = std::vector<std::size_t>;

struct Variable {
  std::string name;
  std::vector<std::string> domain;

  bool operator==(const Variable&) const = default;
};

// An ordered set of discrete variables. Joint states are numbered in odometer
// order: the last variable varies fastest.
class VariableSystem {
 public:
  VariableSystem() = default;
  explicit VariableSystem(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  bool empty() const { return variables_.empty(); }
  const Variable& operator[](std::size_t i) const { return variables_[i]; }
  const std::vector<Variable>& variables() const { return variables_; }

  std::size_t cardinality(std::size_t i) const { return variables_[i].domain.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws UnknownVariable.
  std::size_t index_of(std::string_view name) const;
  // Throws UnknownValue.
  std::size_t value_index(std::size_t variable, std::string_view label) const;

  // Number of joint states, saturating at UINT64_MAX.
  std::uint64_t state_count() const { return state_count_; }
  // Same as state_count but never saturates; used for cost estimates.
  double state_count_approx() const;
  bool enumerable(std::uint64_t cap = kDefaultStateCap) const { return state_count_ <= cap; }
  // Throws StateSpaceTooLarge when the joint exceeds `cap`.
  void require_enumerable(std::uint64_t cap, std::string_view what) const;

  std::uint64_t stride(std::size_t i) const { return strides_[i]; }
  std::uint64_t encode(std::span<const std::size_t> assignment) const;
  void decode(std::uint64_t state, std::span<std::size_t> out) const;
  Assignment decode(std::uint64_t state) const;

  // Variables `indices` in the given order.
  VariableSystem subsystem(std::span<const std::size_t> indices) const;

  bool operator==(const VariableSystem& other) const { return variables_ == other.variables_; }

 private:
  std::vector<Variable> variables_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t state_count_ = 1;
};

// Number of joint states over `cards`, saturating.
std::uint64_t saturating_product(std::span<const std::size_t> cards);

}  // namespace equivar
