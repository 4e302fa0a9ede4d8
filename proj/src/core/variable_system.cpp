#include "equivar/variable_system.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "equivar/errors.hpp"

namespace equivar {

std::uint64_t saturating_product(std::span<const std::size_t> cards) {
  std::uint64_t total = 1;
  for (std::size_t c : cards) {
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= c;
  }
  return total;
}

VariableSystem::VariableSystem(std::vector<Variable> variables) : variables_(std::move(variables)) {
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw InvalidModel("variable with empty name");
    if (!names.insert(v.name).second) throw InvalidModel("duplicate variable name '" + v.name + "'");
    if (v.domain.size() < 2) {
      throw InvalidModel("variable '" + v.name + "' needs at least two values");
    }
    std::set<std::string> labels(v.domain.begin(), v.domain.end());
    if (labels.size() != v.domain.size()) {
      throw InvalidModel("variable '" + v.name + "' has repeated value labels");
    }
  }
  std::vector<std::size_t> cards;
  cards.reserve(variables_.size());
  for (const auto& v : variables_) cards.push_back(v.domain.size());
  state_count_ = saturating_product(cards);

  strides_.assign(variables_.size(), 0);
  std::uint64_t stride = 1;
  for (std::size_t i = variables_.size(); i-- > 0;) {
    strides_[i] = stride;
    const std::uint64_t card = variables_[i].domain.size();
    stride = stride > std::numeric_limits<std::uint64_t>::max() / card
                 ? std::numeric_limits<std::uint64_t>::max()
                 : stride * card;
  }
}

std::optional<std::size_t> VariableSystem::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t VariableSystem::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UnknownVariable("unknown variable '" + std::string(name) + "'");
}

std::size_t VariableSystem::value_index(std::size_t variable, std::string_view label) const {
  const auto& domain = variables_.at(variable).domain;
  for (std::size_t k = 0; k < domain.size(); ++k) {
    if (domain[k] == label) return k;
  }
  throw UnknownValue("value '" + std::string(label) + "' is not in the domain of '" +
                     variables_[variable].name + "'");
}

double VariableSystem::state_count_approx() const {
  double total = 1.0;
  for (const auto& v : variables_) total *= static_cast<double>(v.domain.size());
  return total;
}

void VariableSystem::require_enumerable(std::uint64_t cap, std::string_view what) const {
  if (!enumerable(cap)) {
    throw StateSpaceTooLarge(std::string(what) + ": joint has " +
                             std::to_string(state_count_approx()) + " states, cap is " +
                             std::to_string(cap));
  }
}

std::uint64_t VariableSystem::encode(std::span<const std::size_t> assignment) const {
  std::uint64_t state = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) state += strides_[i] * assignment[i];
  return state;
}

void VariableSystem::decode(std::uint64_t state, std::span<std::size_t> out) const {
  for (std::size_t i = variables_.size(); i-- > 0;) {
    const std::uint64_t card = variables_[i].domain.size();
    out[i] = static_cast<std::size_t>(state % card);
    state /= card;
  }
}

Assignment VariableSystem::decode(std::uint64_t state) const {
  Assignment out(variables_.size());
  decode(state, out);
  return out;
}

VariableSystem VariableSystem::subsystem(std::span<const std::size_t> indices) const {
  std::vector<Variable> vars;
  vars.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= variables_.size()) throw IndexOutOfRange("variable index out of range");
    vars.push_back(variables_[i]);
  }
  return VariableSystem(std::move(vars));
}

}  // namespace equivar
