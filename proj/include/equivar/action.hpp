#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equivar/variable_system.hpp"

namespace equivar {

enum class ActionKind { Observe, Do };

// Observe(V_target = value) or Do(V_target = value); value is a domain index.
struct Action {
  ActionKind kind = ActionKind::Observe;
  std::size_t target = 0;
  std::size_t value = 0;

  auto operator<=>(const Action&) const = default;
};

// A set of single-variable actions on pairwise distinct targets, kept sorted
// by target. A singleton is the ordinary a(i).
using CompoundAction = std::vector<Action>;

enum class ActionFamily { Observe, Do, Both };

Action observe(const VariableSystem& system, std::string_view variable, std::string_view value);
Action intervene_on(const VariableSystem& system, std::string_view variable, std::string_view value);

// Throws InvalidAction on out-of-range targets/values or repeated targets.
void validate_action(std::span<const Action> action, const VariableSystem& system);
CompoundAction canonical(CompoundAction action);

std::string_view to_string(ActionKind kind);
std::string to_string(const Action& action, const VariableSystem& system);
std::string to_string(std::span<const Action> action, const VariableSystem& system);
std::string_view to_string(ActionFamily family);
// Accepts "observe", "do", "both". Throws InvalidAction.
ActionFamily parse_action_family(std::string_view text);
bool family_includes(ActionFamily family, ActionKind kind);

}  // namespace equivar
