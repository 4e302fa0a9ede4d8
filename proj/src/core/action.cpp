#include "equivar/action.hpp"

#include <algorithm>

#include "equivar/errors.hpp"

namespace equivar {

Action observe(const VariableSystem& system, std::string_view variable, std::string_view value) {
  const std::size_t i = system.index_of(variable);
  return Action{ActionKind::Observe, i, system.value_index(i, value)};
}

Action intervene_on(const VariableSystem& system, std::string_view variable, std::string_view value) {
  const std::size_t i = system.index_of(variable);
  return Action{ActionKind::Do, i, system.value_index(i, value)};
}

void validate_action(std::span<const Action> action, const VariableSystem& system) {
  std::vector<std::size_t> targets;
  for (const Action& a : action) {
    if (a.target >= system.size()) throw InvalidAction("action targets a variable out of range");
    if (a.value >= system.cardinality(a.target)) {
      throw InvalidAction("action value out of range for '" + system[a.target].name + "'");
    }
    targets.push_back(a.target);
  }
  std::sort(targets.begin(), targets.end());
  if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
    throw InvalidAction("compound action repeats a target variable");
  }
}

CompoundAction canonical(CompoundAction action) {
  std::sort(action.begin(), action.end(),
            [](const Action& a, const Action& b) { return a.target < b.target; });
  return action;
}

std::string_view to_string(ActionKind kind) { return kind == ActionKind::Do ? "do" : "observe"; }

std::string to_string(const Action& action, const VariableSystem& system) {
  const auto& var = system[action.target];
  return std::string(to_string(action.kind)) + "(" + var.name + "=" + var.domain[action.value] + ")";
}

std::string to_string(std::span<const Action> action, const VariableSystem& system) {
  if (action.empty()) return "none";
  std::string out;
  for (std::size_t k = 0; k < action.size(); ++k) {
    if (k) out += ", ";
    out += to_string(action[k], system);
  }
  return out;
}

std::string_view to_string(ActionFamily family) {
  switch (family) {
    case ActionFamily::Observe: return "observe";
    case ActionFamily::Do: return "do";
    case ActionFamily::Both: return "both";
  }
  return "both";
}

ActionFamily parse_action_family(std::string_view text) {
  if (text == "observe") return ActionFamily::Observe;
  if (text == "do") return ActionFamily::Do;
  if (text == "both") return ActionFamily::Both;
  throw InvalidAction("unknown action family '" + std::string(text) + "'");
}

bool family_includes(ActionFamily family, ActionKind kind) {
  return family == ActionFamily::Both ||
         (family == ActionFamily::Observe) == (kind == ActionKind::Observe);
}

}  // namespace equivar
