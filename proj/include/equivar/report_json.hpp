#pragma once

#include <span>
#include <string>

#include "json.hpp"

#include "equivar/action.hpp"
#include "equivar/equivariance.hpp"

namespace equivar {

using Json = nlohmann::json;

// {"do": {"wheel": "6"}, "observe": {"display": "2"}}; the empty action is {}.
Json action_to_json(std::span<const Action> action, const VariableSystem& system);
// Accepts the form above with string or numeric values (numbers are matched by
// their JSON spelling, so 6 selects "6" and 0.5 selects "0.5"). `field` is the
// JSON pointer used in ParseError messages.
CompoundAction action_from_json(const Json& j, const VariableSystem& system, const std::string& field = "/action");

Json assignment_to_json(std::span<const std::size_t> assignment, const VariableSystem& system);

Json to_json(const EquivarianceReport& report);
Json to_json(const SurrogateChainReport& report);

// Pretty-printed document shared by the CLI and the HTTP service.
std::string dump(const Json& j);

}  // namespace equivar
