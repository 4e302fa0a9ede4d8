#include "equivar/report_json.hpp"

#include <algorithm>

#include "equivar/errors.hpp"

namespace equivar {

namespace {

std::string value_label(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ParseError(field, 0, "expected a value label");
}

Json names(const VariableSystem& system, std::span<const std::size_t> indices) {
  Json out = Json::array();
  for (std::size_t i : indices) out.push_back(system[i].name);
  return out;
}

Json check_to_json(const ActionCheck& c, const EquivarianceReport& r) {
  Json j;
  j["action"] = action_to_json(c.action, r.machine_system);
  j["label"] = to_string(c.action, r.machine_system);
  if (c.verdict == Verdict::Ambiguous) {
    j["human_action"] = nullptr;
  } else {
    j["human_action"] = action_to_json(c.human_action, r.human_system);
  }
  j["discrepancy"] = c.discrepancy;
  j["verdict"] = to_string(c.verdict);
  if (c.scope) j["scope"] = r.machine_system[*c.scope].name;
  return j;
}

}  // namespace

Json action_to_json(std::span<const Action> action, const VariableSystem& system) {
  Json out = Json::object();
  for (const Action& a : action) {
    out[std::string(to_string(a.kind))][system[a.target].name] = system[a.target].domain[a.value];
  }
  return out;
}

CompoundAction action_from_json(const Json& j, const VariableSystem& system, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, 0, "action must be an object like {\"do\": {\"var\": \"value\"}}");
  CompoundAction out;
  for (const auto& [kind_name, parts] : j.items()) {
    ActionKind kind;
    if (kind_name == "do") {
      kind = ActionKind::Do;
    } else if (kind_name == "observe") {
      kind = ActionKind::Observe;
    } else {
      throw ParseError(field + "/" + kind_name, 0, "unknown action kind (expected \"do\" or \"observe\")");
    }
    if (!parts.is_object()) throw ParseError(field + "/" + kind_name, 0, "expected an object of variable: value");
    for (const auto& [var, value] : parts.items()) {
      const std::string sub = field + "/" + kind_name + "/" + var;
      const std::size_t i = system.index_of(var);
      out.push_back(Action{kind, i, system.value_index(i, value_label(value, sub))});
    }
  }
  out = canonical(std::move(out));
  validate_action(out, system);
  return out;
}

Json assignment_to_json(std::span<const std::size_t> assignment, const VariableSystem& system) {
  Json out = Json::object();
  for (std::size_t i = 0; i < assignment.size(); ++i) out[system[i].name] = system[i].domain[assignment[i]];
  return out;
}

Json to_json(const EquivarianceReport& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["tolerance"] = r.tolerance;
  j["holds"] = r.holds();
  j["max_discrepancy"] = r.max_discrepancy;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["undefined"] = r.undefined;
  j["ambiguous"] = r.ambiguous;
  j["evaluations"] = r.evaluations;
  j["cost"] = r.cost;
  std::vector<std::size_t> all_m(r.machine_system.size()), all_h(r.human_system.size());
  for (std::size_t i = 0; i < all_m.size(); ++i) all_m[i] = i;
  for (std::size_t i = 0; i < all_h.size(); ++i) all_h[i] = i;
  j["machine_variables"] = names(r.machine_system, all_m);
  j["human_variables"] = names(r.human_system, all_h);

  Json actions = Json::array();
  for (const auto& c : r.checks) actions.push_back(check_to_json(c, r));
  j["actions"] = std::move(actions);

  Json cxs = Json::array();
  for (const auto& cx : r.counterexamples) {
    cxs.push_back({{"action", action_to_json(cx.action, r.machine_system)},
                   {"label", to_string(cx.action, r.machine_system)},
                   {"human_state", assignment_to_json(cx.human_state, r.human_system)},
                   {"lhs", cx.lhs},
                   {"rhs", cx.rhs}});
  }
  j["counterexamples"] = std::move(cxs);
  j["region"] = r.region ? Json(*r.region) : Json(nullptr);

  if (r.mode == VerifyMode::CIPreservation) {
    Json cis = Json::array();
    for (const auto& c : r.ci_checks) {
      cis.push_back({{"variable", r.machine_system[c.variable].name},
                     {"conditioning", names(r.machine_system, c.conditioning)},
                     {"testable", c.testable},
                     {"machine", c.machine_holds},
                     {"human", c.testable ? Json(c.human_holds) : Json(nullptr)}});
    }
    j["ci_checks"] = std::move(cis);
    j["untestable"] = r.untestable;
  }
  if (r.mode == VerifyMode::MarkovLocal) {
    Json nbs = Json::array();
    for (const auto& nb : r.neighborhoods) {
      nbs.push_back({{"variable", r.machine_system[nb.variable].name},
                     {"members", names(r.machine_system, nb.members)},
                     {"exact", nb.exact}});
    }
    j["neighborhoods"] = std::move(nbs);
  }
  return j;
}

Json to_json(const SurrogateChainReport& r) {
  return Json{{"holds", r.holds()},
              {"original_to_surrogate", to_json(r.original_to_surrogate)},
              {"surrogate_to_human", to_json(r.surrogate_to_human)},
              {"composed", to_json(r.composed)}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace equivar
