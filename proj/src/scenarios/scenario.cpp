#include <fstream>
#include <sstream>

#include "equivar/equivariance.hpp"
#include "equivar/scenario.hpp"

namespace equivar {

using nlohmann::json;

std::vector<Diagnostic> validate(const Scenario& s, std::uint64_t cap) {
  std::vector<Diagnostic> out;
  if (s.name.empty()) out.push_back({"/name", "name is empty"});
  if (!s.metadata.is_object()) out.push_back({"/metadata", "metadata must be an object"});
  if (!(s.translation.source() == s.machine.system())) {
    out.push_back({"/translation", "translation source differs from the machine system"});
  }
  if (!(s.translation.target() == s.human.system())) {
    out.push_back({"/translation", "translation target differs from the human system"});
  }
  if (s.query && !s.human.system().find(*s.query)) {
    out.push_back({"/query", "'" + *s.query + "' is not a human variable"});
  }
  for (std::size_t k = 0; k < s.region.size(); ++k) {
    try {
      validate_action(s.region[k], s.machine.system());
    } catch (const Error& e) {
      out.push_back({"/region/" + std::to_string(k), e.what()});
    }
  }
  if (s.mixture && !(s.mixture->flat_system() == s.machine.system())) {
    out.push_back({"/mixture", "machine is not the flattened mixture"});
  }
  if (s.nir) {
    std::vector<std::string> names = s.nir->concept_names();
    names.push_back(s.nir->task.name);
    for (const auto& n : names) {
      const auto i = s.human.system().find(n);
      if (!i) {
        out.push_back({"/nir", "rule variable '" + n + "' is not a human variable"});
      } else if (s.human.system()[*i].domain != std::vector<std::string>{"0", "1"}) {
        out.push_back({"/nir", "rule variable '" + n + "' must have domain {0, 1}"});
      }
    }
  }
  if (s.surrogate) {
    if (!(s.surrogate->to_surrogate.source() == s.machine.system()) ||
        !(s.surrogate->to_surrogate.target() == s.surrogate->model.system())) {
      out.push_back({"/surrogate/to_surrogate", "systems do not match machine -> surrogate"});
    }
    if (!(s.surrogate->to_human.source() == s.surrogate->model.system()) ||
        !(s.surrogate->to_human.target() == s.human.system())) {
      out.push_back({"/surrogate/to_human", "systems do not match surrogate -> human"});
    }
  }
  if (!out.empty()) return out;

  const bool enumerable = s.machine.system().enumerable(cap) && s.human.system().enumerable(cap);
  if (s.equivariant && enumerable) {
    const EquivarianceReport r = verify_brute(s.machine, s.human, s.translation, ActionFamily::Both, 1,
                                              VerifyOptions{.cap = cap, .record_checks = false});
    if (!r.holds() || r.max_discrepancy != 0.0) {
      out.push_back({"/equivariant", "declared equivariant but brute verification found discrepancy " +
                                         std::to_string(r.max_discrepancy)});
    }
  }
  if (!s.region.empty() && enumerable) {
    const EquivarianceReport r = verify_region(s.machine, s.human, s.translation, s.region,
                                               VerifyOptions{.cap = cap, .record_checks = false});
    if (!r.holds()) {
      out.push_back({"/region", std::to_string(r.failed) + " declared region action(s) fail, max discrepancy " +
                                    std::to_string(r.max_discrepancy)});
    }
  }
  return out;
}

Scenario load_scenario(std::string_view spec) {
  constexpr std::string_view prefix = "builtin:";
  Scenario s = [&] {
    if (spec.substr(0, prefix.size()) == prefix) return builtin(spec.substr(prefix.size()));
    std::ifstream in{std::string(spec)};
    if (!in) throw UnknownScenario("cannot open scenario file '" + std::string(spec) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
  }();
  auto diagnostics = validate(s);
  if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
  return s;
}

json scenario_summary(const Scenario& s) {
  auto vars = [](const VariableSystem& sys) {
    json out = json::array();
    for (const auto& v : sys.variables()) out.push_back({{"name", v.name}, {"domain", v.domain}});
    return out;
  };
  json out = {{"name", s.name},
              {"description", s.description},
              {"machine_variables", vars(s.machine.system())},
              {"human_variables", vars(s.human.system())},
              {"equivariant", s.equivariant},
              {"has_mixture", s.mixture.has_value()},
              {"has_nir", s.nir.has_value()},
              {"has_surrogate", s.surrogate.has_value()}};
  if (s.query) out["query"] = *s.query;
  return out;
}

}  // namespace equivar
