#include <algorithm>
#include <set>

#include "equivar/nir/checkpoint.hpp"
#include "equivar/report_json.hpp"
#include "equivar/scenario.hpp"

namespace equivar {

using nlohmann::json;

namespace {

std::string escape(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string at(const std::string& field, std::string_view key) { return field + "/" + escape(key); }
std::string at(const std::string& field, std::size_t index) { return field + "/" + std::to_string(index); }

const json& member(const json& j, std::string_view key, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, 0, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(at(field, key), 0, "missing required field");
  return *it;
}

void only_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& field) {
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(at(field, key), 0, "unknown field");
    }
  }
}

// Labels are strings; numbers are accepted and spelled as JSON writes them.
std::string label(const json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ParseError(field, 0, "expected a string label");
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw ParseError(field, 0, "expected a string");
  return j.get<std::string>();
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, 0, "expected a number");
  return j.get<double>();
}

const json& array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, 0, "expected an array");
  return j;
}

std::vector<double> numbers(const json& j, const std::string& field) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, field).size(); ++i) out.push_back(number(j[i], at(field, i)));
  return out;
}

std::size_t variable(const VariableSystem& sys, const std::string& name, const std::string& field) {
  if (const auto i = sys.find(name)) return *i;
  throw ParseError(field, 0, "unknown variable '" + name + "'");
}

std::size_t value(const VariableSystem& sys, std::size_t i, const std::string& lbl, const std::string& field) {
  const auto& d = sys[i].domain;
  const auto it = std::find(d.begin(), d.end(), lbl);
  if (it == d.end()) throw ParseError(field, 0, "'" + lbl + "' is not a value of '" + sys[i].name + "'");
  return static_cast<std::size_t>(it - d.begin());
}

VariableSystem system_from_json(const json& j, const std::string& field) {
  std::vector<Variable> vars;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < array(j, field).size(); ++i) {
    const std::string where = at(field, i);
    only_keys(j[i], {"name", "domain"}, where);
    Variable v{text(member(j[i], "name", where), at(where, "name")), {}};
    const json& dom = array(member(j[i], "domain", where), at(where, "domain"));
    for (std::size_t k = 0; k < dom.size(); ++k) v.domain.push_back(label(dom[k], at(at(where, "domain"), k)));
    if (!seen.insert(v.name).second) throw ParseError(at(where, "name"), 0, "duplicate variable '" + v.name + "'");
    vars.push_back(std::move(v));
  }
  try {
    return VariableSystem(std::move(vars));
  } catch (const Error& e) {
    throw ParseError(field, 0, e.what());
  }
}

json system_to_json(const VariableSystem& sys) {
  json vars = json::array();
  for (const auto& v : sys.variables()) vars.push_back({{"name", v.name}, {"domain", v.domain}});
  return vars;
}

}  // namespace

json model_to_json(const FactoredModel& model) {
  const VariableSystem& sys = model.system();
  json parents = json::object();
  json cpds = json::object();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (!model.parents(i).empty()) {
      json ps = json::array();
      for (std::size_t p : model.parents(i)) ps.push_back(sys[p].name);
      parents[sys[i].name] = ps;
    }
    const Cpd& c = model.cpd(i);
    if (c.is_table()) {
      const auto& probs = c.as_table().probabilities;
      const std::size_t card = sys.cardinality(i);
      json rows = json::array();
      for (std::size_t r = 0; r * card < probs.size(); ++r) {
        rows.push_back(std::vector<double>(probs.begin() + static_cast<std::ptrdiff_t>(r * card),
                                           probs.begin() + static_cast<std::ptrdiff_t>((r + 1) * card)));
      }
      cpds[sys[i].name] = {{"table", rows}};
    } else {
      const auto& l = c.as_logistic();
      cpds[sys[i].name] = {{"logistic", {{"bias", l.bias}, {"weights", l.weights}}}};
    }
  }
  json out = {{"variables", system_to_json(sys)}, {"parents", parents}, {"cpds", cpds}};
  if (!model.parameter_vars().empty()) {
    json ps = json::array();
    for (std::size_t p : model.parameter_vars()) ps.push_back(sys[p].name);
    out["parameter_vars"] = ps;
  }
  return out;
}

FactoredModel model_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, 0, "expected a model object");
  only_keys(j, {"variables", "parents", "cpds", "parameter_vars"}, field);
  const VariableSystem sys = system_from_json(member(j, "variables", field), at(field, "variables"));
  std::vector<std::vector<std::size_t>> parents(sys.size());
  if (j.contains("parents")) {
    const std::string pf = at(field, "parents");
    if (!j["parents"].is_object()) throw ParseError(pf, 0, "expected an object of variable: [parents]");
    for (const auto& [child, ps] : j["parents"].items()) {
      const std::size_t c = variable(sys, child, at(pf, child));
      for (std::size_t k = 0; k < array(ps, at(pf, child)).size(); ++k) {
        const std::string where = at(at(pf, child), k);
        parents[c].push_back(variable(sys, text(ps[k], where), where));
      }
    }
  }
  const std::string cf = at(field, "cpds");
  const json& cj = member(j, "cpds", field);
  if (!cj.is_object()) throw ParseError(cf, 0, "expected an object of variable: cpd");
  for (const auto& [name, unused] : cj.items()) {
    (void)unused;
    variable(sys, name, at(cf, name));
  }
  std::vector<Cpd> cpds;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const std::string where = at(cf, sys[i].name);
    const json& c = member(cj, sys[i].name, cf);
    if (!c.is_object() || c.size() != 1) throw ParseError(where, 0, "expected {\"table\": ...} or {\"logistic\": ...}");
    if (c.contains("table")) {
      const std::string tf = at(where, "table");
      std::vector<double> probs;
      for (std::size_t r = 0; r < array(c["table"], tf).size(); ++r) {
        if (c["table"][r].is_array()) {
          const auto row = numbers(c["table"][r], at(tf, r));
          probs.insert(probs.end(), row.begin(), row.end());
        } else {
          probs.push_back(number(c["table"][r], at(tf, r)));
        }
      }
      cpds.push_back(Cpd::table(std::move(probs)));
    } else if (c.contains("logistic")) {
      const std::string lf = at(where, "logistic");
      only_keys(c["logistic"], {"bias", "weights"}, lf);
      cpds.push_back(Cpd::logistic(number(member(c["logistic"], "bias", lf), at(lf, "bias")),
                                   numbers(member(c["logistic"], "weights", lf), at(lf, "weights"))));
    } else {
      throw ParseError(where, 0, "expected {\"table\": ...} or {\"logistic\": ...}");
    }
  }
  std::vector<std::size_t> params;
  if (j.contains("parameter_vars")) {
    const std::string pf = at(field, "parameter_vars");
    for (std::size_t k = 0; k < array(j["parameter_vars"], pf).size(); ++k) {
      params.push_back(variable(sys, text(j["parameter_vars"][k], at(pf, k)), at(pf, k)));
    }
  }
  try {
    return FactoredModel(sys, std::move(parents), std::move(cpds), std::move(params));
  } catch (const Error& e) {
    throw ParseError(field, 0, e.what());
  }
}

json translation_to_json(const Translation& t) {
  const VariableSystem& src = t.source();
  const VariableSystem& tgt = t.target();
  json omega = json::object();
  for (std::size_t i = 0; i < src.size(); ++i) omega[src[i].name] = tgt[t.omega(i)].name;
  json maps = json::object();
  for (std::size_t h = 0; h < tgt.size(); ++h) {
    const auto block = t.block(h);
    const auto& vm = t.value_map(h);
    if (block.size() == 1) {
      json m = json::object();
      for (std::size_t v = 0; v < vm.size(); ++v) m[src[block[0]].domain[v]] = tgt[h].domain[vm[v]];
      maps[tgt[h].name] = m;
    } else {
      json m = json::array();
      for (std::size_t v : vm) m.push_back(tgt[h].domain[v]);
      maps[tgt[h].name] = m;
    }
  }
  return {{"omega", omega}, {"value_maps", maps}};
}

Translation translation_from_json(const json& j, const VariableSystem& source, const VariableSystem& target,
                                  const std::string& field) {
  if (!j.is_object()) throw ParseError(field, 0, "expected a translation object");
  only_keys(j, {"omega", "value_maps"}, field);
  const std::string of = at(field, "omega");
  const json& oj = member(j, "omega", field);
  if (!oj.is_object()) throw ParseError(of, 0, "expected an object of machine variable: human variable");
  for (const auto& [name, unused] : oj.items()) {
    (void)unused;
    variable(source, name, at(of, name));
  }
  std::vector<std::size_t> omega;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::string where = at(of, source[i].name);
    omega.push_back(variable(target, text(member(oj, source[i].name, of), where), where));
  }
  std::vector<std::vector<std::size_t>> blocks(target.size());
  for (std::size_t i = 0; i < source.size(); ++i) blocks[omega[i]].push_back(i);
  for (std::size_t h = 0; h < target.size(); ++h) {
    if (blocks[h].empty()) throw ParseError(of, 0, "no machine variable maps onto '" + target[h].name + "'");
  }

  const std::string mf = at(field, "value_maps");
  const json empty = json::object();
  const json& mj = j.contains("value_maps") ? j["value_maps"] : empty;
  if (!mj.is_object()) throw ParseError(mf, 0, "expected an object of human variable: map");
  for (const auto& [name, unused] : mj.items()) {
    (void)unused;
    variable(target, name, at(mf, name));
  }
  std::vector<std::vector<std::size_t>> maps(target.size());
  for (std::size_t h = 0; h < target.size(); ++h) {
    const std::string where = at(mf, target[h].name);
    const auto it = mj.find(target[h].name);
    if (it == mj.end()) {
      // Absent map: a single variable carried over by label.
      if (blocks[h].size() != 1) throw ParseError(where, 0, "a block of several variables needs an explicit map");
      for (const auto& l : source[blocks[h][0]].domain) maps[h].push_back(value(target, h, l, where));
    } else if (it->is_object()) {
      if (blocks[h].size() != 1) throw ParseError(where, 0, "a block of several variables needs an array map");
      const std::size_t s = blocks[h][0];
      for (const auto& [from, unused] : it->items()) {
        (void)unused;
        value(source, s, from, at(where, from));
      }
      for (const auto& l : source[s].domain) {
        const auto e = it->find(l);
        if (e == it->end()) throw ParseError(at(where, l), 0, "value '" + l + "' has no image");
        maps[h].push_back(value(target, h, label(*e, at(where, l)), at(where, l)));
      }
    } else if (it->is_array()) {
      for (std::size_t k = 0; k < it->size(); ++k) maps[h].push_back(value(target, h, label((*it)[k], at(where, k)), at(where, k)));
    } else {
      throw ParseError(where, 0, "expected an object or array");
    }
  }
  try {
    return Translation(source, target, std::move(omega), std::move(maps));
  } catch (const Error& e) {
    throw ParseError(field, 0, e.what());
  }
}

json mixture_to_json(const MixtureModel& mix) {
  json comps = json::array();
  for (const auto& c : mix.components()) comps.push_back(model_to_json(c));
  return {{"selector", {{"name", mix.selector().name}, {"domain", mix.selector().domain}}},
          {"prior", mix.prior()},
          {"components", comps}};
}

MixtureModel mixture_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field, 0, "expected a mixture object");
  only_keys(j, {"selector", "prior", "components"}, field);
  const VariableSystem sel = system_from_json(json::array({member(j, "selector", field)}), at(field, "selector"));
  const auto prior = numbers(member(j, "prior", field), at(field, "prior"));
  std::vector<FactoredModel> comps;
  const std::string cf = at(field, "components");
  for (std::size_t s = 0; s < array(member(j, "components", field), cf).size(); ++s) {
    comps.push_back(model_from_json(j["components"][s], at(cf, s)));
  }
  try {
    return MixtureModel(sel[0], prior, std::move(comps));
  } catch (const Error& e) {
    throw ParseError(field, 0, e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json out = {{"version", kScenarioSchemaVersion}, {"name", s.name}, {"description", s.description}};
  if (!s.metadata.empty()) out["metadata"] = s.metadata;
  if (s.query) out["query"] = *s.query;
  out["equivariant"] = s.equivariant;
  if (s.mixture) {
    out["mixture"] = mixture_to_json(*s.mixture);
  } else {
    out["machine"] = model_to_json(s.machine);
  }
  out["human"] = model_to_json(s.human);
  out["translation"] = translation_to_json(s.translation);
  if (!s.region.empty()) {
    json r = json::array();
    for (const auto& a : s.region) r.push_back(action_to_json(a, s.machine.system()));
    out["region"] = r;
  }
  if (s.nir) out["nir"] = nir::rule_to_json(*s.nir);
  if (s.surrogate) {
    out["surrogate"] = {{"model", model_to_json(s.surrogate->model)},
                        {"to_surrogate", translation_to_json(s.surrogate->to_surrogate)},
                        {"to_human", translation_to_json(s.surrogate->to_human)}};
  }
  return out;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", 0, "a scenario must be a JSON object");
  only_keys(j,
            {"version", "name", "description", "metadata", "query", "equivariant", "machine", "human", "translation",
             "region", "mixture", "nir", "surrogate"},
            "");
  const json& version = member(j, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion) {
    throw ParseError("/version", 0, "unsupported schema version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }
  std::optional<MixtureModel> mixture;
  if (j.contains("mixture")) {
    if (j.contains("machine")) throw ParseError("/machine", 0, "a mixture scenario derives its machine from the mixture");
    mixture = mixture_from_json(j["mixture"], "/mixture");
  }
  FactoredModel machine = mixture ? flatten(*mixture) : model_from_json(member(j, "machine", ""), "/machine");
  FactoredModel human = model_from_json(member(j, "human", ""), "/human");
  Translation t = translation_from_json(member(j, "translation", ""), machine.system(), human.system(), "/translation");
  Scenario s{.name = text(member(j, "name", ""), "/name"),
             .description = j.contains("description") ? text(j["description"], "/description") : "",
             .machine = std::move(machine),
             .human = std::move(human),
             .translation = std::move(t),
             .mixture = std::move(mixture)};
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw ParseError("/metadata", 0, "expected an object");
    s.metadata = j["metadata"];
  }
  if (j.contains("query")) {
    s.query = text(j["query"], "/query");
    variable(s.human.system(), *s.query, "/query");
  }
  if (j.contains("equivariant")) {
    if (!j["equivariant"].is_boolean()) throw ParseError("/equivariant", 0, "expected true or false");
    s.equivariant = j["equivariant"].get<bool>();
  }
  if (j.contains("region")) {
    for (std::size_t k = 0; k < array(j["region"], "/region").size(); ++k) {
      const std::string where = at("/region", k);
      try {
        s.region.push_back(action_from_json(j["region"][k], s.machine.system(), where));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(where, 0, e.what());
      }
    }
  }
  if (j.contains("nir")) s.nir = nir::rule_from_json(j["nir"], "/nir");
  if (j.contains("surrogate")) {
    const json& sj = j["surrogate"];
    if (!sj.is_object()) throw ParseError("/surrogate", 0, "expected an object");
    only_keys(sj, {"model", "to_surrogate", "to_human"}, "/surrogate");
    FactoredModel m = model_from_json(member(sj, "model", "/surrogate"), "/surrogate/model");
    Translation os = translation_from_json(member(sj, "to_surrogate", "/surrogate"), s.machine.system(), m.system(),
                                           "/surrogate/to_surrogate");
    Translation sh = translation_from_json(member(sj, "to_human", "/surrogate"), m.system(), s.human.system(),
                                           "/surrogate/to_human");
    s.surrogate = SurrogateSpec{std::move(m), std::move(os), std::move(sh)};
  }
  return s;
}

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the failure.
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError("", line, e.what());
  }
  return scenario_from_json(j);
}

}  // namespace equivar
