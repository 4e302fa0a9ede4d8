#include "equivar/random.hpp"
#include "equivar/report_json.hpp"
#include "equivar/turing.hpp"

namespace equivar::turing {

using nlohmann::json;

namespace {

std::string label_of(const json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ParseError(field, 0, "expected a value label");
}

std::size_t value_of(const Variable& v, const std::string& label, const std::string& field) {
  for (std::size_t k = 0; k < v.domain.size(); ++k) {
    if (v.domain[k] == label) return k;
  }
  throw ParseError(field, 0, "'" + label + "' is not a value of '" + v.name + "'");
}

template <typename T>
T get(const json& j, std::string_view key, const std::string& field, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(field + "/" + std::string(key), 0, e.what());
  }
}

}  // namespace

json forecast_to_json(const Forecast& f, const Variable& q) {
  if (f.point) return q.domain.at(*f.point);
  json out = json::object();
  for (std::size_t v = 0; v < f.distribution.size() && v < q.domain.size(); ++v) out[q.domain[v]] = f.distribution[v];
  return out;
}

Forecast forecast_from_json(const json& j, const Variable& q, const std::string& field) {
  if (j.is_object()) {
    std::vector<double> p(q.domain.size(), 0.0);
    for (const auto& [label, prob] : j.items()) {
      if (!prob.is_number()) throw ParseError(field + "/" + label, 0, "expected a probability");
      p[value_of(q, label, field + "/" + label)] = prob.get<double>();
    }
    return Forecast::spread(std::move(p));
  }
  return Forecast::value(value_of(q, label_of(j, field), field));
}

json to_json(const Verdict& v) {
  return {{"rounds_counted", v.rounds_counted},
          {"mean_score", v.mean_score},
          {"threshold", v.threshold},
          {"min_rounds", v.min_rounds},
          {"interpretable", v.interpretable}};
}

json round_to_json(const Session& s, std::size_t r) {
  const Round& round = s.rounds().at(r);
  const Variable& q = s.scenario().human.system()[s.query_index()];
  double sum = 0.0;
  for (std::size_t k = 0; k <= r; ++k) sum += s.rounds()[k].score;
  return {{"round", r + 1},
          {"action", action_to_json(round.action, s.scenario().machine.system())},
          {"label", to_string(round.action, s.scenario().machine.system())},
          {"forecast", forecast_to_json(round.forecast, q)},
          {"truth", q.domain[round.truth]},
          {"score", round.score},
          {"running_mean", sum / static_cast<double>(r + 1)}};
}

json round_result_to_json(const Session& s, const RoundResult& r) {
  return {{"round", s.rounds().size()},
          {"truth", s.scenario().human.system()[s.query_index()].domain[r.truth]},
          {"score", r.score},
          {"running_mean", r.running_mean}};
}

json transcript_to_json(const Session& s) {
  json rounds = json::array();
  for (std::size_t r = 0; r < s.rounds().size(); ++r) rounds.push_back(round_to_json(s, r));
  return {{"id", s.id()},
          {"scenario", s.scenario().name},
          {"query", s.query()},
          {"query_domain", s.scenario().human.system()[s.query_index()].domain},
          {"seed", s.seed()},
          {"status", to_string(s.status())},
          {"rounds", rounds},
          {"verdict", to_json(s.verdict())}};
}

Session replay(const json& t, std::shared_ptr<const Scenario> scenario) {
  if (!t.is_object()) throw ParseError("", 0, "a transcript must be an object");
  if (get<std::string>(t, "scenario", "", "") != scenario->name) {
    throw InvalidArgument("transcript was recorded on scenario '" + get<std::string>(t, "scenario", "", "") + "'");
  }
  Session s(get<std::string>(t, "id", "", "replay"), std::move(scenario), get<std::string>(t, "query", "", ""),
            get<std::uint64_t>(t, "seed", "", 0));
  const Variable& q = s.scenario().human.system()[s.query_index()];
  const json rounds = get<json>(t, "rounds", "", json::array());
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const std::string field = "/rounds/" + std::to_string(r);
    if (!rounds[r].is_object() || !rounds[r].contains("action") || !rounds[r].contains("forecast")) {
      throw ParseError(field, 0, "a round needs an action and a forecast");
    }
    const CompoundAction a = action_from_json(rounds[r]["action"], s.scenario().machine.system(), field + "/action");
    const RoundResult res = s.play(a, forecast_from_json(rounds[r]["forecast"], q, field + "/forecast"));
    if (rounds[r].contains("truth") && label_of(rounds[r]["truth"], field + "/truth") != q.domain[res.truth]) {
      throw InvalidArgument("round " + std::to_string(r + 1) + " truth does not reproduce");
    }
    if (rounds[r].contains("score") && rounds[r]["score"] != res.score) {
      throw InvalidArgument("round " + std::to_string(r + 1) + " score does not reproduce");
    }
  }
  if (get<std::string>(t, "status", "", "open") == "closed") s.close();
  return s;
}

Script script_from_json(const json& j, const Scenario& sc, std::size_t query) {
  if (!j.is_object()) throw ParseError("", 0, "a script must be an object");
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    static const std::vector<std::string> known{"seed",       "forecaster", "distributional", "threshold",
                                                "min_rounds", "rounds",     "random_actions"};
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError("/" + key, 0, "unknown field");
  }
  Script s;
  s.seed = get<std::uint64_t>(j, "seed", "", 1);
  const std::string forecaster = get<std::string>(j, "forecaster", "", "script");
  if (forecaster != "oracle" && forecaster != "script") {
    throw ParseError("/forecaster", 0, "expected \"oracle\" or \"script\"");
  }
  s.oracle = forecaster == "oracle";
  s.distributional = get<bool>(j, "distributional", "", false);
  s.threshold = get<double>(j, "threshold", "", kDefaultThreshold);
  s.min_rounds = get<std::size_t>(j, "min_rounds", "", kDefaultMinRounds);
  const VariableSystem& ms = sc.machine.system();
  const Variable& q = sc.human.system()[query];
  if (j.contains("rounds") == j.contains("random_actions")) {
    throw ParseError("", 0, "a script needs exactly one of \"rounds\" and \"random_actions\"");
  }
  if (j.contains("rounds")) {
    if (!j["rounds"].is_array()) throw ParseError("/rounds", 0, "expected an array");
    for (std::size_t r = 0; r < j["rounds"].size(); ++r) {
      const std::string field = "/rounds/" + std::to_string(r);
      const json& round = j["rounds"][r];
      if (!round.is_object() || !round.contains("action")) throw ParseError(field, 0, "a round needs an action");
      try {
        s.actions.push_back(action_from_json(round["action"], ms, field + "/action"));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(field + "/action", 0, e.what());
      }
      if (round.contains("forecast")) {
        s.forecasts.push_back(forecast_from_json(round["forecast"], q, field + "/forecast"));
      } else if (s.oracle) {
        s.forecasts.emplace_back();
      } else {
        throw ParseError(field + "/forecast", 0, "missing forecast (or use \"forecaster\": \"oracle\")");
      }
    }
    return s;
  }
  const json& ra = j["random_actions"];
  if (!ra.is_object()) throw ParseError("/random_actions", 0, "expected an object");
  const std::size_t count = get<std::size_t>(ra, "count", "/random_actions", 20);
  std::vector<std::size_t> vars;
  if (ra.contains("variables")) {
    for (const auto& v : get<std::vector<std::string>>(ra, "variables", "/random_actions", {})) {
      const auto i = ms.find(v);
      if (!i) throw ParseError("/random_actions/variables", 0, "unknown machine variable '" + v + "'");
      vars.push_back(*i);
    }
  } else {
    for (std::size_t i = 0; i < ms.size(); ++i) vars.push_back(i);
  }
  if (vars.empty()) throw ParseError("/random_actions/variables", 0, "no variables to act on");
  ActionFamily family;
  try {
    family = parse_action_family(get<std::string>(ra, "kind", "/random_actions", "do"));
  } catch (const Error& e) {
    throw ParseError("/random_actions/kind", 0, e.what());
  }
  if (!s.oracle) throw ParseError("/forecaster", 0, "random actions need the oracle forecaster");
  // Action draws use their own stream so they never collide with truth draws.
  constexpr std::uint64_t kActionStream = 0xac7;
  for (std::size_t r = 0; r < count; ++r) {
    Rng rng{s.seed, kActionStream, r};
    const std::size_t i = vars[rng.below(vars.size())];
    const std::size_t v = rng.below(ms.cardinality(i));
    ActionKind kind = family == ActionFamily::Observe ? ActionKind::Observe : ActionKind::Do;
    if (family == ActionFamily::Both) kind = rng.below(2) == 0 ? ActionKind::Observe : ActionKind::Do;
    s.actions.push_back({Action{kind, i, v}});
    s.forecasts.emplace_back();
  }
  return s;
}

}  // namespace equivar::turing
