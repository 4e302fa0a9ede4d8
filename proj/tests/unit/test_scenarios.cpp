#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "equivar/equivariance.hpp"
#include "equivar/inference.hpp"
#include "equivar/nir/checkpoint.hpp"
#include "equivar/scenario.hpp"

using namespace equivar;
using nlohmann::json;

namespace {

double prob(const Distribution& d, const VariableSystem& sys, std::string_view var, std::string_view value) {
  const std::size_t i = sys.index_of(var);
  const std::vector<std::size_t> subset{i};
  return marginal(d, subset)[sys.value_index(i, value)];
}

// Composite Simpson over [a, b] with n (even) panels.
double simpson(double a, double b, int n, auto f) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

std::string thermostat_text() { return scenario_to_json(builtin("thermostat_basic")).dump(2); }

}  // namespace

TEST(Builtins, AllValidateCleanly) {
  EXPECT_EQ(builtin_names().size(), 9u);
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin(name);
    EXPECT_EQ(s.name, name);
    const auto d = validate(s);
    EXPECT_TRUE(d.empty()) << name << ": " << (d.empty() ? "" : d.front().field + " " + d.front().message);
  }
  EXPECT_THROW(builtin("thermostat_deluxe"), UnknownScenario);
  EXPECT_THROW(load_scenario("builtin:nope"), UnknownScenario);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), UnknownScenario);
}

TEST(Builtins, RoundTripLosslessly) {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin(name);
    const json j = scenario_to_json(s);
    const Scenario back = parse_scenario(j.dump());
    EXPECT_EQ(scenario_to_json(back), j) << name;
    EXPECT_EQ(back.machine.system(), s.machine.system()) << name;
    EXPECT_EQ(back.machine.all_parents(), s.machine.all_parents()) << name;
    EXPECT_EQ(back.machine.cpds(), s.machine.cpds()) << name;
    EXPECT_EQ(back.human.cpds(), s.human.cpds()) << name;
    EXPECT_EQ(back.translation.value_maps(), s.translation.value_maps()) << name;
    EXPECT_EQ(back.region, s.region) << name;
  }
}

TEST(ThermostatBasic, ReproducesTheTwoTraces) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = builtin("thermostat_basic");
  const VariableSystem& ms = s.machine.system();
  const Distribution six = apply_action(s.machine, intervene_on(ms, "wheel", "6"));
  EXPECT_EQ(prob(six, ms, "display", "1"), 1.0);
  EXPECT_EQ(prob(six, ms, "comfort", "no"), 1.0);
  const Distribution four = apply_action(s.machine, intervene_on(ms, "wheel", "4"));
  EXPECT_EQ(prob(four, ms, "display", "2"), 1.0);
  EXPECT_EQ(prob(four, ms, "comfort", "yes"), 1.0);

  const VariableSystem& hs = s.human.system();
  for (const char* w : {"3", "4"}) {
    EXPECT_EQ(prob(apply_action(s.human, intervene_on(hs, "wheel", w)), hs, "heat", "med"), 1.0);
  }
  EXPECT_EQ(prob(apply_action(s.human, intervene_on(hs, "heat", "med")), hs, "comfort", "yes"), 1.0);

  const EquivarianceReport r = verify_brute(s.machine, s.human, s.translation, ActionFamily::Both, 1);
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.max_discrepancy, 0.0);
  EXPECT_EQ(r.failed, 0u);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(ThermostatBasic, DisplayIsMonotoneAndExtrapolationIsFlagged) {
  for (std::size_t w = 1; w < 8; ++w) EXPECT_GE(thermostat_display(w), thermostat_display(w + 1));
  const Scenario s = builtin("thermostat_basic");
  const auto rows = s.metadata.at("extrapolated_rows").at("display");
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(s.metadata.at("observed_rows").at("display"), json({"wheel=4", "wheel=6"}));
}

TEST(ThermostatScrambled, FailsVerification) {
  const Scenario s = builtin("thermostat_scrambled");
  const EquivarianceReport r = verify_brute(s.machine, s.human, s.translation, ActionFamily::Both, 1);
  EXPECT_FALSE(r.holds());
  EXPECT_NEAR(r.max_discrepancy, 1.0, 1e-12);
}

TEST(ThermostatKnobs, HundredKnobsIntoTemperature) {
  const Scenario s = builtin("thermostat_knobs");
  EXPECT_EQ(s.machine.size(), 101u);
  const std::size_t t = s.machine.system().index_of("temperature");
  EXPECT_EQ(s.machine.parents(t).size(), 100u);
  EXPECT_FALSE(s.machine.cpd(t).is_table());
  EXPECT_FALSE(s.machine.system().enumerable());
  EXPECT_EQ(cognitive_load(s.machine).max_load, 101u);
}

TEST(ThermostatMixture, OneActiveKnobPerMonth) {
  const Scenario s = builtin("thermostat_mixture");
  ASSERT_TRUE(s.mixture.has_value());
  EXPECT_EQ(s.mixture->selector().name, "month");
  EXPECT_EQ(s.mixture->component_count(), 12u);
  for (std::size_t m = 0; m < 12; ++m) {
    const FactoredModel& c = s.mixture->component(m);
    EXPECT_EQ(std::vector<std::size_t>(c.parents(12).begin(), c.parents(12).end()), std::vector<std::size_t>{m});
  }
  EXPECT_EQ(s.machine.system(), s.mixture->flat_system());
  EXPECT_LE(cognitive_load(*s.mixture).max_load, 3u);
}

TEST(ThermostatMixture, YearLongMixtureStaysLight) {
  const MixtureModel year = builtin_mixture(365);
  EXPECT_EQ(year.selector().name, "day");
  EXPECT_EQ(year.component_count(), 365u);
  EXPECT_EQ(cognitive_load(year, ActionFamily::Do).max_load, 3u);
}

TEST(Braking, RuleAndHumanModel) {
  const Scenario s = builtin("braking");
  ASSERT_TRUE(s.nir.has_value());
  EXPECT_EQ(s.nir->concept_names(), (std::vector<std::string>{"ambulance", "green_light"}));
  EXPECT_EQ(s.nir->task.weights.front(), 2.0);
  const VariableSystem& hs = s.human.system();
  // brake <=> ambulance or not green
  for (const char* a : {"0", "1"}) {
    for (const char* g : {"0", "1"}) {
      const CompoundAction act{intervene_on(hs, "ambulance", a), intervene_on(hs, "green_light", g)};
      const double p = prob(apply_action(s.human, act), hs, "brake", "1");
      EXPECT_EQ(p, (std::string(a) == "1" || std::string(g) == "0") ? 1.0 : 0.0) << a << g;
    }
  }
  EXPECT_EQ(nir::rule_to_json(*s.nir)["samples"], 4000);
}

TEST(GaussianUnit, BinsMatchNumericIntegration) {
  const auto edges = gaussian_bin_edges();
  for (double mu = 0; mu <= 4; ++mu) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      auto pdf = [&](double x) {
        return std::exp(-0.5 * (x - mu) * (x - mu) / (sigma * sigma)) / (sigma * std::sqrt(2 * M_PI));
      };
      const auto p = gaussian_bin_probabilities(mu, sigma);
      ASSERT_EQ(p.size(), 9u);
      const double lo = mu - 14 * sigma, hi = mu + 14 * sigma;
      for (std::size_t b = 0; b < 9; ++b) {
        const double a = b == 0 ? lo : edges[b - 1];
        const double e = b == 8 ? hi : edges[b];
        EXPECT_NEAR(p[b], simpson(a, e, 4000, pdf), 1e-10) << mu << " " << sigma << " bin " << b;
      }
      double total = 0;
      for (double v : p) total += v;
      EXPECT_NEAR(total, 1.0, 1e-14);
    }
  }
}

TEST(GaussianUnit, EquivariantOnDeclaredRegionOnly) {
  const Scenario s = builtin("gaussian_unit");
  EXPECT_EQ(s.machine.parameter_vars(), std::vector<std::size_t>{1});
  const EquivarianceReport region = verify_region(s.machine, s.human, s.translation, s.region);
  EXPECT_TRUE(region.holds());
  EXPECT_EQ(region.checks.size(), 25u);
  const Action high = intervene_on(s.machine.system(), "sigma", "2.0");
  EXPECT_EQ(verify_action(s.machine, s.human, s.translation, high).verdict, Verdict::Pass);
  const EquivarianceReport brute = verify_brute(s.machine, s.human, s.translation, ActionFamily::Both, 1);
  EXPECT_FALSE(brute.holds());
  for (const auto& c : brute.checks) {
    const bool observes_v2 = !c.action.empty() && c.action[0].target == 2 && c.action[0].kind == ActionKind::Observe;
    EXPECT_EQ(c.verdict == Verdict::Fail, observes_v2) << to_string(c.action, s.machine.system());
  }
}

TEST(Surrogate, CorruptedChainBreaksOnFirstLink) {
  const Scenario bad = builtin("surrogate_corrupted");
  ASSERT_TRUE(bad.surrogate.has_value());
  const SurrogateChainReport r = verify_surrogate_chain(bad.machine, bad.surrogate->model, bad.human,
                                                        bad.surrogate->to_surrogate, bad.surrogate->to_human);
  EXPECT_FALSE(r.original_to_surrogate.holds());
  EXPECT_TRUE(r.surrogate_to_human.holds());
  EXPECT_FALSE(r.composed.holds());

  const Scenario good = builtin("surrogate_faithful");
  EXPECT_TRUE(verify_surrogate_chain(good.machine, good.surrogate->model, good.human, good.surrogate->to_surrogate,
                                     good.surrogate->to_human)
                  .holds());
}

TEST(Parse, DanglingParentNamesTheField) {
  json j = json::parse(thermostat_text());
  j["machine"]["parents"]["display"] = {"whee1"};
  try {
    scenario_from_json(j);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "/machine/parents/display/0");
    EXPECT_NE(std::string(e.what()).find("whee1"), std::string::npos);
  }
}

TEST(Parse, SyntaxErrorCarriesLine) {
  std::string text = thermostat_text();
  const auto pos = text.find("\"human\"");
  text.insert(pos, "oops ");
  const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
  try {
    parse_scenario(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line);
  }
}

TEST(Parse, RejectsStructuralProblems) {
  const json base = json::parse(thermostat_text());
  auto field_of = [](const json& j) {
    try {
      scenario_from_json(j);
    } catch (const ParseError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  json j = base;
  j["version"] = 2;
  EXPECT_EQ(field_of(j), "/version");
  j = base;
  j["colour"] = "red";
  EXPECT_EQ(field_of(j), "/colour");
  j = base;
  j["machine"]["cpds"].erase("comfort");
  EXPECT_EQ(field_of(j), "/machine/cpds/comfort");
  j = base;
  j["translation"]["value_maps"]["heat"]["3"] = "tepid";
  EXPECT_EQ(field_of(j), "/translation/value_maps/heat/3");
  j = base;
  j["translation"]["omega"]["display"] = "wheel";  // heat left without a preimage
  EXPECT_EQ(field_of(j), "/translation/omega");
  j = base;
  j["machine"]["parents"]["wheel"] = {"comfort"};  // cycle
  EXPECT_EQ(field_of(j), "/machine");
  j = base;
  j["query"] = "mood";
  EXPECT_EQ(field_of(j), "/query");
  j = base;
  j["region"] = {{{"do", {{"wheel", "9"}}}}};
  EXPECT_EQ(field_of(j), "/region/0");
}

TEST(Parse, AcceptsNumericLabelsAndDefaultMaps) {
  const json j = json::parse(R"({
    "version": 1, "name": "tiny",
    "machine": {"variables": [{"name": "x", "domain": [0, 1]}], "cpds": {"x": {"table": [0.25, 0.75]}}},
    "human": {"variables": [{"name": "x", "domain": ["0", "1"]}], "cpds": {"x": {"table": [[0.25, 0.75]]}}},
    "translation": {"omega": {"x": "x"}},
    "equivariant": true
  })");
  const Scenario s = scenario_from_json(j);
  EXPECT_EQ(s.machine.system()[0].domain, (std::vector<std::string>{"0", "1"}));
  EXPECT_TRUE(validate(s).empty());
}

TEST(Validate, SmokeCheckCatchesFalseClaims) {
  Scenario s = builtin("thermostat_scrambled");
  s.equivariant = true;
  const auto d = validate(s);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "/equivariant");

  const std::string path = testing::TempDir() + "scrambled_claim.json";
  std::ofstream(path) << scenario_to_json(s).dump();
  EXPECT_THROW(load_scenario(path), ValidationError);
  std::remove(path.c_str());
}

TEST(Summary, ListsVariables) {
  const json j = scenario_summary(builtin("thermostat_basic"));
  EXPECT_EQ(j["query"], "comfort");
  EXPECT_EQ(j["machine_variables"][0]["name"], "wheel");
  EXPECT_EQ(j["human_variables"][1]["domain"], json({"low", "med", "high"}));
}
