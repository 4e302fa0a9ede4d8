#include <gtest/gtest.h>

#include <fstream>

#include "equivar/equivariance.hpp"
#include "equivar/inference.hpp"
#include "equivar/report_json.hpp"
#include "equivar/turing.hpp"

using namespace equivar;
using namespace equivar::turing;
using nlohmann::json;

namespace {

std::shared_ptr<const Scenario> shared(std::string_view name) { return std::make_shared<const Scenario>(builtin(name)); }

CompoundAction set(const Scenario& s, std::string_view var, std::string_view value) {
  return {intervene_on(s.machine.system(), var, value)};
}

std::size_t label(const Scenario& s, std::string_view var, std::string_view value) {
  const auto& hs = s.human.system();
  return hs.value_index(hs.index_of(var), value);
}

json oracle_script(std::size_t rounds) {
  return {{"seed", 1}, {"forecaster", "oracle"},
          {"random_actions", {{"count", rounds}, {"variables", {"wheel"}}, {"kind", "do"}}}};
}

}  // namespace

TEST(Session, OpensEmptyAndChecksTheQuery) {
  const auto sc = shared("thermostat_basic");
  const Session s("s1", sc, "comfort", 1);
  EXPECT_TRUE(s.rounds().empty());
  EXPECT_EQ(s.status(), Status::Open);
  EXPECT_THROW(Session("s2", sc, "mood", 1), UnknownVariable);
}

TEST(Session, ScoresTheTwoTraces) {
  const auto sc = shared("thermostat_basic");
  Session s("s", sc, "comfort", 1);
  RoundResult r = s.play(set(*sc, "wheel", "6"), Forecast::value(label(*sc, "comfort", "no")));
  EXPECT_EQ(r.truth, label(*sc, "comfort", "no"));
  EXPECT_EQ(r.score, 1.0);
  r = s.play(set(*sc, "wheel", "4"), Forecast::value(label(*sc, "comfort", "no")));
  EXPECT_EQ(r.truth, label(*sc, "comfort", "yes"));
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.running_mean, 0.5);
  r = s.play(set(*sc, "wheel", "4"), Forecast::spread({0.0, 1.0}));
  EXPECT_EQ(r.score, 1.0);
}

TEST(Score, BrierIsProperAndBounded) {
  EXPECT_EQ(score(Forecast::spread({0.5, 0.5}), 0, 2), 0.75);
  EXPECT_EQ(score(Forecast::spread({1.0, 0.0}), 1, 2), 0.0);
  EXPECT_EQ(score(Forecast::spread({0.2, 0.3, 0.5}), 2, 3), 1.0 - (0.04 + 0.09 + 0.25) / 2.0);
  EXPECT_THROW(score(Forecast::spread({0.5, 0.6}), 0, 2), InvalidArgument);
  EXPECT_THROW(score(Forecast::spread({1.0}), 0, 2), InvalidArgument);
  EXPECT_THROW(score(Forecast::spread({-0.5, 1.5}), 0, 2), InvalidArgument);
  EXPECT_THROW(score(Forecast::value(2), 0, 2), InvalidArgument);
}

TEST(Session, ReplaysDeterministically) {
  const auto sc = shared("gaussian_unit");
  auto run = [&](std::uint64_t seed) {
    Session s("g", sc, "V2", seed);
    std::vector<std::size_t> truths;
    for (int r = 0; r < 40; ++r) truths.push_back(s.play(set(*sc, "V1", "2"), Forecast::value(1)).truth);
    return truths;
  };
  const auto a = run(7);
  EXPECT_EQ(a, run(7));
  EXPECT_NE(a, run(8));
  EXPECT_GT(std::count(a.begin(), a.end(), 1), 0);
  EXPECT_LT(std::count(a.begin(), a.end(), 1), 40);
}

TEST(Session, ClosedSessionsRejectRounds) {
  const auto sc = shared("thermostat_basic");
  Session s("s", sc, "comfort", 1);
  s.close();
  EXPECT_THROW(s.play(set(*sc, "wheel", "6"), Forecast::value(0)), SessionClosed);
  EXPECT_TRUE(s.rounds().empty());
}

TEST(Session, RejectsActionsTheHumanCannotRead) {
  // Two machine switches read by the human as one "both on" light.
  VariableSystem ms(std::vector<Variable>{{"a", {"off", "on"}}, {"b", {"off", "on"}}});
  VariableSystem hs(std::vector<Variable>{{"light", {"off", "on"}}});
  auto sc = std::make_shared<Scenario>(Scenario{
      .name = "switches",
      .description = "",
      .machine = FactoredModel(ms, {{}, {}}, {Cpd::uniform(2), Cpd::uniform(2)}),
      .human = FactoredModel(hs, {{}}, {Cpd::table({0.75, 0.25})}),
      .translation = Translation(ms, hs, {0, 0}, {{0, 0, 0, 1}})});
  Session s("s", sc, "light", 1);
  EXPECT_THROW(s.play({Action{ActionKind::Do, 0, 1}}, Forecast::value(1)), AmbiguousTranslation);
  const RoundResult r = s.play({Action{ActionKind::Do, 0, 1}, Action{ActionKind::Do, 1, 1}}, Forecast::value(1));
  EXPECT_EQ(r.truth, 1u);
  EXPECT_EQ(s.rounds().size(), 1u);
}

TEST(Verdict, NeedsEnoughRoundsAndScore) {
  const auto sc = shared("thermostat_basic");
  Session s("s", sc, "comfort", 1);
  for (int r = 0; r < 5; ++r) s.play(set(*sc, "wheel", "6"), Forecast::value(0));
  EXPECT_FALSE(s.verdict().interpretable);
  EXPECT_EQ(s.verdict().rounds_counted, 5u);
  for (int r = 0; r < 5; ++r) s.play(set(*sc, "wheel", "6"), Forecast::value(0));
  turing::Verdict v = s.verdict();
  EXPECT_TRUE(v.interpretable);
  EXPECT_EQ(v.mean_score, 1.0);
  s.play(set(*sc, "wheel", "6"), Forecast::value(1));
  v = s.verdict();
  EXPECT_NEAR(v.mean_score, 10.0 / 11.0, 1e-15);
  EXPECT_TRUE(v.interpretable);
  EXPECT_FALSE(s.verdict(0.95).interpretable);
  s.play(set(*sc, "wheel", "6"), Forecast::value(1));
  EXPECT_FALSE(s.verdict().interpretable);
  EXPECT_FALSE(s.verdict(0.5, 13).interpretable);
}

TEST(Oracle, SeparatesFaithfulFromScrambled) {
  const auto good = shared("thermostat_basic");
  const auto bad = shared("thermostat_scrambled");
  const Session a = run_script(good, "comfort", script_from_json(oracle_script(20), *good, 2));
  const Session b = run_script(bad, "comfort", script_from_json(oracle_script(20), *bad, 2));
  ASSERT_EQ(a.rounds().size(), 20u);
  EXPECT_EQ(a.verdict().mean_score, 1.0);
  EXPECT_TRUE(a.verdict().interpretable);
  EXPECT_LT(b.verdict().mean_score, 0.5);
  EXPECT_FALSE(b.verdict().interpretable);
  for (std::size_t r = 0; r < 20; ++r) EXPECT_EQ(a.rounds()[r].action, b.rounds()[r].action);
}

TEST(Oracle, ScoresOneWhereverBruteEquivarianceHolds) {
  // Zero-discrepancy scenarios; every action whose human prediction of the
  // query is deterministic must be forecast correctly.
  for (const char* name : {"thermostat_basic", "surrogate_faithful", "braking"}) {
    const auto sc = shared(name);
    ASSERT_TRUE(verify_brute(sc->machine, sc->human, sc->translation).holds()) << name;
    const std::size_t q = sc->human.system().index_of(*sc->query);
    Session s(name, sc, *sc->query, 3);
    for_each_action(sc->machine.system(), ActionFamily::Both, 2, [&](const CompoundAction& a) {
      std::vector<double> p;
      try {
        p = human_prediction(*sc, q, a);
        apply_action(sc->machine, a);
      } catch (const Error&) {
        return;  // unreadable or impossible
      }
      if (*std::max_element(p.begin(), p.end()) != 1.0) return;
      s.play(a, oracle_forecast(*sc, q, a));
    });
    EXPECT_GT(s.rounds().size(), 10u) << name;
    EXPECT_EQ(s.verdict().mean_score, 1.0) << name;
  }
}

TEST(Oracle, DistributionalForecastsOnStochasticScenario) {
  const auto sc = shared("gaussian_unit");
  const json script = {{"seed", 5}, {"forecaster", "oracle"}, {"distributional", true},
                       {"random_actions", {{"count", 50}, {"variables", {"V1", "sigma"}}, {"kind", "do"}}}};
  const Session s = run_script(sc, "V2", script_from_json(script, *sc, 2));
  for (const Round& r : s.rounds()) {
    EXPECT_GE(r.score, 0.0);
    EXPECT_LE(r.score, 1.0);
    EXPECT_FALSE(r.forecast.point.has_value());
  }
  EXPECT_GT(s.verdict().mean_score, 0.3);
}

TEST(Session, SamplesPastTheEnumerationCap) {
  const auto sc = shared("thermostat_knobs");
  auto truths = [&] {
    Session s("k", sc, "temperature", 11);
    std::vector<std::size_t> out;
    for (int r = 0; r < 10; ++r) out.push_back(s.play(set(*sc, "knob7", "on"), Forecast::value(0)).truth);
    return out;
  };
  EXPECT_EQ(truths(), truths());
}

TEST(Transcript, ExportsAndReplaysByteIdentically) {
  const auto sc = shared("thermostat_basic");
  Session s("t1", sc, "comfort", 4);
  s.play(set(*sc, "wheel", "6"), Forecast::value(0));
  s.play(set(*sc, "wheel", "4"), Forecast::value(0));
  s.play({observe(sc->machine.system(), "comfort", "yes")}, Forecast::spread({0.25, 0.75}));
  s.close();
  const json t = transcript_to_json(s);
  EXPECT_EQ(t["rounds"][0]["action"], json({{"do", {{"wheel", "6"}}}}));
  EXPECT_EQ(t["rounds"][1]["truth"], "yes");
  EXPECT_EQ(t["rounds"][2]["forecast"], json({{"no", 0.25}, {"yes", 0.75}}));
  EXPECT_EQ(t["status"], "closed");
  EXPECT_EQ(t["verdict"]["rounds_counted"], 3);
  const Session back = replay(json::parse(t.dump()), sc);
  EXPECT_EQ(dump(transcript_to_json(back)), dump(t));

  json tampered = t;
  tampered["rounds"][1]["truth"] = "no";
  EXPECT_THROW(replay(tampered, sc), InvalidArgument);
  EXPECT_THROW(replay(t, shared("thermostat_scrambled")), InvalidArgument);
}

TEST(Script, ParsesExplicitRoundsAndRejectsBadOnes) {
  const auto sc = shared("thermostat_basic");
  const json j = json::parse(R"({"seed": 2, "rounds": [
      {"action": {"do": {"wheel": 6}}, "forecast": "no"},
      {"action": {"do": {"wheel": "4"}}, "forecast": {"yes": 1}}]})");
  const Script s = script_from_json(j, *sc, 2);
  EXPECT_FALSE(s.oracle);
  ASSERT_EQ(s.actions.size(), 2u);
  const Session run = run_script(sc, "comfort", s);
  EXPECT_EQ(run.verdict().mean_score, 1.0);

  auto field_of = [&](const char* text) {
    try {
      script_from_json(json::parse(text), *sc, 2);
    } catch (const ParseError& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field_of(R"({"rounds": [{"action": {"do": {"wheel": "6"}}}]})"), "/rounds/0/forecast");
  EXPECT_EQ(field_of(R"({"rounds": [{"action": {"do": {"wheel": "6"}}, "forecast": "maybe"}]})"), "/rounds/0/forecast");
  EXPECT_EQ(field_of(R"({"rounds": [{"action": {"do": {"wheel": "9"}}, "forecast": "no"}]})"), "/rounds/0/action");
  EXPECT_EQ(field_of(R"({"speed": 3, "rounds": []})"), "/speed");
  EXPECT_EQ(field_of(R"({"forecaster": "oracle", "random_actions": {"variables": ["dial"]}})"),
            "/random_actions/variables");
  EXPECT_EQ(field_of(R"({"random_actions": {"count": 3}})"), "/forecaster");
}

TEST(Script, ShippedOracleScript) {
  std::ifstream in(std::string(EQUIVAR_SOURCE_DIR) + "/configs/oracle.json");
  ASSERT_TRUE(in);
  const auto sc = shared("thermostat_basic");
  const Session s = run_script(sc, "comfort", script_from_json(json::parse(in), *sc, 2));
  EXPECT_EQ(s.rounds().size(), 20u);
  EXPECT_TRUE(s.verdict().interpretable);
}
