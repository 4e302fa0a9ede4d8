#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "equivar/nir/checkpoint.hpp"
#include "equivar/report_json.hpp"
#include "equivar/service.hpp"
#include "equivar/turing.hpp"

using namespace equivar;
using namespace equivar::service;
using nlohmann::json;

namespace {

struct FakeClock {
  std::shared_ptr<std::atomic<long>> seconds = std::make_shared<std::atomic<long>>(0);
  Clock clock() const {
    auto s = seconds;
    return [s] { return std::chrono::steady_clock::time_point(std::chrono::seconds(s->load())); };
  }
  void advance(long by) const { *seconds += by; }
};

json body_of(const Response& r) { return json::parse(r.body); }

Response post(Service& s, std::string_view target, const json& body) { return s.handle("POST", target, body.dump()); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("equivar_test_" + std::to_string(::getpid()) + "_" + name);
}

json wheel(int v) { return {{"do", {{"wheel", std::to_string(v)}}}}; }

std::string open_session(Service& s, const std::string& scenario, std::uint64_t seed, const std::string& query = "") {
  json body{{"scenario", scenario}, {"seed", seed}};
  if (!query.empty()) body["query"] = query;
  const Response r = post(s, "/api/sessions", body);
  EXPECT_EQ(r.status, 201) << r.body;
  return body_of(r)["session_id"].get<std::string>();
}

std::shared_ptr<const Scenario> shared(std::string_view name) { return std::make_shared<const Scenario>(builtin(name)); }

}  // namespace

TEST(Scenarios, ListMatchesTheRegistry) {
  Service s;
  const Response r = s.handle("GET", "/api/scenarios", "");
  ASSERT_EQ(r.status, 200);
  json expected = json::array();
  for (const auto& name : builtin_names()) expected.push_back(scenario_summary(builtin(name)));
  EXPECT_EQ(body_of(r)["scenarios"], expected);
}

TEST(Scenarios, DetailCarriesTheDefinition) {
  Service s;
  const Response r = s.handle("GET", "/api/scenarios/thermostat_basic", "");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body_of(r)["definition"], scenario_to_json(builtin("thermostat_basic")));
  EXPECT_EQ(s.handle("GET", "/api/scenarios/nope", "").status, 404);
}

TEST(Verify, BodiesAreTheLibraryReport) {
  Service s;
  for (const std::string name : {"thermostat_basic", "thermostat_scrambled"}) {
    const Scenario sc = builtin(name);
    const Response r = post(s, "/api/verify", {{"scenario", name}, {"max_compound", 2}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.body, dump(to_json(verify_brute(sc.machine, sc.human, sc.translation, ActionFamily::Both, 2))));
  }
  const Scenario basic = builtin("thermostat_basic");
  Response r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "markov"}, {"family", "do"}});
  EXPECT_EQ(r.body, dump(to_json(verify_markov_local(basic.machine, basic.human, basic.translation, ActionFamily::Do))));
  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "ci"}});
  EXPECT_EQ(r.body, dump(to_json(verify_ci_preservation(basic.machine, basic.human, basic.translation))));

  const Scenario sur = builtin("surrogate_corrupted");
  r = post(s, "/api/verify", {{"scenario", "surrogate_corrupted"}, {"mode", "surrogate"}});
  EXPECT_EQ(r.body, dump(to_json(verify_surrogate_chain(sur.machine, sur.surrogate->model, sur.human,
                                                        sur.surrogate->to_surrogate, sur.surrogate->to_human))));
  EXPECT_FALSE(body_of(r)["holds"].get<bool>());
}

TEST(Verify, RegionDefaultsToTheScenarios) {
  Service s;
  const Scenario g = builtin("gaussian_unit");
  Response r = post(s, "/api/verify", {{"scenario", "gaussian_unit"}, {"mode", "region"}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.body, dump(to_json(verify_region(g.machine, g.human, g.translation, g.region))));

  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "region"}, {"region", {wheel(3), wheel(6)}}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(body_of(r)["actions"].size(), 2u);

  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "region"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["field"], "/region");
}

TEST(Verify, PastTheCapGivesAnEstimate) {
  Service s;
  const Response r = post(s, "/api/verify", {{"scenario", "thermostat_knobs"}});
  ASSERT_EQ(r.status, 200) << r.body;
  const json j = body_of(r);
  EXPECT_TRUE(j["estimated"].get<bool>());
  EXPECT_TRUE(j["holds"].is_null());
  EXPECT_EQ(j["cost"].get<double>(),
            estimate_brute_cost(builtin("thermostat_knobs").machine.system(), ActionFamily::Both, 1));
  // The same bytes as the shared entry point used by the CLI.
  VerifyRequest req;
  req.scenario = "thermostat_knobs";
  EXPECT_EQ(r.body, dump(execute_verify(req)));
}

TEST(Verify, RejectsBadRequests) {
  Service s;
  Response r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "psychic"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["field"], "/mode");
  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"colour", "red"}});
  EXPECT_EQ(body_of(r)["field"], "/colour");
  r = post(s, "/api/verify", {{"scenario", "nowhere"}});
  EXPECT_EQ(r.status, 404);
  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"max_compound", 0}});
  EXPECT_EQ(r.status, 400);
  r = post(s, "/api/verify", {{"scenario", "thermostat_basic"}, {"mode", "surrogate"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(s.handle("GET", "/api/verify", "").status, 405);
}

TEST(Verify, SlowRunsAnswerWithAPollUrl) {
  ApiConfig config;
  config.async_after = std::chrono::milliseconds(0);
  Service s(config);
  const json request{{"scenario", "thermostat_mixture"}, {"max_compound", 2}, {"family", "do"}};
  Response r = post(s, "/api/verify", request);
  ASSERT_EQ(r.status, 202) << r.body;
  const json ticket = body_of(r);
  EXPECT_EQ(ticket["status"], "running");
  const std::string poll = ticket["poll"].get<std::string>();
  EXPECT_EQ(poll, "/api/jobs/" + ticket["job_id"].get<std::string>());
  for (;;) {
    r = s.handle("GET", poll, "");
    if (r.status != 202) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, dump(execute_verify(verify_request_from_json(request))));
  EXPECT_EQ(s.handle("GET", "/api/jobs/j999", "").status, 404);
}

TEST(Sessions, RoundsMatchADirectSession) {
  Service s;
  const std::string id = open_session(s, "thermostat_basic", 7);
  EXPECT_EQ(id, "s1");
  turing::Session direct(id, shared("thermostat_basic"), "comfort", 7);
  const auto& ms = direct.scenario().machine.system();
  const auto& q = direct.scenario().human.system()[direct.query_index()];
  const std::vector<std::pair<json, json>> plays{
      {wheel(3), "yes"}, {wheel(6), "no"}, {{{"observe", {{"display", "2"}}}}, "yes"},
      {wheel(1), {{"no", 0.7}, {"yes", 0.3}}}, {{{"do", {{"wheel", "4"}}}, {"observe", {{"comfort", "yes"}}}}, "yes"}};
  for (const auto& [action, forecast] : plays) {
    const Response r = post(s, "/api/sessions/" + id + "/round", {{"action", action}, {"forecast", forecast}});
    ASSERT_EQ(r.status, 200) << r.body;
    const turing::RoundResult expected =
        direct.play(action_from_json(action, ms), turing::forecast_from_json(forecast, q));
    EXPECT_EQ(body_of(r), turing::round_result_to_json(direct, expected));
  }
  EXPECT_EQ(body_of(s.handle("GET", "/api/sessions/" + id, "")), turing::transcript_to_json(direct));
  const Response v = s.handle("GET", "/api/sessions/" + id + "/verdict?threshold=0.5&min_rounds=3", "");
  EXPECT_EQ(body_of(v), turing::to_json(direct.verdict(0.5, 3)));
  const Response closed = post(s, "/api/sessions/" + id + "/close", json::object());
  ASSERT_EQ(closed.status, 200);
  direct.close();
  EXPECT_EQ(body_of(closed), turing::transcript_to_json(direct));
}

TEST(Sessions, DefaultQueryComesFromTheScenario) {
  Service s;
  const Response r = post(s, "/api/sessions", {{"scenario", "gaussian_unit"}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(body_of(r)["query"], builtin("gaussian_unit").query.value_or(""));
  EXPECT_EQ(body_of(r)["seed"], 1);
}

TEST(Sessions, ParallelSessionsMatchSequentialOnes) {
  Service s;
  constexpr int kSessions = 50;
  constexpr int kRounds = 8;
  std::vector<std::string> ids(kSessions);
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};
  for (int k = 0; k < kSessions; ++k) {
    threads.emplace_back([&, k] {
      const Response r = post(s, "/api/sessions", {{"scenario", "thermostat_basic"}, {"seed", 100 + k}});
      if (r.status != 201) {
        ++failures;
        return;
      }
      ids[k] = body_of(r)["session_id"].get<std::string>();
      for (int round = 0; round < kRounds; ++round) {
        const Response rr = post(s, "/api/sessions/" + ids[k] + "/round",
                                 {{"action", wheel(1 + (k + round) % 8)}, {"forecast", {{"no", 0.5}, {"yes", 0.5}}}});
        if (rr.status != 200) ++failures;
      }
    });
  }
  for (auto& t : threads) t.join();
  ASSERT_EQ(failures.load(), 0);
  EXPECT_EQ(s.session_count(), static_cast<std::size_t>(kSessions));
  const auto sc = shared("thermostat_basic");
  for (int k = 0; k < kSessions; ++k) {
    turing::Session direct(ids[k], sc, "comfort", 100 + k);
    for (int round = 0; round < kRounds; ++round) {
      direct.play(action_from_json(wheel(1 + (k + round) % 8), sc->machine.system()),
                  turing::Forecast::spread({0.5, 0.5}));
    }
    EXPECT_EQ(body_of(s.handle("GET", "/api/sessions/" + ids[k], "")), turing::transcript_to_json(direct));
  }
}

TEST(Sessions, ErrorStatuses) {
  Service s;
  const std::string id = open_session(s, "thermostat_basic", 1);
  const std::string round = "/api/sessions/" + id + "/round";

  Response r = s.handle("POST", round, "{\n  \"action\": {\n  \"do\": ,\n}");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["line"], 3);
  r = post(s, round, {{"action", wheel(3)}, {"forecast", "maybe"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["field"], "/forecast");
  r = post(s, round, {{"action", {{"do", {{"wheel", "9"}}}}}, {"forecast", "yes"}});
  EXPECT_EQ(r.status, 400);
  r = post(s, round, {{"action", json::object()}, {"forecast", "yes"}});
  EXPECT_EQ(r.status, 400);
  r = post(s, round, {{"action", wheel(3)}, {"forecast", {{"no", 0.7}, {"yes", 0.7}}}});
  EXPECT_EQ(r.status, 400);
  r = post(s, round, {{"action", wheel(3)}});
  EXPECT_EQ(r.status, 400);

  EXPECT_EQ(post(s, "/api/sessions/s99/round", {{"action", wheel(3)}, {"forecast", "yes"}}).status, 404);
  EXPECT_EQ(s.handle("GET", "/api/sessions/s99", "").status, 404);
  EXPECT_EQ(post(s, "/api/sessions", {{"scenario", "nowhere"}}).status, 404);
  EXPECT_EQ(post(s, "/api/sessions", {{"scenario", "thermostat_basic"}, {"query", "mood"}}).status, 400);
  EXPECT_EQ(s.handle("DELETE", "/api/sessions/" + id, "").status, 405);
  EXPECT_EQ(s.handle("GET", round, "").status, 405);
  EXPECT_EQ(s.handle("GET", "/api/sessions/" + id + "/dance", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/api/nothing", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/api/sessions/" + id + "/verdict?threshold=high", "").status, 400);

  EXPECT_EQ(post(s, "/api/sessions/" + id + "/close", json::object()).status, 200);
  EXPECT_EQ(post(s, "/api/sessions/" + id + "/close", json::object()).status, 409);
  r = post(s, round, {{"action", wheel(3)}, {"forecast", "yes"}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(body_of(r)["error"], "session_closed");
}

TEST(Sessions, UnreadableActionsAre422AndLeaveTheSessionAlone) {
  Service s;
  const std::string id = open_session(s, "two_switches", 1);
  const std::string round = "/api/sessions/" + id + "/round";
  Response r = post(s, round, {{"action", {{"do", {{"switch_a", "on"}}}}}, {"forecast", "on"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(body_of(r)["error"], "ambiguous_translation");
  r = post(s, round, {{"action", {{"do", {{"switch_a", "on"}, {"switch_b", "on"}}}}}, {"forecast", "on"}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(body_of(r)["truth"], "on");
  EXPECT_EQ(body_of(r)["round"], 1);
}

TEST(Sessions, IdleSessionsExpire) {
  FakeClock clock;
  ApiConfig config;
  config.session_ttl_seconds = 10;
  Service s(config, clock.clock());
  const std::string kept = open_session(s, "thermostat_basic", 1);
  const std::string idle = open_session(s, "thermostat_basic", 2);
  clock.advance(6);
  EXPECT_EQ(s.handle("GET", "/api/sessions/" + kept, "").status, 200);
  clock.advance(6);
  EXPECT_EQ(s.handle("GET", "/api/sessions/" + idle, "").status, 404);
  EXPECT_EQ(s.handle("GET", "/api/sessions/" + kept, "").status, 200);
  EXPECT_EQ(s.session_count(), 1u);
  clock.advance(11);
  EXPECT_EQ(s.evict_expired(), 1u);
  EXPECT_EQ(s.session_count(), 0u);
}

TEST(Sessions, SurviveARestart) {
  const auto log = temp_path("sessions.jsonl");
  std::filesystem::remove(log);
  ApiConfig config;
  config.persist_path = log.string();
  json transcript, closed;
  {
    Service s(config);
    const std::string a = open_session(s, "thermostat_basic", 5);
    const std::string b = open_session(s, "gaussian_unit", 9);
    for (int k = 1; k <= 3; ++k) {
      ASSERT_EQ(post(s, "/api/sessions/" + a + "/round", {{"action", wheel(k * 2)}, {"forecast", "no"}}).status, 200);
    }
    ASSERT_EQ(post(s, "/api/sessions/" + b + "/round",
                   {{"action", {{"do", {{"V1", "2"}}}}}, {"forecast", {{"low", 0.2}, {"mid", 0.6}, {"high", 0.2}}}})
                  .status,
              200);
    ASSERT_EQ(post(s, "/api/sessions/" + b + "/close", json::object()).status, 200);
    transcript = body_of(s.handle("GET", "/api/sessions/" + a, ""));
    closed = body_of(s.handle("GET", "/api/sessions/" + b, ""));
  }
  {
    std::ofstream(log, std::ios::app) << "{\"event\": \"round\", \"id\"";  // torn final write
  }
  Service s(config);
  EXPECT_EQ(s.session_count(), 2u);
  EXPECT_EQ(body_of(s.handle("GET", "/api/sessions/s1", "")), transcript);
  EXPECT_EQ(body_of(s.handle("GET", "/api/sessions/s2", "")), closed);
  EXPECT_EQ(open_session(s, "thermostat_basic", 1), "s3");
  std::filesystem::remove(log);
}

TEST(Sessions, EvictedSessionsStayGoneAfterARestart) {
  const auto log = temp_path("evicted.jsonl");
  std::filesystem::remove(log);
  FakeClock clock;
  ApiConfig config;
  config.persist_path = log.string();
  config.session_ttl_seconds = 5;
  {
    Service s(config, clock.clock());
    open_session(s, "thermostat_basic", 1);
    clock.advance(10);
    EXPECT_EQ(s.evict_expired(), 1u);
  }
  Service s(config, clock.clock());
  EXPECT_EQ(s.session_count(), 0u);
  EXPECT_EQ(open_session(s, "thermostat_basic", 1), "s2");
  std::filesystem::remove(log);
}

TEST(Sessions, CorruptLogIsReported) {
  const auto log = temp_path("corrupt.jsonl");
  std::ofstream(log) << "not json\n{\"event\":\"close\",\"id\":\"s1\"}\n";
  ApiConfig config;
  config.persist_path = log.string();
  try {
    Service s(config);
    FAIL() << "expected a ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::filesystem::remove(log);
}

TEST(Nir, InspectMatchesTheModel) {
  Rng rng{3};
  const nir::NirModel model = nir::NirModel::initialize(6, {"ambulance", "green_light"}, {8}, rng);
  const json checkpoint = nir::to_json(nir::Checkpoint{model, std::nullopt, std::nullopt});
  const std::vector<double> x{0.5, 0.7, -0.2, 0.1, 0.0, 0.3};
  Service s;
  const Response r = post(s, "/api/nir/inspect",
                          {{"checkpoint", checkpoint},
                           {"input", x},
                           {"edits", {{{"concept", "ambulance"}, {"weight", 0.0}}, {{"concept", "bias"}, {"weight", 2.0}}}}});
  ASSERT_EQ(r.status, 200) << r.body;
  const json j = body_of(r);
  const nir::NirOutput o = model.forward(std::span<const double>(x));
  EXPECT_EQ(j["model"], "checkpoint");
  EXPECT_EQ(j["y_hat"].get<double>(), o.y_hat);
  EXPECT_EQ(j["bias"].get<double>(), o.bias);
  ASSERT_EQ(j["concepts"].size(), 2u);
  EXPECT_EQ(j["concepts"][1]["name"], "green_light");
  EXPECT_EQ(j["concepts"][1]["value"].get<double>(), o.concepts(1));
  EXPECT_EQ(j["concepts"][1]["contribution"].get<double>(), o.contributions()(1));
  const nir::NirOutput e = nir::functional_intervention(model, {{0, 0.0}, {2, 2.0}}, x);
  EXPECT_EQ(j["edited"]["y_hat"].get<double>(), e.y_hat);
  EXPECT_EQ(j["edited"]["concepts"][0]["weight"].get<double>(), 0.0);
  EXPECT_EQ(j["edited"]["bias"].get<double>(), 2.0);
}

TEST(Nir, InspectValidatesItsInput) {
  Rng rng{3};
  const json checkpoint =
      nir::to_json(nir::Checkpoint{nir::NirModel::initialize(6, {"a", "b"}, {4}, rng), std::nullopt, std::nullopt});
  Service s;
  Response r = post(s, "/api/nir/inspect", {{"checkpoint", checkpoint}, {"input", {1.0, 2.0}}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["field"], "/input");
  r = post(s, "/api/nir/inspect",
           {{"checkpoint", checkpoint}, {"input", std::vector<double>(6, 0.0)}, {"edits", {{{"concept", "c"}, {"weight", 1}}}}});
  EXPECT_EQ(body_of(r)["field"], "/edits/0/concept");
  r = post(s, "/api/nir/inspect", {{"checkpoint", checkpoint}, {"input", std::vector<double>(6, 0.0)}});
  EXPECT_TRUE(body_of(r)["edited"].is_null());
}

TEST(Nir, DefaultModelIsTheTrainedBrakingNetwork) {
  Service s;
  const Response r = post(s, "/api/nir/inspect", {{"input", {0.9, 0.8, 0.5, -0.5, 0.0, 0.0}}});
  ASSERT_EQ(r.status, 200) << r.body;
  const json j = body_of(r);
  EXPECT_EQ(j["model"], "default");
  EXPECT_EQ(j["concepts"][0]["name"], "ambulance");
  // Ambulance present and green light on: the rule brakes.
  EXPECT_GT(j["concepts"][0]["value"].get<double>(), 0.5);
  EXPECT_EQ(j["decision"], 1);
}

TEST(Schema, EveryListedEndpointIsRouted) {
  Service s;
  const Response r = s.handle("GET", "/api/schema", "");
  ASSERT_EQ(r.status, 200);
  const json j = body_of(r);
  EXPECT_TRUE(j["schemas"].contains("verify_request"));
  const std::string id = open_session(s, "thermostat_basic", 1);
  for (const json& e : j["endpoints"]) {
    std::string path = e["path"].get<std::string>();
    for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
             {"{name}", "thermostat_basic"}, {"{id}", e["path"].get<std::string>().starts_with("/api/jobs") ? "j1" : id}}) {
      if (const auto at = path.find(from); at != std::string::npos) path.replace(at, from.size(), to);
    }
    const Response got = s.handle(e["method"].get<std::string>(), path, "{}");
    EXPECT_NE(got.status, 405) << path;
    if (!path.starts_with("/api/jobs")) {
      EXPECT_NE(got.status, 404) << path << " " << got.body;
    }
  }
}

TEST(Static, ServesFilesWithoutEscapingTheRoot) {
  const auto dir = temp_path("static");
  std::filesystem::create_directories(dir / "assets");
  std::ofstream(dir / "index.html") << "<html>ui</html>";
  std::ofstream(dir / "assets" / "app.js") << "console.log(1)";
  std::ofstream(temp_path("secret.txt")) << "secret";
  ApiConfig config;
  config.static_dir = dir.string();
  Service s(config);
  Response r = s.handle("GET", "/", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "<html>ui</html>");
  EXPECT_EQ(r.content_type, "text/html; charset=utf-8");
  r = s.handle("GET", "/assets/app.js", "");
  EXPECT_EQ(r.content_type, "text/javascript");
  EXPECT_EQ(s.handle("GET", "/../" + temp_path("secret.txt").filename().string(), "").status, 404);
  EXPECT_EQ(s.handle("GET", "/%2e%2e/" + temp_path("secret.txt").filename().string(), "").status, 404);
  EXPECT_EQ(s.handle("GET", "/missing.css", "").status, 404);
  EXPECT_EQ(Service().handle("GET", "/", "").status, 404);
  std::filesystem::remove_all(dir);
  std::filesystem::remove(temp_path("secret.txt"));
}

TEST(Config, PortFromEnvironment) {
  ::unsetenv("EQUIVAR_PORT");
  EXPECT_EQ(port_from_env(8080), 8080);
  ::setenv("EQUIVAR_PORT", "9123", 1);
  EXPECT_EQ(port_from_env(8080), 9123);
  ::setenv("EQUIVAR_PORT", "http", 1);
  EXPECT_THROW(port_from_env(8080), InvalidArgument);
  ::setenv("EQUIVAR_PORT", "70000", 1);
  EXPECT_THROW(port_from_env(8080), InvalidArgument);
  ::unsetenv("EQUIVAR_PORT");
  ApiConfig bad;
  bad.verify_workers = 0;
  EXPECT_THROW(Service{bad}, InvalidArgument);
}
