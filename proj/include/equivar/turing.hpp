#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "equivar/action.hpp"
#include "equivar/scenario.hpp"

namespace equivar::turing {

inline constexpr double kDefaultThreshold = 0.9;
inline constexpr std::size_t kDefaultMinRounds = 10;

// A single value, or a distribution over the query variable's domain.
struct Forecast {
  std::optional<std::size_t> point;
  std::vector<double> distribution;

  static Forecast value(std::size_t v) { return Forecast{v, {}}; }
  static Forecast spread(std::vector<double> p) { return Forecast{std::nullopt, std::move(p)}; }
};

struct Round {
  CompoundAction action;
  Forecast forecast;
  std::size_t truth = 0;
  double score = 0.0;
};

struct RoundResult {
  std::size_t truth = 0;
  double score = 0.0;
  double running_mean = 0.0;
};

struct Verdict {
  std::size_t rounds_counted = 0;
  double mean_score = 0.0;
  double threshold = kDefaultThreshold;
  std::size_t min_rounds = kDefaultMinRounds;
  bool interpretable = false;
};

enum class Status { Open, Closed };

// 1 if the point forecast equals the truth; for a distribution, 1 - Brier / 2.
// Throws InvalidArgument on a malformed distribution.
double score(const Forecast& forecast, std::size_t truth, std::size_t cardinality);

// Rounds are append-only. Truth of round r is drawn from the machine under the
// round's action with Rng{seed, r}, translated, and projected onto the query.
// Not thread-safe; callers serialize access to one session.
class Session {
 public:
  // Throws UnknownVariable when `query` is not a human variable.
  Session(std::string id, std::shared_ptr<const Scenario> scenario, std::string query, std::uint64_t seed);

  const std::string& id() const { return id_; }
  const Scenario& scenario() const { return *scenario_; }
  const std::string& query() const { return query_; }
  std::size_t query_index() const { return query_index_; }
  std::uint64_t seed() const { return seed_; }
  Status status() const { return status_; }
  const std::vector<Round>& rounds() const { return rounds_; }

  // Throws SessionClosed, InvalidAction, AmbiguousTranslation (the human
  // cannot read the action), ZeroProbabilityEvidence, InvalidArgument.
  RoundResult play(CompoundAction action, const Forecast& forecast);
  void close() { status_ = Status::Closed; }
  Verdict verdict(double threshold = kDefaultThreshold, std::size_t min_rounds = kDefaultMinRounds) const;

 private:
  std::string id_;
  std::shared_ptr<const Scenario> scenario_;
  std::string query_;
  std::size_t query_index_ = 0;
  std::uint64_t seed_ = 0;
  Status status_ = Status::Open;
  std::vector<Round> rounds_;
};

// Predicts the query with the human model under the translated action.
// Uniform when the human model gives the evidence no mass.
std::vector<double> human_prediction(const Scenario& s, std::size_t query, std::span<const Action> machine_action);
Forecast oracle_forecast(const Scenario& s, std::size_t query, std::span<const Action> machine_action,
                         bool distributional = false);

// Scripted runs:
// {"seed": 1, "forecaster": "oracle" | "script", "distributional": false,
//  "threshold": 0.9, "min_rounds": 10,
//  "rounds": [{"action": {...}, "forecast": "no" | {"no": 0.3, "yes": 0.7}}],
//  "random_actions": {"count": 20, "variables": ["wheel"], "kind": "do"}}
// Exactly one of "rounds" and "random_actions". Throws ParseError.
struct Script {
  std::uint64_t seed = 1;
  bool oracle = false;
  bool distributional = false;
  double threshold = kDefaultThreshold;
  std::size_t min_rounds = kDefaultMinRounds;
  std::vector<CompoundAction> actions;
  std::vector<std::optional<Forecast>> forecasts;
};
Script script_from_json(const nlohmann::json& j, const Scenario& s, std::size_t query);

Session run_script(std::shared_ptr<const Scenario> scenario, const std::string& query, const Script& script,
                   std::string id = "script");

nlohmann::json forecast_to_json(const Forecast& f, const Variable& query);
// A label, or an object of label: probability. Throws ParseError.
Forecast forecast_from_json(const nlohmann::json& j, const Variable& query, const std::string& field = "/forecast");
nlohmann::json to_json(const Verdict& v);
nlohmann::json round_to_json(const Session& s, std::size_t r);
// {"round", "truth", "score", "running_mean"} for the latest round.
nlohmann::json round_result_to_json(const Session& s, const RoundResult& r);
nlohmann::json transcript_to_json(const Session& s);

// Replays a transcript against its scenario; throws InvalidArgument when a
// recorded truth or score does not reproduce.
Session replay(const nlohmann::json& transcript, std::shared_ptr<const Scenario> scenario);

std::string_view to_string(Status status);

}  // namespace equivar::turing
