#include <cmath>

#include "equivar/inference.hpp"
#include "equivar/random.hpp"
#include "equivar/turing.hpp"

namespace equivar::turing {

namespace {

constexpr std::size_t kMaxRejections = 100000;

// Ancestral sampling for machines past the enumeration cap: Do parts by
// truncated factorization, Observe parts by rejection.
Assignment sample_past_cap(const FactoredModel& machine, std::span<const Action> action, Rng& rng) {
  FactoredModel m = machine;
  std::vector<Action> observed;
  for (const Action& a : action) {
    if (a.kind == ActionKind::Do) {
      m = intervene(m, a.target, a.value);
    } else {
      observed.push_back(a);
    }
  }
  const std::uint64_t seed = rng.next();
  for (std::size_t tries = 0; tries < kMaxRejections; ++tries) {
    Assignment x = sample(m, seed + tries, 1).front();
    bool ok = true;
    for (const Action& a : observed) ok = ok && x[a.target] == a.value;
    if (ok) return x;
  }
  throw ZeroProbabilityEvidence("no sample matched " + to_string(action, machine.system()) + " after " +
                                std::to_string(kMaxRejections) + " draws");
}

std::size_t draw_truth(const Scenario& s, std::size_t h, std::span<const Action> action, Rng& rng) {
  const auto block = s.translation.block(h);
  const std::vector<std::size_t> subset(block.begin(), block.end());
  Assignment full(s.machine.size(), 0);
  try {
    const Distribution m = query(s.machine, subset, action);
    const Assignment local = m.system().decode(draw_state(m, rng.uniform()));
    for (std::size_t k = 0; k < subset.size(); ++k) full[subset[k]] = local[k];
  } catch (const StateSpaceTooLarge&) {
    full = sample_past_cap(s.machine, action, rng);
  }
  return s.translation.block_value(h, full);
}

}  // namespace

double score(const Forecast& f, std::size_t truth, std::size_t cardinality) {
  if (f.point) {
    if (*f.point >= cardinality) throw InvalidArgument("forecast value out of range");
    return *f.point == truth ? 1.0 : 0.0;
  }
  if (f.distribution.size() != cardinality) {
    throw InvalidArgument("forecast has " + std::to_string(f.distribution.size()) + " probabilities, query has " +
                          std::to_string(cardinality) + " values");
  }
  double total = 0.0, brier = 0.0;
  for (std::size_t v = 0; v < cardinality; ++v) {
    const double p = f.distribution[v];
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("forecast probabilities must be finite and >= 0");
    total += p;
    const double d = p - (v == truth ? 1.0 : 0.0);
    brier += d * d;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("forecast probabilities must sum to 1");
  return 1.0 - brier / 2.0;
}

Session::Session(std::string id, std::shared_ptr<const Scenario> scenario, std::string query, std::uint64_t seed)
    : id_(std::move(id)), scenario_(std::move(scenario)), query_(std::move(query)), seed_(seed) {
  if (!scenario_) throw InvalidArgument("session without a scenario");
  query_index_ = scenario_->human.system().index_of(query_);
}

RoundResult Session::play(CompoundAction action, const Forecast& forecast) {
  if (status_ == Status::Closed) throw SessionClosed("session " + id_ + " is closed");
  action = canonical(std::move(action));
  validate_action(action, scenario_->machine.system());
  if (action.empty()) throw InvalidAction("a round needs at least one action");
  translate_action(action, scenario_->translation);
  const std::size_t card = scenario_->human.system().cardinality(query_index_);
  // Validate the forecast before spending the draw.
  score(forecast, 0, card);
  Rng rng{seed_, rounds_.size()};
  const std::size_t truth = draw_truth(*scenario_, query_index_, action, rng);
  const double sc = score(forecast, truth, card);
  rounds_.push_back(Round{std::move(action), forecast, truth, sc});
  double sum = 0.0;
  for (const Round& r : rounds_) sum += r.score;
  return RoundResult{truth, sc, sum / static_cast<double>(rounds_.size())};
}

Verdict Session::verdict(double threshold, std::size_t min_rounds) const {
  Verdict v;
  v.rounds_counted = rounds_.size();
  v.threshold = threshold;
  v.min_rounds = min_rounds;
  double sum = 0.0;
  for (const Round& r : rounds_) sum += r.score;
  v.mean_score = rounds_.empty() ? 0.0 : sum / static_cast<double>(rounds_.size());
  v.interpretable = v.rounds_counted >= min_rounds && v.mean_score >= threshold;
  return v;
}

std::vector<double> human_prediction(const Scenario& s, std::size_t q, std::span<const Action> machine_action) {
  const CompoundAction h = translate_action(machine_action, s.translation);
  const std::vector<std::size_t> subset{q};
  try {
    const Distribution d = query(s.human, subset, h);
    return {d.weights().begin(), d.weights().end()};
  } catch (const ZeroProbabilityEvidence&) {
    const std::size_t card = s.human.system().cardinality(q);
    return std::vector<double>(card, 1.0 / static_cast<double>(card));
  }
}

Forecast oracle_forecast(const Scenario& s, std::size_t q, std::span<const Action> machine_action,
                         bool distributional) {
  std::vector<double> p = human_prediction(s, q, machine_action);
  if (distributional) return Forecast::spread(std::move(p));
  std::size_t best = 0;
  for (std::size_t v = 1; v < p.size(); ++v) {
    if (p[v] > p[best]) best = v;
  }
  return Forecast::value(best);
}

Session run_script(std::shared_ptr<const Scenario> scenario, const std::string& query, const Script& script,
                   std::string id) {
  Session session(std::move(id), std::move(scenario), query, script.seed);
  for (std::size_t r = 0; r < script.actions.size(); ++r) {
    const CompoundAction& a = script.actions[r];
    const std::optional<Forecast>& given = script.forecasts[r];
    const Forecast f = script.oracle || !given
                           ? oracle_forecast(session.scenario(), session.query_index(), a, script.distributional)
                           : *given;
    session.play(a, f);
  }
  return session;
}

std::string_view to_string(Status status) { return status == Status::Open ? "open" : "closed"; }

}  // namespace equivar::turing
