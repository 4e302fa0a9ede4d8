#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/factored_model.hpp"
#include "equivar/neighborhood.hpp"
#include "equivar/translation.hpp"

namespace equivar {

enum class VerifyMode { Brute, CIPreservation, MarkovLocal, Region };

// Undefined: zero-probability evidence on either side. Ambiguous: the action
// has no unique human counterpart. Neither counts as pass or fail.
enum class Verdict { Pass, Fail, Undefined, Ambiguous };

inline constexpr double kDefaultEquivarianceTolerance = 1e-9;

struct VerifyOptions {
  double tolerance = kDefaultEquivarianceTolerance;
  std::uint64_t cap = kDefaultStateCap;
  // Keep one ActionCheck per evaluated action. Large sweeps can turn this off
  // and keep only the aggregates.
  bool record_checks = true;
  std::size_t max_counterexamples = 64;
};

struct Counterexample {
  CompoundAction action;
  Assignment human_state;  // worst joint assignment in the human system
  double lhs = 0.0;        // translated machine posterior ("query, then translate")
  double rhs = 0.0;        // human posterior of the translated action
};

struct ActionCheck {
  CompoundAction action;        // machine side; empty for the unconditioned baseline
  CompoundAction human_action;  // empty when ambiguous
  double discrepancy = 0.0;     // total variation
  Verdict verdict = Verdict::Pass;
  std::optional<std::size_t> scope;  // markov-local: the variable whose neighborhood was used
};

struct CiCheck {
  std::size_t variable = 0;
  std::vector<std::size_t> conditioning;
  bool testable = true;
  bool machine_holds = false;
  bool human_holds = false;
};

struct EquivarianceReport {
  VerifyMode mode = VerifyMode::Brute;
  double tolerance = kDefaultEquivarianceTolerance;
  VariableSystem machine_system;
  VariableSystem human_system;

  std::vector<ActionCheck> checks;
  double max_discrepancy = 0.0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t undefined = 0;
  std::size_t ambiguous = 0;
  // Distribution evaluations (one per verified action, including the baseline).
  std::uint64_t evaluations = 0;
  // Probability-table entries behind those evaluations, machine side.
  std::uint64_t cost = 0;
  std::vector<Counterexample> counterexamples;
  std::optional<std::string> region;

  std::vector<CiCheck> ci_checks;
  std::size_t untestable = 0;
  std::vector<MarkovNeighborhood> neighborhoods;

  bool holds() const { return failed == 0; }
};

struct ActionOutcome {
  CompoundAction human_action;
  double discrepancy = 0.0;
  Verdict verdict = Verdict::Pass;
  std::optional<Counterexample> counterexample;
};

// TV(pushforward(apply_action(machine, a), t), apply_action(human, t(a))).
// Throws AmbiguousTranslation; zero-mass evidence yields Verdict::Undefined.
ActionOutcome verify_action(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                            std::span<const Action> action, const VerifyOptions& options = {});
ActionOutcome verify_action(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                            const Action& action, const VerifyOptions& options = {});

// Every compound action of 1..max_compound distinct variables, every kind the
// family allows, every value; plus the unconditioned baseline.
EquivarianceReport verify_brute(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                                ActionFamily family = ActionFamily::Both, std::size_t max_compound = 1,
                                const VerifyOptions& options = {});

// Exactly the given actions. Throws InvalidArgument on an empty region.
EquivarianceReport verify_region(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                                 const std::vector<CompoundAction>& region, const VerifyOptions& options = {});

// Machine CI statements V_i indep rest | S against their translated counterparts
// in the human model, for every i and S. Conditioning sets that split an
// omega-block (or a non-singleton block of V_i) are counted as untestable.
EquivarianceReport verify_ci_preservation(const FactoredModel& machine, const FactoredModel& human,
                                          const Translation& t, std::size_t max_vars = 12,
                                          const VerifyOptions& options = {});

// Per machine variable: find its neighborhood, then verify single-variable
// actions on the sub-system {i} + neighborhood (closed under omega-blocks)
// using exact marginals. Cost scales with the local tables, not the joint.
EquivarianceReport verify_markov_local(const FactoredModel& machine, const FactoredModel& human,
                                       const Translation& t, ActionFamily family = ActionFamily::Both,
                                       NeighborhoodMethod method = NeighborhoodMethod::Auto,
                                       const VerifyOptions& options = {});

struct SurrogateChainReport {
  EquivarianceReport original_to_surrogate;
  EquivarianceReport surrogate_to_human;
  EquivarianceReport composed;  // original vs human through t_sh after t_os

  bool holds() const {
    return original_to_surrogate.holds() && surrogate_to_human.holds() && composed.holds();
  }
};

SurrogateChainReport verify_surrogate_chain(const FactoredModel& original, const FactoredModel& surrogate,
                                            const FactoredModel& human, const Translation& t_os,
                                            const Translation& t_sh, ActionFamily family = ActionFamily::Both,
                                            std::size_t max_compound = 1, const VerifyOptions& options = {});

// Calls `fn` on every compound action in canonical order: by size, then by
// target set (lexicographic), then kinds (observe before do), then values.
template <typename Fn>
void for_each_action(const VariableSystem& system, ActionFamily family, std::size_t max_compound, Fn&& fn);

// Closed-form number of actions visited by for_each_action.
double count_actions(const VariableSystem& system, ActionFamily family, std::size_t max_compound);

// Cost a run would report, computable without enumerating anything. Lets
// callers compare modes on systems far past the enumeration cap.
double estimate_brute_cost(const VariableSystem& machine, ActionFamily family, std::size_t max_compound);
double estimate_markov_cost(const FactoredModel& machine, const Translation& t, ActionFamily family);

std::string_view to_string(VerifyMode mode);
std::string_view to_string(Verdict verdict);
// "brute", "ci", "markov", "region". Throws InvalidArgument.
VerifyMode parse_verify_mode(std::string_view text);

// ---------------------------------------------------------------------------

template <typename Fn>
void for_each_action(const VariableSystem& system, ActionFamily family, std::size_t max_compound, Fn&& fn) {
  const std::size_t n = system.size();
  const std::size_t kmax = std::min(max_compound, n);
  std::vector<ActionKind> kinds;
  if (family_includes(family, ActionKind::Observe)) kinds.push_back(ActionKind::Observe);
  if (family_includes(family, ActionKind::Do)) kinds.push_back(ActionKind::Do);

  CompoundAction action;
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::size_t> targets(k);
    for (std::size_t j = 0; j < k; ++j) targets[j] = j;
    while (true) {
      std::vector<std::size_t> kind_idx(k, 0);
      do {
        std::vector<std::size_t> values(k, 0);
        do {
          action.resize(k);
          for (std::size_t j = 0; j < k; ++j) action[j] = Action{kinds[kind_idx[j]], targets[j], values[j]};
          fn(static_cast<const CompoundAction&>(action));
        } while ([&] {
          for (std::size_t j = k; j-- > 0;) {
            if (++values[j] < system.cardinality(targets[j])) return true;
            values[j] = 0;
          }
          return false;
        }());
      } while ([&] {
        for (std::size_t j = k; j-- > 0;) {
          if (++kind_idx[j] < kinds.size()) return true;
          kind_idx[j] = 0;
        }
        return false;
      }());
      // Next k-combination of targets.
      std::size_t j = k;
      while (j-- > 0 && targets[j] == n - k + j) {
      }
      if (j == static_cast<std::size_t>(-1)) break;
      ++targets[j];
      for (std::size_t m = j + 1; m < k; ++m) targets[m] = targets[m - 1] + 1;
    }
  }
}

}  // namespace equivar
