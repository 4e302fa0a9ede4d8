#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/distribution.hpp"
#include "equivar/factored_model.hpp"
#include "equivar/neighborhood.hpp"
#include "equivar/translation.hpp"

namespace equivar {

// Hard-gated mixture: the selector picks exactly one component, and every
// component is a model over the same non-selector variables. The selector is
// variable 0 of the flat system; component variable j is flat variable j + 1.
class MixtureModel {
 public:
  MixtureModel(Variable selector, std::vector<double> selector_prior, std::vector<FactoredModel> components);

  const Variable& selector() const { return selector_; }
  const std::vector<double>& prior() const { return prior_; }
  const VariableSystem& system() const { return components_.front().system(); }
  const VariableSystem& flat_system() const { return flat_; }
  std::size_t component_count() const { return components_.size(); }
  const FactoredModel& component(std::size_t s) const { return components_[s]; }
  const std::vector<FactoredModel>& components() const { return components_; }

 private:
  Variable selector_;
  std::vector<double> prior_;
  std::vector<FactoredModel> components_;
  VariableSystem flat_;
};

// One model over the flat system. Variables whose CPD is identical in every
// component keep it; the rest gain the selector as first parent and take the
// union of their component parents. Throws StructureInconsistent if that union
// is cyclic, StateSpaceTooLarge if a gated table would exceed `cap` rows.
FactoredModel flatten(const MixtureModel& mix, std::uint64_t cap = kDefaultStateCap);

// Throws UnknownSelectorValue.
const FactoredModel& active_component(const MixtureModel& mix, std::string_view selector_value);
const FactoredModel& active_component(const MixtureModel& mix, std::size_t selector_value);

// Direct mixture semantics over the flat system, without flattening:
// P(s, v) = prior(s) * P_s(v), with Do parts applied per component (Do on the
// selector replaces the prior) and Observe parts conditioned at the end.
Distribution mixture_joint(const MixtureModel& mix, std::uint64_t cap = kDefaultStateCap);
Distribution mixture_apply_action(const MixtureModel& mix, std::span<const Action> action,
                                  std::uint64_t cap = kDefaultStateCap);

inline constexpr std::size_t kDefaultLoadLimit = 9;

struct LoadEntry {
  Action action;
  std::size_t load = 0;
  std::vector<std::size_t> considered;  // target plus what must be read with it, ascending
};

struct CognitiveLoadProfile {
  std::vector<LoadEntry> per_action;
  std::size_t max_load = 0;
  std::size_t limit = kDefaultLoadLimit;

  bool within_limit() const { return max_load <= limit; }
};

// Load of an action = |{target} + N(target)|. Neighborhoods are exact when the
// joint is enumerable and structural otherwise.
CognitiveLoadProfile cognitive_load(const FactoredModel& model, ActionFamily family = ActionFamily::Both,
                                    std::size_t limit = kDefaultLoadLimit, std::uint64_t cap = kDefaultStateCap);

// Mixture load, over the flat system: the largest per-component load, plus the
// selector whenever the target's neighborhood or its conditional table changes
// between components. An action on the selector itself has load 1.
CognitiveLoadProfile cognitive_load(const MixtureModel& mix, ActionFamily family = ActionFamily::Both,
                                    std::size_t limit = kDefaultLoadLimit, std::uint64_t cap = kDefaultStateCap);

// Concept-level model over t.target() with the declared parents (target
// indices) and CPTs read off pushforward(joint(machine), t); rows with no mass
// are uniform. Throws StructureInconsistent when the declared DAG cannot
// reproduce the pushforward within 1e-9, or when the result is not
// action-equivariant to the machine on single-variable actions.
FactoredModel semantic_reparam(const FactoredModel& machine, const Translation& t,
                               const std::vector<std::vector<std::size_t>>& concept_parents,
                               std::uint64_t cap = kDefaultStateCap);

}  // namespace equivar
