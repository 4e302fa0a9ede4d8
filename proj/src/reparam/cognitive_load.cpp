#include <algorithm>
#include <cmath>

#include "equivar/errors.hpp"
#include "equivar/inference.hpp"
#include "equivar/reparam.hpp"

namespace equivar {

namespace {

std::vector<ActionKind> kinds_of(ActionFamily family) {
  std::vector<ActionKind> kinds;
  if (family_includes(family, ActionKind::Observe)) kinds.push_back(ActionKind::Observe);
  if (family_includes(family, ActionKind::Do)) kinds.push_back(ActionKind::Do);
  return kinds;
}

void add_entries(CognitiveLoadProfile& p, const VariableSystem& system, std::size_t i, ActionFamily family,
                 std::size_t load, const std::vector<std::size_t>& considered) {
  for (ActionKind kind : kinds_of(family)) {
    for (std::size_t v = 0; v < system.cardinality(i); ++v) {
      p.per_action.push_back(LoadEntry{Action{kind, i, v}, load, considered});
    }
  }
  p.max_load = std::max(p.max_load, load);
}

// P(j | members) as a flat table, or empty when it cannot be computed exactly.
std::vector<double> local_conditional(const FactoredModel& m, std::size_t j, const std::vector<std::size_t>& members,
                                      std::uint64_t cap) {
  std::vector<std::size_t> subset = members;
  subset.push_back(j);
  const Distribution d = query(m, subset, {}, cap);
  std::vector<double> w(d.weights().begin(), d.weights().end());
  const std::size_t card = m.system().cardinality(j);
  for (std::size_t r = 0; r < w.size() / card; ++r) {
    double mass = 0.0;
    for (std::size_t v = 0; v < card; ++v) mass += w[r * card + v];
    for (std::size_t v = 0; v < card; ++v) w[r * card + v] = mass > 0.0 ? w[r * card + v] / mass : -1.0;
  }
  return w;
}

bool same_conditional(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    // Rows without mass on either side cannot disagree observably.
    if (a[k] < 0.0 || b[k] < 0.0) continue;
    if (std::abs(a[k] - b[k]) > kDefaultCiTolerance) return false;
  }
  return true;
}

}  // namespace

CognitiveLoadProfile cognitive_load(const FactoredModel& model, ActionFamily family, std::size_t limit,
                                    std::uint64_t cap) {
  CognitiveLoadProfile p;
  p.limit = limit;
  const auto nbs = neighborhoods(model, NeighborhoodMethod::Auto, kDefaultCiTolerance, cap);
  for (std::size_t i = 0; i < model.size(); ++i) {
    std::vector<std::size_t> considered = nbs[i].members;
    considered.push_back(i);
    std::sort(considered.begin(), considered.end());
    add_entries(p, model.system(), i, family, considered.size(), considered);
  }
  return p;
}

CognitiveLoadProfile cognitive_load(const MixtureModel& mix, ActionFamily family, std::size_t limit,
                                    std::uint64_t cap) {
  CognitiveLoadProfile p;
  p.limit = limit;
  add_entries(p, mix.flat_system(), 0, family, 1, {0});

  std::vector<std::vector<MarkovNeighborhood>> per_component;
  for (const auto& c : mix.components()) {
    per_component.push_back(neighborhoods(c, NeighborhoodMethod::Auto, kDefaultCiTolerance, cap));
  }
  for (std::size_t j = 0; j < mix.system().size(); ++j) {
    std::size_t best = 0;
    bool varies = false;
    for (std::size_t s = 0; s < mix.component_count(); ++s) {
      const auto& members = per_component[s][j].members;
      if (members != per_component[0][j].members) varies = true;
      if (members.size() > per_component[best][j].members.size()) best = s;
    }
    if (!varies) {
      const auto& members = per_component[0][j].members;
      const auto reference = local_conditional(mix.component(0), j, members, cap);
      for (std::size_t s = 1; s < mix.component_count() && !varies; ++s) {
        varies = !same_conditional(reference, local_conditional(mix.component(s), j, members, cap));
      }
    }
    std::vector<std::size_t> considered{j + 1};
    for (std::size_t m : per_component[best][j].members) considered.push_back(m + 1);
    if (varies) considered.push_back(0);
    std::sort(considered.begin(), considered.end());
    add_entries(p, mix.flat_system(), j + 1, family, considered.size(), considered);
  }
  return p;
}

}  // namespace equivar
