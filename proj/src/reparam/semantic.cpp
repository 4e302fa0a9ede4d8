#include <string>

#include "equivar/equivariance.hpp"
#include "equivar/errors.hpp"
#include "equivar/inference.hpp"
#include "equivar/reparam.hpp"

namespace equivar {

FactoredModel semantic_reparam(const FactoredModel& machine, const Translation& t,
                               const std::vector<std::vector<std::size_t>>& concept_parents, std::uint64_t cap) {
  if (!(machine.system() == t.source())) {
    throw SystemMismatch("semantic_reparam: machine is not over the translation's source system");
  }
  const VariableSystem& cs = t.target();
  if (concept_parents.size() != cs.size()) {
    throw InvalidArgument("semantic_reparam: expected one parent list per concept variable");
  }
  const Distribution target = pushforward(joint(machine, cap), t);

  std::vector<Cpd> cpds;
  std::vector<std::size_t> params;
  for (std::size_t h = 0; h < cs.size(); ++h) {
    std::vector<std::size_t> subset = concept_parents[h];
    for (std::size_t p : subset) {
      if (p >= cs.size() || p == h) throw InvalidArgument("semantic_reparam: bad parent index");
    }
    subset.push_back(h);
    const Distribution local = marginal(target, subset);
    const std::size_t card = cs.cardinality(h);
    std::vector<double> table(local.weights().begin(), local.weights().end());
    for (std::size_t r = 0; r < table.size() / card; ++r) {
      double mass = 0.0;
      for (std::size_t v = 0; v < card; ++v) mass += table[r * card + v];
      for (std::size_t v = 0; v < card; ++v) {
        table[r * card + v] = mass > 0.0 ? table[r * card + v] / mass : 1.0 / static_cast<double>(card);
      }
    }
    cpds.push_back(Cpd::table(std::move(table)));

    bool all_parameters = concept_parents[h].empty();
    for (std::size_t j : t.block(h)) all_parameters = all_parameters && machine.is_parameter(j);
    if (all_parameters) params.push_back(h);
  }

  auto fitted = [&]() {
    try {
      return FactoredModel(cs, concept_parents, std::move(cpds), std::move(params));
    } catch (const InvalidModel& e) {
      throw StructureInconsistent(std::string("declared concept structure is invalid: ") + e.what());
    }
  }();

  const double tv = total_variation(joint(fitted, cap), target);
  if (tv > kDefaultEquivarianceTolerance) {
    throw StructureInconsistent("declared concept structure cannot reproduce the translated joint (TV " +
                                std::to_string(tv) + ")");
  }
  // Equal joints are not enough: a merge can hide values whose interventions
  // or observations behave differently downstream.
  const EquivarianceReport r = verify_brute(machine, fitted, t, ActionFamily::Both, 1, VerifyOptions{
      kDefaultEquivarianceTolerance, cap, false, 1});
  if (!r.holds()) {
    throw StructureInconsistent("translated model is not equivariant to the machine: " +
                                to_string(r.counterexamples.front().action, machine.system()) +
                                " disagrees (max discrepancy " + std::to_string(r.max_discrepancy) + ")");
  }
  return fitted;
}

}  // namespace equivar
