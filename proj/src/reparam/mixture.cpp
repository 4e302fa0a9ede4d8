#include <cmath>
#include <string>

#include "equivar/errors.hpp"
#include "equivar/inference.hpp"
#include "equivar/reparam.hpp"

namespace equivar {

namespace {

VariableSystem make_flat(const Variable& selector, const VariableSystem& inner) {
  std::vector<Variable> vars{selector};
  vars.insert(vars.end(), inner.variables().begin(), inner.variables().end());
  return VariableSystem(std::move(vars));
}

}  // namespace

MixtureModel::MixtureModel(Variable selector, std::vector<double> selector_prior,
                           std::vector<FactoredModel> components)
    : selector_(std::move(selector)), prior_(std::move(selector_prior)), components_(std::move(components)) {
  const std::size_t k = selector_.domain.size();
  if (components_.size() != k) {
    throw InvalidModel("mixture needs one component per selector value: " + std::to_string(k) + " values, " +
                       std::to_string(components_.size()) + " components");
  }
  if (prior_.size() != k) throw InvalidModel("selector prior has the wrong length");
  double sum = 0.0;
  for (double p : prior_) {
    if (!(p >= 0.0)) throw InvalidModel("selector prior has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidModel("selector prior does not sum to 1");
  for (const auto& c : components_) {
    if (!(c.system() == components_.front().system())) {
      throw InvalidModel("mixture components must share one variable system");
    }
  }
  flat_ = make_flat(selector_, components_.front().system());
}

FactoredModel flatten(const MixtureModel& mix, std::uint64_t cap) {
  const VariableSystem& flat = mix.flat_system();
  const std::size_t n = mix.system().size();
  const std::size_t k = mix.component_count();
  std::vector<std::vector<std::size_t>> parents(n + 1);
  std::vector<Cpd> cpds;
  std::vector<std::size_t> params;
  cpds.push_back(Cpd::table(mix.prior()));
  params.push_back(0);

  for (std::size_t j = 0; j < n; ++j) {
    const FactoredModel& first = mix.component(0);
    bool shared = true;
    bool parameter = true;
    for (const auto& c : mix.components()) {
      if (!std::equal(c.parents(j).begin(), c.parents(j).end(), first.parents(j).begin(), first.parents(j).end()) ||
          !(c.cpd(j) == first.cpd(j))) {
        shared = false;
      }
      parameter = parameter && c.is_parameter(j);
    }
    if (shared) {
      for (std::size_t p : first.parents(j)) parents[j + 1].push_back(p + 1);
      cpds.push_back(first.cpd(j));
      if (parameter) params.push_back(j + 1);
      continue;
    }
    std::vector<bool> in_union(n, false);
    for (const auto& c : mix.components()) {
      for (std::size_t p : c.parents(j)) in_union[p] = true;
    }
    std::vector<std::size_t> u;
    for (std::size_t p = 0; p < n; ++p) {
      if (in_union[p]) u.push_back(p);
    }
    std::vector<std::size_t> cards{k};
    for (std::size_t p : u) cards.push_back(mix.system().cardinality(p));
    const std::uint64_t rows = saturating_product(cards);
    if (rows > cap) {
      throw StateSpaceTooLarge("flatten: gated table of '" + mix.system()[j].name + "' needs " +
                               std::to_string(rows) + " rows");
    }
    parents[j + 1].push_back(0);
    for (std::size_t p : u) parents[j + 1].push_back(p + 1);
    const std::size_t card = mix.system().cardinality(j);
    std::vector<double> table;
    table.reserve(rows * card);
    Assignment inner(n, 0);
    std::vector<std::size_t> digits(u.size(), 0);
    for (std::size_t s = 0; s < k; ++s) {
      std::fill(digits.begin(), digits.end(), 0);
      for (std::uint64_t r = 0; r < rows / k; ++r) {
        for (std::size_t m = 0; m < u.size(); ++m) inner[u[m]] = digits[m];
        const std::vector<double> row = mix.component(s).row(j, inner);
        table.insert(table.end(), row.begin(), row.end());
        for (std::size_t m = u.size(); m-- > 0;) {
          if (++digits[m] < mix.system().cardinality(u[m])) break;
          digits[m] = 0;
        }
      }
    }
    cpds.push_back(Cpd::table(std::move(table)));
  }
  try {
    return FactoredModel(flat, std::move(parents), std::move(cpds), std::move(params));
  } catch (const InvalidModel& e) {
    throw StructureInconsistent(std::string("flattened mixture is not a valid model: ") + e.what());
  }
}

const FactoredModel& active_component(const MixtureModel& mix, std::size_t selector_value) {
  if (selector_value >= mix.component_count()) {
    throw UnknownSelectorValue("selector value index " + std::to_string(selector_value) + " out of range");
  }
  return mix.component(selector_value);
}

const FactoredModel& active_component(const MixtureModel& mix, std::string_view selector_value) {
  const auto& dom = mix.selector().domain;
  for (std::size_t s = 0; s < dom.size(); ++s) {
    if (dom[s] == selector_value) return mix.component(s);
  }
  throw UnknownSelectorValue("'" + std::string(selector_value) + "' is not a value of selector '" +
                             mix.selector().name + "'");
}

Distribution mixture_apply_action(const MixtureModel& mix, std::span<const Action> action, std::uint64_t cap) {
  const VariableSystem& flat = mix.flat_system();
  validate_action(action, flat);
  flat.require_enumerable(cap, "mixture semantics");
  std::vector<double> prior = mix.prior();
  std::vector<Action> observations;
  std::vector<Action> inner_do;
  for (const Action& a : action) {
    if (a.kind == ActionKind::Observe) {
      observations.push_back(a);
    } else if (a.target == 0) {
      std::fill(prior.begin(), prior.end(), 0.0);
      prior[a.value] = 1.0;
    } else {
      inner_do.push_back(Action{ActionKind::Do, a.target - 1, a.value});
    }
  }
  const std::uint64_t inner_states = mix.system().state_count();
  std::vector<double> w(flat.state_count(), 0.0);
  for (std::size_t s = 0; s < mix.component_count(); ++s) {
    if (prior[s] == 0.0) continue;
    FactoredModel c = mix.component(s);
    for (const Action& d : inner_do) c = intervene(c, d.target, d.value);
    const Distribution js = joint(c, cap);
    for (std::uint64_t u = 0; u < inner_states; ++u) w[s * inner_states + u] = prior[s] * js[u];
  }
  Distribution d(flat, std::move(w));
  if (observations.empty()) return d;
  return condition(d, observations);
}

Distribution mixture_joint(const MixtureModel& mix, std::uint64_t cap) { return mixture_apply_action(mix, {}, cap); }

}  // namespace equivar
