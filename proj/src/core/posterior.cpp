#include "equivar/posterior.hpp"

#include "equivar/errors.hpp"
#include "equivar/inference.hpp"

namespace equivar {

PosteriorEvaluator::PosteriorEvaluator(const FactoredModel& model, std::uint64_t cap)
    : model_(&model), joint_(equivar::joint(model, cap)) {}

std::optional<SparseDistribution> PosteriorEvaluator::evaluate(std::span<const Action> action) const {
  const VariableSystem& sys = model_->system();
  validate_action(action, sys);
  const std::size_t n = sys.size();

  Assignment a(n, 0);
  std::vector<bool> fixed(n, false), intervened(n, false);
  bool any_do = false;
  std::uint64_t base = 0;
  for (const Action& act : action) {
    fixed[act.target] = true;
    a[act.target] = act.value;
    base += sys.stride(act.target) * act.value;
    if (act.kind == ActionKind::Do) {
      intervened[act.target] = true;
      any_do = true;
    }
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fixed[i]) free.push_back(i);
  }

  SparseDistribution out;
  double mass = 0.0;
  std::uint64_t state = base;
  while (true) {
    double w;
    if (!any_do) {
      w = joint_[state];
    } else {
      w = 1.0;
      for (std::size_t i = 0; i < n && w != 0.0; ++i) {
        if (!intervened[i]) w *= model_->conditional(i, a[i], a);
      }
    }
    if (w != 0.0) {
      out.states.push_back(state);
      out.weights.push_back(w);
      mass += w;
    }
    // Odometer over the free variables only.
    std::size_t k = free.size();
    while (k-- > 0) {
      const std::size_t v = free[k];
      if (++a[v] < sys.cardinality(v)) {
        state += sys.stride(v);
        break;
      }
      state -= sys.stride(v) * (a[v] - 1);
      a[v] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  if (!(mass > 0.0)) return std::nullopt;
  for (double& w : out.weights) w /= mass;
  return out;
}

Distribution PosteriorEvaluator::evaluate_dense(std::span<const Action> action) const {
  auto sparse = evaluate(action);
  if (!sparse) {
    throw ZeroProbabilityEvidence("conditioning on a zero-probability event: " +
                                  to_string(action, model_->system()));
  }
  std::vector<double> w(state_count(), 0.0);
  for (std::size_t k = 0; k < sparse->states.size(); ++k) w[sparse->states[k]] = sparse->weights[k];
  return Distribution(model_->system(), std::move(w));
}

}  // namespace equivar
