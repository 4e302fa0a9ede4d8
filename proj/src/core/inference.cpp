#include "equivar/inference.hpp"

#include <algorithm>
#include <cmath>

#include "equivar/errors.hpp"
#include "equivar/random.hpp"
#include "odometer.hpp"

namespace equivar {

Distribution joint(const FactoredModel& model, std::uint64_t cap) {
  const VariableSystem& sys = model.system();
  sys.require_enumerable(cap, "joint");
  std::vector<double> weights(sys.state_count());
  Assignment a(sys.size(), 0);
  for (double& w : weights) {
    double p = 1.0;
    for (std::size_t i = 0; i < a.size() && p != 0.0; ++i) p *= model.conditional(i, a[i], a);
    w = p;
    detail::advance(a, sys);
  }
  return Distribution(sys, std::move(weights));
}

FactoredModel intervene(const FactoredModel& model, std::size_t target, std::size_t value) {
  if (target >= model.size()) throw InvalidAction("intervention target out of range");
  const std::size_t card = model.system().cardinality(target);
  if (value >= card) throw InvalidAction("intervention value out of range");
  return model.with_cpd(target, {}, Cpd::point_mass(card, value));
}

Distribution condition(const Distribution& dist, std::span<const Action> observations) {
  const VariableSystem& sys = dist.system();
  validate_action(observations, sys);
  std::vector<double> w(dist.weights().begin(), dist.weights().end());
  Assignment a(sys.size(), 0);
  double mass = 0.0;
  for (double& x : w) {
    for (const Action& o : observations) {
      if (a[o.target] != o.value) {
        x = 0.0;
        break;
      }
    }
    mass += x;
    detail::advance(a, sys);
  }
  if (!(mass > 0.0)) {
    throw ZeroProbabilityEvidence("conditioning on a zero-probability event: " +
                                  to_string(observations, sys));
  }
  for (double& x : w) x /= mass;
  return Distribution(sys, std::move(w));
}

Distribution apply_action(const FactoredModel& model, const Action& action, std::uint64_t cap) {
  return apply_action(model, std::span<const Action>(&action, 1), cap);
}

Distribution apply_action(const FactoredModel& model, std::span<const Action> action,
                          std::uint64_t cap) {
  validate_action(action, model.system());
  FactoredModel m = model;
  std::vector<Action> observations;
  for (const Action& a : action) {
    if (a.kind == ActionKind::Do) {
      m = intervene(m, a.target, a.value);
    } else {
      observations.push_back(a);
    }
  }
  Distribution dist = joint(m, cap);
  if (observations.empty()) return dist;
  return condition(dist, observations);
}

Distribution marginal(const Distribution& dist, std::span<const std::size_t> subset) {
  const VariableSystem& sys = dist.system();
  if (subset.empty()) throw EmptySubset("marginal over an empty subset");
  std::vector<bool> seen(sys.size(), false);
  for (std::size_t i : subset) {
    if (i >= sys.size()) throw IndexOutOfRange("marginal subset index out of range");
    if (seen[i]) throw InvalidArgument("marginal subset repeats a variable");
    seen[i] = true;
  }
  VariableSystem sub = sys.subsystem(subset);
  std::vector<double> out(sub.state_count(), 0.0);
  // Stride in the marginal table for each source variable (0 when summed out).
  std::vector<std::uint64_t> strides(sys.size(), 0);
  for (std::size_t k = 0; k < subset.size(); ++k) strides[subset[k]] = sub.stride(k);
  Assignment a(sys.size(), 0);
  for (std::uint64_t s = 0; s < dist.size(); ++s) {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += strides[i] * a[i];
    out[t] += dist[s];
    detail::advance(a, sys);
  }
  return Distribution(std::move(sub), std::move(out));
}

bool ci_test(const Distribution& dist, std::size_t a, std::span<const std::size_t> b,
             std::span<const std::size_t> s, double eps) {
  const std::size_t n = dist.system().size();
  std::vector<bool> used(n, false);
  auto claim = [&](std::size_t i) {
    if (i >= n) throw IndexOutOfRange("ci_test index out of range");
    if (used[i]) throw InvalidArgument("ci_test sets must be disjoint and exclude the tested variable");
    used[i] = true;
  };
  claim(a);
  for (std::size_t i : b) claim(i);
  for (std::size_t i : s) claim(i);
  if (b.empty()) return true;

  std::vector<std::size_t> order{a};
  order.insert(order.end(), b.begin(), b.end());
  order.insert(order.end(), s.begin(), s.end());
  const Distribution m = marginal(dist, order);

  const VariableSystem& sys = dist.system();
  const std::uint64_t na = sys.cardinality(a);
  std::uint64_t nb = 1, ns = 1;
  for (std::size_t i : b) nb *= sys.cardinality(i);
  for (std::size_t i : s) ns *= sys.cardinality(i);

  std::vector<double> pas(na), pbs(nb);
  for (std::uint64_t si = 0; si < ns; ++si) {
    std::fill(pas.begin(), pas.end(), 0.0);
    std::fill(pbs.begin(), pbs.end(), 0.0);
    double ps = 0.0;
    for (std::uint64_t ai = 0; ai < na; ++ai) {
      for (std::uint64_t bi = 0; bi < nb; ++bi) {
        const double w = m[(ai * nb + bi) * ns + si];
        pas[ai] += w;
        pbs[bi] += w;
        ps += w;
      }
    }
    if (!(ps > 0.0)) continue;
    for (std::uint64_t ai = 0; ai < na; ++ai) {
      for (std::uint64_t bi = 0; bi < nb; ++bi) {
        const double lhs = m[(ai * nb + bi) * ns + si] / ps;
        const double rhs = (pas[ai] / ps) * (pbs[bi] / ps);
        if (std::abs(lhs - rhs) > eps) return false;
      }
    }
  }
  return true;
}

bool ci_test(const FactoredModel& model, std::size_t a, std::span<const std::size_t> b,
             std::span<const std::size_t> s, double eps) {
  return ci_test(joint(model), a, b, s, eps);
}

namespace {

std::size_t draw_index(std::span<const double> probs, double u) {
  double total = 0.0;
  for (double p : probs) total += p;
  const double target = u * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) last_positive = k;
    cum += probs[k];
    if (target < cum) return k;
  }
  return last_positive;
}

}  // namespace

std::vector<Assignment> sample(const FactoredModel& model, std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<Assignment> out;
  out.reserve(n);
  const auto& order = model.topological_order();
  for (std::size_t r = 0; r < n; ++r) {
    Assignment a(model.size(), 0);
    for (std::size_t v : order) {
      const std::vector<double> row = model.row(v, a);
      a[v] = draw_index(row, rng.uniform());
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::uint64_t draw_state(const Distribution& dist, double u) {
  return draw_index(dist.weights(), u);
}

}  // namespace equivar
