#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "equivar/equivariance.hpp"
#include "equivar/errors.hpp"
#include "equivar/inference.hpp"
#include "equivar/posterior.hpp"

namespace equivar {

namespace {

constexpr std::uint64_t kStateMapLimit = std::uint64_t{1} << 22;

void require_compatible(const FactoredModel& machine, const FactoredModel& human, const Translation& t) {
  if (!(machine.system() == t.source())) {
    throw SystemMismatch("machine model is not over the translation's source system");
  }
  if (!(human.system() == t.target())) {
    throw SystemMismatch("human model is not over the translation's target system");
  }
}

// Compares both sides of the equivariance square for one action at a time,
// reusing cached joints and scratch tables across calls.
class Checker {
 public:
  Checker(const FactoredModel& machine, const FactoredModel& human, const Translation& t, const VerifyOptions& opt)
      : machine_(machine, opt.cap), human_(human, opt.cap), t_(t), opt_(opt) {
    const std::uint64_t hs = human.system().state_count();
    lhs_.assign(hs, 0.0);
    rhs_.assign(hs, 0.0);
    seen_.assign(hs, false);
    const std::uint64_t ms = machine.system().state_count();
    if (ms <= kStateMapLimit) {
      map_.resize(ms);
      for (std::uint64_t s = 0; s < ms; ++s) map_[s] = t.apply_state(s);
    }
  }

  std::uint64_t machine_states() const { return machine_.state_count(); }

  ActionOutcome run(std::span<const Action> action) {
    ActionOutcome out;
    out.human_action = translate_action(action, t_);
    auto lhs = machine_.evaluate(action);
    auto rhs = human_.evaluate(out.human_action);
    if (!lhs || !rhs) {
      out.verdict = Verdict::Undefined;
      return out;
    }
    touched_.clear();
    for (std::size_t k = 0; k < lhs->states.size(); ++k) {
      const std::uint64_t u = map_.empty() ? t_.apply_state(lhs->states[k]) : map_[lhs->states[k]];
      touch(u);
      lhs_[u] += lhs->weights[k];
    }
    for (std::size_t k = 0; k < rhs->states.size(); ++k) {
      touch(rhs->states[k]);
      rhs_[rhs->states[k]] += rhs->weights[k];
    }
    double tv = 0.0, worst = -1.0;
    std::uint64_t worst_state = 0;
    for (std::uint64_t u : touched_) {
      const double d = std::abs(lhs_[u] - rhs_[u]);
      tv += d;
      if (d > worst) {
        worst = d;
        worst_state = u;
      }
    }
    out.discrepancy = 0.5 * tv;
    out.verdict = out.discrepancy <= opt_.tolerance ? Verdict::Pass : Verdict::Fail;
    if (out.verdict == Verdict::Fail) {
      out.counterexample = Counterexample{CompoundAction(action.begin(), action.end()),
                                          t_.target().decode(worst_state), lhs_[worst_state], rhs_[worst_state]};
    }
    for (std::uint64_t u : touched_) {
      lhs_[u] = rhs_[u] = 0.0;
      seen_[u] = false;
    }
    return out;
  }

 private:
  void touch(std::uint64_t u) {
    if (!seen_[u]) {
      seen_[u] = true;
      touched_.push_back(u);
    }
  }

  PosteriorEvaluator machine_;
  PosteriorEvaluator human_;
  const Translation& t_;
  VerifyOptions opt_;
  std::vector<std::uint64_t> map_;
  std::vector<double> lhs_, rhs_;
  std::vector<bool> seen_;
  std::vector<std::uint64_t> touched_;
};

EquivarianceReport empty_report(VerifyMode mode, const Translation& t, const VerifyOptions& opt) {
  EquivarianceReport r;
  r.mode = mode;
  r.tolerance = opt.tolerance;
  r.machine_system = t.source();
  r.human_system = t.target();
  return r;
}

void tally(EquivarianceReport& r, ActionCheck check, std::optional<Counterexample> cx, std::uint64_t cost,
           const VerifyOptions& opt) {
  ++r.evaluations;
  r.cost += cost;
  switch (check.verdict) {
    case Verdict::Pass: ++r.passed; break;
    case Verdict::Fail: ++r.failed; break;
    case Verdict::Undefined: ++r.undefined; break;
    case Verdict::Ambiguous: ++r.ambiguous; break;
  }
  r.max_discrepancy = std::max(r.max_discrepancy, check.discrepancy);
  if (cx && r.counterexamples.size() < opt.max_counterexamples) r.counterexamples.push_back(std::move(*cx));
  if (opt.record_checks) r.checks.push_back(std::move(check));
}

void run_one(Checker& checker, EquivarianceReport& r, std::span<const Action> action, const VerifyOptions& opt) {
  ActionCheck check;
  check.action.assign(action.begin(), action.end());
  std::optional<Counterexample> cx;
  try {
    ActionOutcome o = checker.run(action);
    check.human_action = std::move(o.human_action);
    check.discrepancy = o.discrepancy;
    check.verdict = o.verdict;
    cx = std::move(o.counterexample);
  } catch (const AmbiguousTranslation&) {
    check.verdict = Verdict::Ambiguous;
  }
  tally(r, std::move(check), std::move(cx), checker.machine_states(), opt);
}

std::vector<std::size_t> block_closure(const Translation& t, std::vector<std::size_t> seed) {
  std::vector<bool> in(t.source().size(), false);
  for (std::size_t j : seed) {
    for (std::size_t m : t.block(t.omega(j))) in[m] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (in[j]) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> targets_of(const Translation& t, std::span<const std::size_t> source) {
  std::vector<std::size_t> out;
  for (std::size_t j : source) out.push_back(t.omega(j));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double local_states(const VariableSystem& system, std::span<const std::size_t> subset) {
  double n = 1.0;
  for (std::size_t j : subset) n *= static_cast<double>(system.cardinality(j));
  return n;
}

std::size_t kind_count(ActionFamily family) { return family == ActionFamily::Both ? 2 : 1; }

}  // namespace

ActionOutcome verify_action(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                            std::span<const Action> action, const VerifyOptions& options) {
  require_compatible(machine, human, t);
  validate_action(action, machine.system());
  Checker checker(machine, human, t, options);
  return checker.run(action);
}

ActionOutcome verify_action(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                            const Action& action, const VerifyOptions& options) {
  const Action one[] = {action};
  return verify_action(machine, human, t, std::span<const Action>(one), options);
}

EquivarianceReport verify_brute(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                                ActionFamily family, std::size_t max_compound, const VerifyOptions& options) {
  require_compatible(machine, human, t);
  machine.system().require_enumerable(options.cap, "brute-force verification (machine)");
  human.system().require_enumerable(options.cap, "brute-force verification (human)");
  if (max_compound == 0) throw InvalidArgument("max_compound must be at least 1");
  EquivarianceReport r = empty_report(VerifyMode::Brute, t, options);
  Checker checker(machine, human, t, options);
  run_one(checker, r, {}, options);
  for_each_action(machine.system(), family, max_compound,
                  [&](const CompoundAction& a) { run_one(checker, r, a, options); });
  return r;
}

EquivarianceReport verify_region(const FactoredModel& machine, const FactoredModel& human, const Translation& t,
                                 const std::vector<CompoundAction>& region, const VerifyOptions& options) {
  require_compatible(machine, human, t);
  if (region.empty()) throw InvalidArgument("verify_region: empty region");
  for (const auto& a : region) validate_action(a, machine.system());
  machine.system().require_enumerable(options.cap, "region verification (machine)");
  human.system().require_enumerable(options.cap, "region verification (human)");
  EquivarianceReport r = empty_report(VerifyMode::Region, t, options);
  std::string desc;
  for (const auto& a : region) {
    if (!desc.empty()) desc += "; ";
    desc += to_string(a, machine.system());
  }
  r.region = desc;
  Checker checker(machine, human, t, options);
  for (const auto& a : region) run_one(checker, r, a, options);
  return r;
}

EquivarianceReport verify_ci_preservation(const FactoredModel& machine, const FactoredModel& human,
                                          const Translation& t, std::size_t max_vars,
                                          const VerifyOptions& options) {
  require_compatible(machine, human, t);
  const std::size_t n = machine.size();
  if (n > max_vars) {
    throw StateSpaceTooLarge("CI-preservation enumerates 2^(n-1) conditioning sets per variable; " +
                             std::to_string(n) + " variables exceeds the limit of " + std::to_string(max_vars));
  }
  const Distribution jm = joint(machine, options.cap);
  const Distribution jh = joint(human, options.cap);
  EquivarianceReport r = empty_report(VerifyMode::CIPreservation, t, options);
  const std::uint64_t unit_cost = machine.system().state_count();

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    const bool singleton = t.block(t.omega(i)).size() == 1;
    const std::uint64_t subsets = std::uint64_t{1} << others.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      CiCheck c;
      c.variable = i;
      std::vector<bool> in_s(n, false);
      std::vector<std::size_t> rest;
      for (std::size_t p = 0; p < others.size(); ++p) {
        if (mask >> p & 1) {
          c.conditioning.push_back(others[p]);
          in_s[others[p]] = true;
        } else {
          rest.push_back(others[p]);
        }
      }
      c.machine_holds = ci_test(jm, i, rest, c.conditioning, options.tolerance);
      ++r.evaluations;
      r.cost += unit_cost;

      c.testable = singleton;
      for (std::size_t h = 0; c.testable && h < t.target().size(); ++h) {
        if (h == t.omega(i)) continue;
        auto block = t.block(h);
        const bool first = in_s[block.front()];
        for (std::size_t j : block) {
          if (in_s[j] != first) c.testable = false;
        }
      }
      if (c.testable) {
        const std::size_t hi = t.omega(i);
        const std::vector<std::size_t> hs = targets_of(t, c.conditioning);
        std::vector<bool> in_hs(t.target().size(), false);
        for (std::size_t h : hs) in_hs[h] = true;
        std::vector<std::size_t> hrest;
        for (std::size_t h = 0; h < t.target().size(); ++h) {
          if (h != hi && !in_hs[h]) hrest.push_back(h);
        }
        c.human_holds = ci_test(jh, hi, hrest, hs, options.tolerance);
        if (c.machine_holds == c.human_holds) {
          ++r.passed;
        } else {
          ++r.failed;
        }
      } else {
        ++r.untestable;
      }
      if (options.record_checks) r.ci_checks.push_back(std::move(c));
    }
  }
  return r;
}

EquivarianceReport verify_markov_local(const FactoredModel& machine, const FactoredModel& human,
                                       const Translation& t, ActionFamily family, NeighborhoodMethod method,
                                       const VerifyOptions& options) {
  require_compatible(machine, human, t);
  EquivarianceReport r = empty_report(VerifyMode::MarkovLocal, t, options);
  r.neighborhoods = neighborhoods(machine, method, kDefaultCiTolerance, options.cap);

  std::vector<ActionKind> kinds;
  if (family_includes(family, ActionKind::Observe)) kinds.push_back(ActionKind::Observe);
  if (family_includes(family, ActionKind::Do)) kinds.push_back(ActionKind::Do);

  std::map<std::vector<std::size_t>, bool> baseline_done;
  for (std::size_t i = 0; i < machine.size(); ++i) {
    std::vector<std::size_t> seed = r.neighborhoods[i].members;
    seed.push_back(i);
    const std::vector<std::size_t> local = block_closure(t, seed);
    const std::vector<std::size_t> hlocal = targets_of(t, local);
    const Translation tl = t.restrict(local);
    const std::uint64_t cost = machine.system().subsystem(local).state_count();

    auto compare = [&](std::span<const Action> action, ActionCheck check) {
      std::optional<Counterexample> cx;
      check.scope = i;
      try {
        check.human_action = translate_action(action, t);
        const Distribution lhs = pushforward(query(machine, local, action, options.cap), tl);
        const Distribution rhs = query(human, hlocal, check.human_action, options.cap);
        double tv = 0.0, worst = -1.0;
        std::uint64_t worst_state = 0;
        for (std::uint64_t u = 0; u < lhs.size(); ++u) {
          const double d = std::abs(lhs[u] - rhs[u]);
          tv += d;
          if (d > worst) {
            worst = d;
            worst_state = u;
          }
        }
        check.discrepancy = 0.5 * tv;
        check.verdict = check.discrepancy <= options.tolerance ? Verdict::Pass : Verdict::Fail;
        if (check.verdict == Verdict::Fail) {
          // Lift the local worst state to a full human assignment (others at 0).
          Assignment full(t.target().size(), 0);
          const Assignment part = tl.target().decode(worst_state);
          for (std::size_t k = 0; k < hlocal.size(); ++k) full[hlocal[k]] = part[k];
          cx = Counterexample{check.action, std::move(full), lhs[worst_state], rhs[worst_state]};
        }
      } catch (const AmbiguousTranslation&) {
        check.human_action.clear();
        check.verdict = Verdict::Ambiguous;
      } catch (const ZeroProbabilityEvidence&) {
        check.verdict = Verdict::Undefined;
      }
      tally(r, std::move(check), std::move(cx), cost, options);
    };

    if (!baseline_done[local]) {
      baseline_done[local] = true;
      compare({}, ActionCheck{});
    }
    for (ActionKind kind : kinds) {
      for (std::size_t v = 0; v < machine.system().cardinality(i); ++v) {
        const Action a[] = {Action{kind, i, v}};
        ActionCheck check;
        check.action.assign(std::begin(a), std::end(a));
        compare(a, std::move(check));
      }
    }
  }
  return r;
}

SurrogateChainReport verify_surrogate_chain(const FactoredModel& original, const FactoredModel& surrogate,
                                            const FactoredModel& human, const Translation& t_os,
                                            const Translation& t_sh, ActionFamily family,
                                            std::size_t max_compound, const VerifyOptions& options) {
  SurrogateChainReport out;
  out.original_to_surrogate = verify_brute(original, surrogate, t_os, family, max_compound, options);
  out.surrogate_to_human = verify_brute(surrogate, human, t_sh, family, max_compound, options);
  out.composed = verify_brute(original, human, compose(t_os, t_sh), family, max_compound, options);
  return out;
}

double count_actions(const VariableSystem& system, ActionFamily family, std::size_t max_compound) {
  // Elementary symmetric sums of the per-variable choice counts.
  const std::size_t kmax = std::min(max_compound, system.size());
  std::vector<double> e(kmax + 1, 0.0);
  e[0] = 1.0;
  const double kinds = static_cast<double>(kind_count(family));
  for (std::size_t i = 0; i < system.size(); ++i) {
    const double c = kinds * static_cast<double>(system.cardinality(i));
    for (std::size_t k = kmax; k >= 1; --k) e[k] += e[k - 1] * c;
  }
  double total = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) total += e[k];
  return total;
}

double estimate_brute_cost(const VariableSystem& machine, ActionFamily family, std::size_t max_compound) {
  return (1.0 + count_actions(machine, family, max_compound)) * machine.state_count_approx();
}

double estimate_markov_cost(const FactoredModel& machine, const Translation& t, ActionFamily family) {
  std::map<std::vector<std::size_t>, bool> seen;
  double total = 0.0;
  const double kinds = static_cast<double>(kind_count(family));
  for (std::size_t i = 0; i < machine.size(); ++i) {
    std::vector<std::size_t> seed = machine.markov_blanket(i);
    seed.push_back(i);
    const auto local = block_closure(t, seed);
    const double states = local_states(machine.system(), local);
    if (!seen[local]) {
      seen[local] = true;
      total += states;
    }
    total += kinds * static_cast<double>(machine.system().cardinality(i)) * states;
  }
  return total;
}

std::string_view to_string(VerifyMode mode) {
  switch (mode) {
    case VerifyMode::Brute: return "brute";
    case VerifyMode::CIPreservation: return "ci";
    case VerifyMode::MarkovLocal: return "markov";
    case VerifyMode::Region: return "region";
  }
  return "brute";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undefined: return "undefined";
    case Verdict::Ambiguous: return "ambiguous";
  }
  return "pass";
}

VerifyMode parse_verify_mode(std::string_view text) {
  if (text == "brute") return VerifyMode::Brute;
  if (text == "ci") return VerifyMode::CIPreservation;
  if (text == "markov") return VerifyMode::MarkovLocal;
  if (text == "region") return VerifyMode::Region;
  throw InvalidArgument("unknown verification mode '" + std::string(text) + "' (expected brute, ci, markov or region)");
}

}  // namespace equivar
