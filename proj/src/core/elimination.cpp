// Variable elimination over the factored representation.

#include <algorithm>
#include <limits>
#include <numeric>

#include "equivar/errors.hpp"
#include "equivar/inference.hpp"

namespace equivar {

namespace {

struct Factor {
  std::vector<std::size_t> vars;  // ascending
  std::vector<std::size_t> cards;
  std::vector<double> table;      // odometer over vars
};

std::vector<std::uint64_t> strides_of(const std::vector<std::size_t>& cards) {
  std::vector<std::uint64_t> s(cards.size());
  std::uint64_t stride = 1;
  for (std::size_t k = cards.size(); k-- > 0;) {
    s[k] = stride;
    stride *= cards[k];
  }
  return s;
}

std::uint64_t checked_size(const std::vector<std::size_t>& cards, std::uint64_t cap) {
  const std::uint64_t size = saturating_product(cards);
  if (size > cap) {
    throw StateSpaceTooLarge("variable elimination needs a factor with " + std::to_string(size) +
                             " entries, cap is " + std::to_string(cap));
  }
  return size;
}

// Strides of `f` laid out against `vars` (0 for variables f does not mention).
std::vector<std::uint64_t> aligned_strides(const Factor& f, const std::vector<std::size_t>& vars) {
  const auto own = strides_of(f.cards);
  std::vector<std::uint64_t> out(vars.size(), 0);
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    const auto it = std::lower_bound(vars.begin(), vars.end(), f.vars[k]);
    out[static_cast<std::size_t>(it - vars.begin())] = own[k];
  }
  return out;
}

Factor multiply(const std::vector<const Factor*>& factors, const VariableSystem& sys, std::uint64_t cap) {
  Factor out;
  for (const Factor* f : factors) out.vars.insert(out.vars.end(), f->vars.begin(), f->vars.end());
  std::sort(out.vars.begin(), out.vars.end());
  out.vars.erase(std::unique(out.vars.begin(), out.vars.end()), out.vars.end());
  for (std::size_t v : out.vars) out.cards.push_back(sys.cardinality(v));
  out.table.assign(checked_size(out.cards, cap), 1.0);

  for (const Factor* f : factors) {
    const auto strides = aligned_strides(*f, out.vars);
    std::vector<std::size_t> a(out.vars.size(), 0);
    std::uint64_t idx = 0;
    for (double& x : out.table) {
      x *= f->table[idx];
      for (std::size_t k = a.size(); k-- > 0;) {
        if (++a[k] < out.cards[k]) {
          idx += strides[k];
          break;
        }
        idx -= strides[k] * (out.cards[k] - 1);
        a[k] = 0;
      }
    }
  }
  return out;
}

Factor sum_out(const Factor& f, std::size_t var) {
  const auto pos = static_cast<std::size_t>(std::lower_bound(f.vars.begin(), f.vars.end(), var) - f.vars.begin());
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (k == pos) continue;
    out.vars.push_back(f.vars[k]);
    out.cards.push_back(f.cards[k]);
  }
  out.table.assign(saturating_product(out.cards), 0.0);
  const auto own = strides_of(f.cards);
  std::uint64_t inner = own[pos];
  const std::uint64_t card = f.cards[pos];
  const std::uint64_t outer = f.table.size() / (inner * card);
  for (std::uint64_t o = 0; o < outer; ++o) {
    for (std::uint64_t v = 0; v < card; ++v) {
      const std::uint64_t src = (o * card + v) * inner;
      for (std::uint64_t i = 0; i < inner; ++i) out.table[o * inner + i] += f.table[src + i];
    }
  }
  return out;
}

Factor cpd_factor(const FactoredModel& model, std::size_t i, std::uint64_t cap) {
  const VariableSystem& sys = model.system();
  Factor f;
  f.vars.assign(model.parents(i).begin(), model.parents(i).end());
  f.vars.push_back(i);
  std::sort(f.vars.begin(), f.vars.end());
  for (std::size_t v : f.vars) f.cards.push_back(sys.cardinality(v));
  f.table.resize(checked_size(f.cards, cap));
  Assignment full(sys.size(), 0);
  std::vector<std::size_t> a(f.vars.size(), 0);
  for (double& x : f.table) {
    for (std::size_t k = 0; k < a.size(); ++k) full[f.vars[k]] = a[k];
    x = model.conditional(i, full[i], full);
    for (std::size_t k = a.size(); k-- > 0;) {
      if (++a[k] < f.cards[k]) break;
      a[k] = 0;
    }
  }
  return f;
}

}  // namespace

Distribution query(const FactoredModel& model, std::span<const std::size_t> subset,
                   std::span<const Action> action, std::uint64_t cap) {
  const VariableSystem& sys = model.system();
  if (subset.empty()) throw EmptySubset("query over an empty subset");
  std::vector<bool> in_subset(sys.size(), false);
  for (std::size_t i : subset) {
    if (i >= sys.size()) throw IndexOutOfRange("query subset index out of range");
    if (in_subset[i]) throw InvalidArgument("query subset repeats a variable");
    in_subset[i] = true;
  }
  validate_action(action, sys);

  FactoredModel m = model;
  std::vector<std::size_t> seeds(subset.begin(), subset.end());
  for (const Action& a : action) {
    if (a.kind == ActionKind::Do) m = intervene(m, a.target, a.value);
    seeds.push_back(a.target);
  }
  const std::vector<bool> relevant = m.ancestral_closure(seeds);

  std::vector<Factor> factors;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (!relevant[i]) continue;
    Factor f = cpd_factor(m, i, cap);
    for (const Action& a : action) {
      if (a.kind != ActionKind::Observe || a.target != i) continue;
      // Zero every entry where V_i disagrees with the observation.
      const auto strides = strides_of(f.cards);
      const auto pos = static_cast<std::size_t>(std::lower_bound(f.vars.begin(), f.vars.end(), i) - f.vars.begin());
      for (std::uint64_t idx = 0; idx < f.table.size(); ++idx) {
        if ((idx / strides[pos]) % f.cards[pos] != a.value) f.table[idx] = 0.0;
      }
    }
    factors.push_back(std::move(f));
  }

  std::vector<std::size_t> eliminate;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (relevant[i] && !in_subset[i]) eliminate.push_back(i);
  }
  while (!eliminate.empty()) {
    // Greedy: eliminate the variable whose combined factor is smallest.
    std::size_t best = 0;
    double best_size = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eliminate.size(); ++k) {
      std::vector<std::size_t> vars;
      for (const Factor& f : factors) {
        if (std::binary_search(f.vars.begin(), f.vars.end(), eliminate[k])) {
          vars.insert(vars.end(), f.vars.begin(), f.vars.end());
        }
      }
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      double size = 1.0;
      for (std::size_t v : vars) size *= static_cast<double>(sys.cardinality(v));
      if (size < best_size) {
        best_size = size;
        best = k;
      }
    }
    const std::size_t var = eliminate[best];
    eliminate.erase(eliminate.begin() + static_cast<std::ptrdiff_t>(best));

    std::vector<const Factor*> touching;
    std::vector<Factor> rest;
    for (const Factor& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), var)) touching.push_back(&f);
    }
    Factor merged = sum_out(multiply(touching, sys, cap), var);
    for (Factor& f : factors) {
      if (!std::binary_search(f.vars.begin(), f.vars.end(), var)) rest.push_back(std::move(f));
    }
    rest.push_back(std::move(merged));
    factors = std::move(rest);
  }

  std::vector<const Factor*> all;
  for (const Factor& f : factors) all.push_back(&f);
  const Factor result = multiply(all, sys, cap);

  const double mass = std::accumulate(result.table.begin(), result.table.end(), 0.0);
  if (!(mass > 0.0)) {
    throw ZeroProbabilityEvidence("conditioning on a zero-probability event: " + to_string(action, sys));
  }

  // result.vars is the ascending subset; permute into the caller's order.
  VariableSystem out_sys = sys.subsystem(subset);
  std::vector<double> out(out_sys.state_count(), 0.0);
  const auto rstrides = strides_of(result.cards);
  std::vector<std::uint64_t> pos_stride(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const auto it = std::lower_bound(result.vars.begin(), result.vars.end(), subset[k]);
    pos_stride[k] = rstrides[static_cast<std::size_t>(it - result.vars.begin())];
  }
  Assignment a(subset.size(), 0);
  for (std::uint64_t s = 0; s < out.size(); ++s) {
    std::uint64_t r = 0;
    for (std::size_t k = 0; k < a.size(); ++k) r += pos_stride[k] * a[k];
    out[s] = result.table[r] / mass;
    for (std::size_t k = a.size(); k-- > 0;) {
      if (++a[k] < out_sys.cardinality(k)) break;
      a[k] = 0;
    }
  }
  return Distribution(std::move(out_sys), std::move(out));
}

}  // namespace equivar
