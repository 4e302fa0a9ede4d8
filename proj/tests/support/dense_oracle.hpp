#pragma once

// Brute-force reference semantics over explicit assignment lists. Deliberately
// shares nothing with the library's inference code beyond reading CPD tables.

#include <cmath>
#include <map>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/factored_model.hpp"

namespace equivar::oracle {

using Table = std::map<std::vector<std::size_t>, double>;

inline std::vector<std::vector<std::size_t>> all_assignments(const std::vector<std::size_t>& cards) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t card : cards) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out) {
      for (std::size_t v = 0; v < card; ++v) {
        auto a = prefix;
        a.push_back(v);
        next.push_back(std::move(a));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline double cpd_entry(const FactoredModel& m, std::size_t i, const std::vector<std::size_t>& a) {
  const auto& ps = m.parents(i);
  std::size_t row = 0;
  for (std::size_t p : ps) row = row * m.system().cardinality(p) + a[p];
  return m.cpd(i).as_table().probabilities[row * m.system().cardinality(i) + a[i]];
}

inline std::vector<std::size_t> cards_of(const FactoredModel& m) {
  std::vector<std::size_t> cards;
  for (std::size_t i = 0; i < m.size(); ++i) cards.push_back(m.system().cardinality(i));
  return cards;
}

// P(v) with do-targets' factors replaced by indicators, then observed values
// enforced and renormalized. Returns an empty table on zero evidence.
inline Table posterior(const FactoredModel& m, const std::vector<Action>& action) {
  Table t;
  double mass = 0.0;
  for (const auto& a : all_assignments(cards_of(m))) {
    double w = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Action* act = nullptr;
      for (const auto& x : action) {
        if (x.target == i) act = &x;
      }
      if (act && a[i] != act->value) {
        w = 0.0;
      } else if (!act || act->kind == ActionKind::Observe) {
        w *= cpd_entry(m, i, a);
      }
    }
    t[a] = w;
    mass += w;
  }
  if (mass == 0.0) return {};
  for (auto& [k, w] : t) w /= mass;
  return t;
}

inline Table project(const Table& t, const std::vector<std::size_t>& subset) {
  Table out;
  for (const auto& [a, w] : t) {
    std::vector<std::size_t> key;
    for (std::size_t i : subset) key.push_back(a[i]);
    out[key] += w;
  }
  return out;
}

inline bool independent(const Table& joint, std::size_t a, const std::vector<std::size_t>& b,
                        const std::vector<std::size_t>& s, double eps) {
  if (b.empty()) return true;
  std::vector<std::size_t> abs_{a};
  abs_.insert(abs_.end(), b.begin(), b.end());
  abs_.insert(abs_.end(), s.begin(), s.end());
  std::vector<std::size_t> as_{a};
  as_.insert(as_.end(), s.begin(), s.end());
  std::vector<std::size_t> bs_(b);
  bs_.insert(bs_.end(), s.begin(), s.end());
  const Table pabs = project(joint, abs_), pas = project(joint, as_), pbs = project(joint, bs_),
              ps = project(joint, s);
  for (const auto& [key, w] : pabs) {
    std::vector<std::size_t> sk(key.begin() + 1 + static_cast<std::ptrdiff_t>(b.size()), key.end());
    const double p_s = ps.at(sk);
    if (p_s == 0.0) continue;
    std::vector<std::size_t> ak{key[0]};
    ak.insert(ak.end(), sk.begin(), sk.end());
    std::vector<std::size_t> bk(key.begin() + 1, key.end());
    const double lhs = w / p_s;
    const double rhs = (pas.at(ak) / p_s) * (pbs.at(bk) / p_s);
    if (std::abs(lhs - rhs) > eps) return false;
  }
  return true;
}

}  // namespace equivar::oracle
