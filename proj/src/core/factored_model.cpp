#include "equivar/factored_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "equivar/errors.hpp"

namespace equivar {

namespace {

constexpr double kConstructionTolerance = 1e-12;

double logistic(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

Cpd Cpd::point_mass(std::size_t cardinality, std::size_t value) {
  std::vector<double> p(cardinality, 0.0);
  p.at(value) = 1.0;
  return table(std::move(p));
}

Cpd Cpd::uniform(std::size_t cardinality, std::size_t rows) {
  return table(std::vector<double>(cardinality * rows, 1.0 / static_cast<double>(cardinality)));
}

FactoredModel::FactoredModel(VariableSystem system, std::vector<std::vector<std::size_t>> parents,
                             std::vector<Cpd> cpds, std::vector<std::size_t> parameter_vars)
    : system_(std::move(system)),
      parents_(std::move(parents)),
      cpds_(std::move(cpds)),
      parameter_vars_(std::move(parameter_vars)) {
  const std::size_t n = system_.size();
  if (parents_.size() != n || cpds_.size() != n) {
    throw InvalidModel("parents and cpds must have one entry per variable");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& ps = parents_[i];
    for (std::size_t p : ps) {
      if (p >= n) throw InvalidModel("parent index out of range for '" + system_[i].name + "'");
      if (p == i) throw InvalidModel("variable '" + system_[i].name + "' is its own parent");
    }
    auto sorted = ps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidModel("repeated parent of '" + system_[i].name + "'");
    }
  }

  // Kahn's algorithm; ties resolved by smallest index so the order is canonical.
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = parents_[i].size();
    for (std::size_t p : parents_[i]) kids[p].push_back(i);
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    const std::size_t v = *it;
    ready.erase(it);
    order_.push_back(v);
    for (std::size_t c : kids[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (order_.size() != n) throw InvalidModel("parent graph has a cycle");

  parent_strides_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ps = parents_[i];
    auto& strides = parent_strides_[i];
    strides.assign(ps.size(), 0);
    std::uint64_t stride = 1;
    for (std::size_t k = ps.size(); k-- > 0;) {
      strides[k] = stride;
      const std::uint64_t card = system_.cardinality(ps[k]);
      stride = stride > std::numeric_limits<std::uint64_t>::max() / card
                   ? std::numeric_limits<std::uint64_t>::max()
                   : stride * card;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = system_[i].name;
    const std::size_t card = system_.cardinality(i);
    if (cpds_[i].is_table()) {
      const auto& probs = cpds_[i].as_table().probabilities;
      const std::uint64_t rows = row_count(i);
      if (rows == std::numeric_limits<std::uint64_t>::max() || probs.size() != rows * card) {
        throw InvalidModel("cpd of '" + name + "' must have " + std::to_string(rows) + " rows of " +
                           std::to_string(card) + " probabilities");
      }
      for (std::uint64_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (std::size_t k = 0; k < card; ++k) {
          const double p = probs[r * card + k];
          if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidModel("cpd of '" + name + "' has a negative or non-finite entry");
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kConstructionTolerance) {
          throw InvalidModel("cpd row " + std::to_string(r) + " of '" + name + "' sums to " +
                             std::to_string(sum));
        }
      }
    } else {
      const auto& l = cpds_[i].as_logistic();
      if (card != 2) throw InvalidModel("logistic cpd of '" + name + "' needs a binary variable");
      if (l.weights.size() != parents_[i].size()) {
        throw InvalidModel("logistic cpd of '" + name + "' needs one weight per parent");
      }
      if (!std::isfinite(l.bias) ||
          !std::all_of(l.weights.begin(), l.weights.end(), [](double w) { return std::isfinite(w); })) {
        throw InvalidModel("logistic cpd of '" + name + "' has non-finite parameters");
      }
    }
  }

  std::sort(parameter_vars_.begin(), parameter_vars_.end());
  parameter_vars_.erase(std::unique(parameter_vars_.begin(), parameter_vars_.end()),
                        parameter_vars_.end());
  for (std::size_t p : parameter_vars_) {
    if (p >= n) throw InvalidModel("parameter variable index out of range");
    if (!parents_[p].empty()) {
      throw InvalidModel("parameter variable '" + system_[p].name + "' must be a root");
    }
  }
}

bool FactoredModel::is_parameter(std::size_t i) const {
  return std::binary_search(parameter_vars_.begin(), parameter_vars_.end(), i);
}

std::vector<std::size_t> FactoredModel::children(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < size(); ++c) {
    if (std::find(parents_[c].begin(), parents_[c].end(), i) != parents_[c].end()) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> FactoredModel::markov_blanket(std::size_t i) const {
  std::vector<std::size_t> out(parents_[i].begin(), parents_[i].end());
  for (std::size_t c : children(i)) {
    out.push_back(c);
    for (std::size_t p : parents_[c]) {
      if (p != i) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<bool> FactoredModel::ancestral_closure(std::span<const std::size_t> seeds) const {
  std::vector<bool> in(size(), false);
  std::vector<std::size_t> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (in[v]) continue;
    in[v] = true;
    for (std::size_t p : parents_[v]) stack.push_back(p);
  }
  return in;
}

std::uint64_t FactoredModel::row_count(std::size_t i) const {
  std::vector<std::size_t> cards;
  for (std::size_t p : parents_[i]) cards.push_back(system_.cardinality(p));
  return saturating_product(cards);
}

std::uint64_t FactoredModel::row_index(std::size_t i, std::span<const std::size_t> assignment) const {
  const auto& ps = parents_[i];
  const auto& strides = parent_strides_[i];
  std::uint64_t row = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) row += strides[k] * assignment[ps[k]];
  return row;
}

double FactoredModel::conditional(std::size_t i, std::size_t value,
                                  std::span<const std::size_t> assignment) const {
  const Cpd& cpd = cpds_[i];
  if (cpd.is_table()) {
    return cpd.as_table().probabilities[row_index(i, assignment) * system_.cardinality(i) + value];
  }
  const auto& l = cpd.as_logistic();
  double z = l.bias;
  const auto& ps = parents_[i];
  for (std::size_t k = 0; k < ps.size(); ++k) z += l.weights[k] * static_cast<double>(assignment[ps[k]]);
  const double p1 = logistic(z);
  return value == 1 ? p1 : 1.0 - p1;
}

std::vector<double> FactoredModel::row(std::size_t i, std::span<const std::size_t> assignment) const {
  const std::size_t card = system_.cardinality(i);
  std::vector<double> out(card);
  if (cpds_[i].is_table()) {
    const auto& probs = cpds_[i].as_table().probabilities;
    const std::uint64_t r = row_index(i, assignment);
    std::copy_n(probs.begin() + static_cast<std::ptrdiff_t>(r * card), card, out.begin());
  } else {
    for (std::size_t k = 0; k < card; ++k) out[k] = conditional(i, k, assignment);
  }
  return out;
}

FactoredModel FactoredModel::with_cpd(std::size_t i, std::vector<std::size_t> parents, Cpd cpd) const {
  auto ps = parents_;
  auto cs = cpds_;
  ps.at(i) = std::move(parents);
  cs.at(i) = std::move(cpd);
  auto params = parameter_vars_;
  if (!ps[i].empty()) std::erase(params, i);
  return FactoredModel(system_, std::move(ps), std::move(cs), std::move(params));
}

}  // namespace equivar
