#include "equivar/neighborhood.hpp"

#include <string>

#include "equivar/errors.hpp"

namespace equivar {

MarkovNeighborhood minimal_neighborhood(const Distribution& joint, std::size_t i, double eps) {
  const std::size_t n = joint.system().size();
  if (i >= n) throw IndexOutOfRange("neighborhood: variable index " + std::to_string(i) + " out of range");
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) others.push_back(j);
  }
  const std::size_t m = others.size();
  for (std::size_t k = 0; k <= m; ++k) {
    std::vector<std::size_t> pick(k);
    for (std::size_t j = 0; j < k; ++j) pick[j] = j;
    while (true) {
      std::vector<bool> chosen(m, false);
      std::vector<std::size_t> s, rest;
      for (std::size_t p : pick) chosen[p] = true;
      for (std::size_t p = 0; p < m; ++p) (chosen[p] ? s : rest).push_back(others[p]);
      if (ci_test(joint, i, rest, s, eps)) return MarkovNeighborhood{i, std::move(s), true};
      std::size_t j = k;
      while (j-- > 0 && pick[j] == m - k + j) {
      }
      if (j == static_cast<std::size_t>(-1)) break;
      ++pick[j];
      for (std::size_t q = j + 1; q < k; ++q) pick[q] = pick[q - 1] + 1;
    }
  }
  // Unreachable: S = everything else always separates.
  return MarkovNeighborhood{i, others, true};
}

MarkovNeighborhood minimal_neighborhood(const FactoredModel& model, std::size_t i, double eps,
                                        std::uint64_t cap) {
  return minimal_neighborhood(joint(model, cap), i, eps);
}

MarkovNeighborhood neighborhood(const FactoredModel& model, std::size_t i, NeighborhoodMethod method,
                                double eps, std::uint64_t cap) {
  if (i >= model.size()) throw IndexOutOfRange("neighborhood: variable index out of range");
  if (method == NeighborhoodMethod::Structural ||
      (method == NeighborhoodMethod::Auto && !model.system().enumerable(cap))) {
    return MarkovNeighborhood{i, model.markov_blanket(i), false};
  }
  return minimal_neighborhood(model, i, eps, cap);
}

std::vector<MarkovNeighborhood> neighborhoods(const FactoredModel& model, NeighborhoodMethod method, double eps,
                                              std::uint64_t cap) {
  std::vector<MarkovNeighborhood> out;
  out.reserve(model.size());
  const bool exact = method == NeighborhoodMethod::Exact ||
                     (method == NeighborhoodMethod::Auto && model.system().enumerable(cap));
  if (!exact) {
    for (std::size_t i = 0; i < model.size(); ++i) out.push_back({i, model.markov_blanket(i), false});
    return out;
  }
  const Distribution j = joint(model, cap);
  for (std::size_t i = 0; i < model.size(); ++i) out.push_back(minimal_neighborhood(j, i, eps));
  return out;
}

}  // namespace equivar
