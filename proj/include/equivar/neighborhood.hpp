#pragma once

#include <cstdint>
#include <vector>

#include "equivar/distribution.hpp"
#include "equivar/factored_model.hpp"
#include "equivar/inference.hpp"

namespace equivar {

// Conditioning set that renders `variable` independent of everything else.
struct MarkovNeighborhood {
  std::size_t variable = 0;
  std::vector<std::size_t> members;  // ascending, never contains `variable`
  bool exact = true;                 // false when read off the graph

  std::size_t cardinality() const { return members.size(); }
};

// Smallest S with V_i independent of the rest given S. Candidates are searched
// by ascending size, lexicographically within a size, so ties go to the
// lexicographically smallest index set.
MarkovNeighborhood minimal_neighborhood(const Distribution& joint, std::size_t i,
                                        double eps = kDefaultCiTolerance);
MarkovNeighborhood minimal_neighborhood(const FactoredModel& model, std::size_t i,
                                        double eps = kDefaultCiTolerance,
                                        std::uint64_t cap = kDefaultStateCap);

enum class NeighborhoodMethod {
  Auto,        // exact search when the joint is enumerable, graph blanket otherwise
  Exact,
  Structural,  // parents, children and co-parents (always a valid conditioning set)
};

MarkovNeighborhood neighborhood(const FactoredModel& model, std::size_t i,
                                NeighborhoodMethod method = NeighborhoodMethod::Auto,
                                double eps = kDefaultCiTolerance, std::uint64_t cap = kDefaultStateCap);

// All neighborhoods of a model, sharing one joint for exact searches.
std::vector<MarkovNeighborhood> neighborhoods(const FactoredModel& model,
                                              NeighborhoodMethod method = NeighborhoodMethod::Auto,
                                              double eps = kDefaultCiTolerance,
                                              std::uint64_t cap = kDefaultStateCap);

}  // namespace equivar
