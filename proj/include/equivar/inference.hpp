#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "equivar/action.hpp"
#include "equivar/distribution.hpp"
#include "equivar/factored_model.hpp"

namespace equivar {

// Exact joint by enumerating the factored product. Throws StateSpaceTooLarge.
Distribution joint(const FactoredModel& model, std::uint64_t cap = kDefaultStateCap);

// Truncated factorization: V_target loses its parents and becomes a point mass.
FactoredModel intervene(const FactoredModel& model, std::size_t target, std::size_t value);

// Posterior after a (possibly compound) action. Do parts are applied first by
// truncated factorization, then the joint is conditioned on the Observe parts.
// Throws ZeroProbabilityEvidence when the observed event has zero mass.
Distribution apply_action(const FactoredModel& model, const Action& action,
                          std::uint64_t cap = kDefaultStateCap);
Distribution apply_action(const FactoredModel& model, std::span<const Action> action,
                          std::uint64_t cap = kDefaultStateCap);

// Bayesian conditioning of a dense table on observed values.
Distribution condition(const Distribution& dist, std::span<const Action> observations);

// Sums out everything outside `subset`; the result keeps `subset`'s order.
// Throws EmptySubset, IndexOutOfRange.
Distribution marginal(const Distribution& dist, std::span<const std::size_t> subset);

// Exact marginal over `subset` after `action`, by variable elimination on the
// factored model. Never builds the full joint, so it works on models far past
// the enumeration cap as long as intermediate factors stay under `cap`.
Distribution query(const FactoredModel& model, std::span<const std::size_t> subset,
                   std::span<const Action> action = {}, std::uint64_t cap = kDefaultStateCap);

// V_a independent of V_b given V_s, checked on every conditioning assignment
// with positive mass. Requires a not in b or s and b, s disjoint.
inline constexpr double kDefaultCiTolerance = 1e-9;
bool ci_test(const Distribution& dist, std::size_t a, std::span<const std::size_t> b,
             std::span<const std::size_t> s, double eps = kDefaultCiTolerance);
bool ci_test(const FactoredModel& model, std::size_t a, std::span<const std::size_t> b,
             std::span<const std::size_t> s, double eps = kDefaultCiTolerance);

// Ancestral sampling in topological order, deterministic in `seed`.
std::vector<Assignment> sample(const FactoredModel& model, std::uint64_t seed, std::size_t n);

// Draws a joint state from a dense table given a uniform variate in [0, 1).
std::uint64_t draw_state(const Distribution& dist, double u);

}  // namespace equivar
