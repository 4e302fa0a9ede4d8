#include <gtest/gtest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "equivar/equivariance.hpp"
#include "equivar/errors.hpp"
#include "equivar/inference.hpp"
#include "equivar/reparam.hpp"
#include "random_mixtures.hpp"
#include "random_models.hpp"

using namespace equivar;
using testkit::deterministic_table;
using testkit::random_mixture;

namespace {

oracle::Table mixture_oracle(const MixtureModel& mix) {
  oracle::Table t;
  for (std::size_t s = 0; s < mix.component_count(); ++s) {
    for (const auto& [a, w] : oracle::posterior(mix.component(s), {})) {
      std::vector<std::size_t> key{s};
      key.insert(key.end(), a.begin(), a.end());
      t[key] = mix.prior()[s] * w;
    }
  }
  return t;
}

// Thermostat-like mixture: month selects which knob drives temperature.
MixtureModel month_mixture(std::size_t months) {
  std::vector<Variable> vars;
  for (std::size_t m = 0; m < months; ++m) vars.push_back({"knob" + std::to_string(m), {"off", "on"}});
  vars.push_back({"temperature", {"cold", "warm"}});
  VariableSystem sys(vars);
  std::vector<FactoredModel> comps;
  for (std::size_t s = 0; s < months; ++s) {
    std::vector<std::vector<std::size_t>> parents(months + 1);
    parents[months] = {s};
    std::vector<Cpd> cpds(months, Cpd::uniform(2));
    cpds.push_back(Cpd::table({0.9, 0.1, 0.2, 0.8}));
    comps.emplace_back(sys, parents, cpds);
  }
  return MixtureModel(Variable{"month", testkit::labels(months, "m")}, std::vector<double>(months, 1.0 / months),
                      comps);
}

// Machine knob{0..3} -> level (copy) -> out; concept side merges knob/level into bands.
FactoredModel knob_chain() {
  VariableSystem sys(std::vector<Variable>{
      {"knob", {"0", "1", "2", "3"}}, {"level", {"0", "1", "2", "3"}}, {"out", {"off", "on"}}});
  return FactoredModel(sys, {{}, {0}, {1}},
                       {Cpd::uniform(4), deterministic_table(4, {0, 1, 2, 3}), deterministic_table(2, {0, 0, 1, 1})});
}

}  // namespace

TEST(Flatten, MatchesMixtureSemanticsOnRandomMixtures) {
  Rng rng(101);
  for (int k = 0; k < 100; ++k) {
    const MixtureModel mix = random_mixture(rng);
    const Distribution flat = joint(flatten(mix));
    const Distribution direct = mixture_joint(mix);
    const oracle::Table expected = mixture_oracle(mix);
    ASSERT_EQ(flat.size(), expected.size());
    std::uint64_t s = 0;
    for (const auto& [a, w] : expected) {
      EXPECT_NEAR(flat[s], w, 1e-12);
      EXPECT_NEAR(direct[s], w, 1e-12);
      ++s;
    }
    EXPECT_LE(total_variation(flat, direct), 1e-12);
  }
}

TEST(Flatten, SingleVariableActionsAgree) {
  Rng rng(103);
  for (int k = 0; k < 20; ++k) {
    const MixtureModel mix = random_mixture(rng);
    const FactoredModel flat = flatten(mix);
    for_each_action(mix.flat_system(), ActionFamily::Both, 1, [&](const CompoundAction& a) {
      const Distribution lhs = mixture_apply_action(mix, a);
      const Distribution rhs = apply_action(flat, a);
      EXPECT_LE(total_variation(lhs, rhs), 1e-12) << to_string(a, mix.flat_system());
    });
  }
}

TEST(Flatten, KeepsSharedTablesUngated) {
  Rng rng(107);
  const FactoredModel c = testkit::random_model(rng, 3, 3);
  const MixtureModel mix(Variable{"sel", {"a", "b"}}, {0.3, 0.7}, {c, c});
  const FactoredModel flat = flatten(mix);
  EXPECT_TRUE(flat.children(0).empty());
  for (std::size_t j = 1; j < flat.size(); ++j) {
    EXPECT_TRUE(ci_test(flat, j, std::vector<std::size_t>{0}, std::vector<std::size_t>{}));
  }
}

TEST(Flatten, PointMassPriorRecoversComponent) {
  Rng rng(109);
  MixtureModel base = random_mixture(rng);
  std::vector<double> prior(base.component_count(), 0.0);
  prior[1] = 1.0;
  const MixtureModel mix(base.selector(), prior, base.components());
  std::vector<std::size_t> inner;
  for (std::size_t j = 1; j < mix.flat_system().size(); ++j) inner.push_back(j);
  const Distribution m = marginal(joint(flatten(mix)), inner);
  const Distribution c = joint(mix.component(1));
  for (std::uint64_t s = 0; s < c.size(); ++s) EXPECT_NEAR(m[s], c[s], 1e-15);
}

TEST(Flatten, CyclicUnionIsInconsistent) {
  VariableSystem sys(std::vector<Variable>{{"a", {"0", "1"}}, {"b", {"0", "1"}}});
  const FactoredModel ab(sys, {{}, {0}}, {Cpd::uniform(2), Cpd::table({0.9, 0.1, 0.1, 0.9})});
  const FactoredModel ba(sys, {{1}, {}}, {Cpd::table({0.8, 0.2, 0.3, 0.7}), Cpd::uniform(2)});
  const MixtureModel mix(Variable{"sel", {"x", "y"}}, {0.5, 0.5}, {ab, ba});
  EXPECT_THROW(flatten(mix), StructureInconsistent);
  // Direct semantics stay available.
  EXPECT_NEAR(mixture_joint(mix).mass(), 1.0, 1e-12);
}

TEST(Mixture, RejectsBadDeclarations) {
  Rng rng(113);
  const FactoredModel c = testkit::random_model(rng, 2, 2);
  EXPECT_THROW(MixtureModel(Variable{"sel", {"a", "b"}}, {0.5, 0.5}, {c}), InvalidModel);
  EXPECT_THROW(MixtureModel(Variable{"sel", {"a", "b"}}, {0.6, 0.6}, {c, c}), InvalidModel);
}

TEST(ActiveComponent, MatchesConditionedFlatModel) {
  Rng rng(127);
  const MixtureModel mix = random_mixture(rng);
  const FactoredModel flat = flatten(mix);
  std::vector<std::size_t> inner;
  for (std::size_t j = 1; j < mix.flat_system().size(); ++j) inner.push_back(j);
  for (std::size_t s = 0; s < mix.component_count(); ++s) {
    const FactoredModel& c = active_component(mix, mix.selector().domain[s]);
    const Distribution lhs = joint(c);
    const Distribution rhs = marginal(apply_action(flat, Action{ActionKind::Observe, 0, s}), inner);
    for (std::uint64_t u = 0; u < lhs.size(); ++u) EXPECT_NEAR(lhs[u], rhs[u], 1e-12);
  }
  EXPECT_THROW(active_component(mix, "nope"), UnknownSelectorValue);
  EXPECT_THROW(active_component(mix, std::size_t{99}), UnknownSelectorValue);
}

TEST(ActiveComponent, MonthGatesOneKnob) {
  const MixtureModel mix = month_mixture(4);
  const FactoredModel flat = flatten(mix);
  const std::size_t temperature = 5;
  for (std::size_t month = 0; month < 4; ++month) {
    const FactoredModel& c = active_component(mix, month);
    EXPECT_EQ(std::vector<std::size_t>(c.parents(4).begin(), c.parents(4).end()), (std::vector<std::size_t>{month}));
    // Every other knob is independent of temperature once the month is known.
    for (std::size_t knob = 0; knob < 4; ++knob) {
      const bool independent = ci_test(apply_action(flat, Action{ActionKind::Observe, 0, month}), temperature,
                                       std::vector<std::size_t>{knob + 1}, std::vector<std::size_t>{0});
      EXPECT_EQ(independent, knob != month);
    }
  }
}

TEST(CognitiveLoad, SingleVariableAndMonolith) {
  const FactoredModel one(VariableSystem(std::vector<Variable>{{"x", {"a", "b"}}}), {{}}, {Cpd::uniform(2)});
  const CognitiveLoadProfile p = cognitive_load(one);
  EXPECT_EQ(p.max_load, 1u);
  EXPECT_EQ(p.per_action.size(), 4u);

  // Ten knobs into one logistic temperature: everything is one neighborhood.
  std::vector<Variable> vars;
  for (int k = 0; k < 10; ++k) vars.push_back({"knob" + std::to_string(k), {"off", "on"}});
  vars.push_back({"temperature", {"cold", "warm"}});
  std::vector<std::vector<std::size_t>> parents(11);
  for (std::size_t k = 0; k < 10; ++k) parents[10].push_back(k);
  std::vector<Cpd> cpds(10, Cpd::uniform(2));
  std::vector<double> w;
  for (int k = 0; k < 10; ++k) w.push_back(0.3 + 0.05 * k);
  cpds.push_back(Cpd::logistic(-1.5, w));
  const FactoredModel mono(VariableSystem(vars), parents, cpds);
  const CognitiveLoadProfile q = cognitive_load(mono, ActionFamily::Do, 9);
  EXPECT_EQ(q.max_load, 11u);
  EXPECT_FALSE(q.within_limit());
  EXPECT_EQ(q.per_action.size(), 22u);
}

TEST(CognitiveLoad, MonthMixtureStaysSmall) {
  const MixtureModel mix = month_mixture(6);
  const CognitiveLoadProfile p = cognitive_load(mix);
  EXPECT_EQ(p.max_load, 3u);
  EXPECT_TRUE(p.within_limit());
  for (const auto& e : p.per_action) {
    if (e.action.target == 0) {
      EXPECT_EQ(e.load, 1u);
    }
  }
  const CognitiveLoadProfile flat = cognitive_load(flatten(mix));
  EXPECT_GT(flat.max_load, p.max_load);
}

TEST(CognitiveLoad, GatingNeverAddsLoad) {
  Rng rng(131);
  for (int k = 0; k < 30; ++k) {
    const MixtureModel mix = random_mixture(rng);
    const CognitiveLoadProfile gated = cognitive_load(mix);
    const CognitiveLoadProfile flat = cognitive_load(flatten(mix));
    ASSERT_EQ(gated.per_action.size(), flat.per_action.size());
    for (std::size_t e = 0; e < gated.per_action.size(); ++e) {
      if (gated.per_action[e].action.target == 0) continue;
      EXPECT_LE(gated.per_action[e].load, flat.per_action[e].load) << "draw " << k;
    }
  }
}

TEST(SemanticReparam, IdentityReproducesTables) {
  Rng rng(137);
  const FactoredModel m = testkit::random_model(rng, 4, 3);
  const FactoredModel r = semantic_reparam(m, Translation::identity(m.system()), m.all_parents());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& a = m.cpd(i).as_table().probabilities;
    const auto& b = r.cpd(i).as_table().probabilities;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
}

TEST(SemanticReparam, BandsReproducePushforward) {
  const FactoredModel m = knob_chain();
  VariableSystem cs(std::vector<Variable>{{"knob", {"lo", "hi"}}, {"level", {"lo", "hi"}}, {"out", {"off", "on"}}});
  const Translation t(m.system(), cs, {0, 1, 2}, {{0, 0, 1, 1}, {0, 0, 1, 1}, {0, 1}});
  const FactoredModel r = semantic_reparam(m, t, {{}, {0}, {1}});
  EXPECT_LE(total_variation(joint(r), pushforward(joint(m), t)), 1e-12);
  EXPECT_TRUE(verify_brute(m, r, t).holds());
  EXPECT_EQ(r.cpd(1).as_table().probabilities, (std::vector<double>{1, 0, 0, 1}));
}

TEST(SemanticReparam, DetectsMergedValuesWithDifferentEffects) {
  const FactoredModel m = knob_chain();
  VariableSystem cs(std::vector<Variable>{{"knob", {"k03", "k1", "k2"}}, {"level", {"0", "1", "2", "3"}}, {"out", {"off", "on"}}});
  // knob 0 and knob 3 share a concept value but drive level differently.
  const Translation t(m.system(), cs, {0, 1, 2}, {{0, 1, 2, 0}, {0, 1, 2, 3}, {0, 1}});
  EXPECT_THROW(semantic_reparam(m, t, {{}, {0}, {1}}), StructureInconsistent);
  // A concept DAG missing a needed edge cannot even match the joint.
  const Translation id = Translation::identity(m.system());
  EXPECT_THROW(semantic_reparam(m, id, {{}, {}, {1}}), StructureInconsistent);
  EXPECT_THROW(semantic_reparam(m, id, {{2}, {0}, {1}}), StructureInconsistent);
}
