#include "equivar/nir/transparency.hpp"

#include "equivar/errors.hpp"

namespace equivar::nir {

namespace {

std::vector<double> normalized_or_uniform(double zero, double one) {
  const double mass = zero + one;
  if (mass == 0.0) return {0.5, 0.5};
  return {zero / mass, one / mass};
}

}  // namespace

Discretization discretize(const NirModel& model, const SyntheticDataset& data, const std::string& task_name) {
  if (data.size() == 0) throw InvalidArgument("discretize: empty dataset");
  const std::size_t k = model.concept_count();
  const std::size_t cells = std::size_t{1} << k;
  const auto kk = static_cast<Eigen::Index>(k);
  std::vector<Cell> acc(cells);
  for (std::size_t r = 0; r < cells; ++r) {
    acc[r].concepts.resize(k);
    for (std::size_t j = 0; j < k; ++j) acc[r].concepts[j] = r >> (k - 1 - j) & 1;
    acc[r].concept_centroid = Eigen::VectorXd::Zero(kk);
    acc[r].weight_centroid = Eigen::VectorXd::Zero(kk);
  }
  for (std::size_t s = 0; s < data.size(); ++s) {
    const NirOutput o = model.forward(Eigen::VectorXd(data.inputs.col(static_cast<Eigen::Index>(s))));
    std::size_t r = 0;
    for (std::size_t j = 0; j < k; ++j) r = r << 1 | (o.concepts(static_cast<Eigen::Index>(j)) > 0.5 ? 1 : 0);
    Cell& c = acc[r];
    ++c.count;
    c.concept_centroid += o.concepts;
    c.weight_centroid += o.weights;
    c.bias_centroid += o.bias;
  }

  Discretization out{FactoredModel(VariableSystem(std::vector<Variable>{{"_", {"0", "1"}}}), {{}}, {Cpd::uniform(2)}),
                     {}, {}, {}};
  std::vector<Variable> vars;
  for (const auto& name : model.concept_names()) vars.push_back({name, {"0", "1"}});
  vars.push_back({task_name, {"0", "1"}});
  std::vector<std::vector<std::size_t>> parents(k + 1);
  std::vector<Cpd> cpds;

  // Empirical concept joint, chain-factorized: C_j | C_0..C_{j-1}.
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t p = 0; p < j; ++p) parents[j].push_back(p);
    std::vector<double> table;
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << j); ++prefix) {
      double counts[2] = {0.0, 0.0};
      for (std::size_t r = 0; r < cells; ++r) {
        if ((r >> (k - j)) != prefix) continue;
        counts[r >> (k - 1 - j) & 1] += static_cast<double>(acc[r].count);
      }
      for (double p : normalized_or_uniform(counts[0], counts[1])) table.push_back(p);
    }
    cpds.push_back(Cpd::table(std::move(table)));
  }
  for (std::size_t p = 0; p < k; ++p) parents[k].push_back(p);
  std::vector<double> y_table;
  for (std::size_t r = 0; r < cells; ++r) {
    Cell& c = acc[r];
    if (c.count == 0) {
      out.empty_cells.push_back(c.concepts);
      y_table.insert(y_table.end(), {0.5, 0.5});
      continue;
    }
    const double n = static_cast<double>(c.count);
    c.concept_centroid /= n;
    c.weight_centroid /= n;
    c.bias_centroid /= n;
    c.y_hat = execute(c.concept_centroid, c.weight_centroid, c.bias_centroid);
    const bool yes = c.y_hat >= 0.5;
    y_table.insert(y_table.end(), {yes ? 0.0 : 1.0, yes ? 1.0 : 0.0});
    CompoundAction a;
    for (std::size_t j = 0; j < k; ++j) a.push_back(Action{ActionKind::Do, j, c.concepts[j]});
    out.region.push_back(std::move(a));
    out.cells.push_back(c);
  }
  cpds.push_back(Cpd::table(std::move(y_table)));
  out.model = FactoredModel(VariableSystem(std::move(vars)), std::move(parents), std::move(cpds));
  return out;
}

TransparencyReport check_transparency(const NirModel& model, const SyntheticDataset& data, const DatasetRule& rule,
                                      const VerifyOptions& options) {
  if (model.concept_names() != rule.concept_names()) {
    throw SystemMismatch("model concepts do not match the dataset rule");
  }
  Discretization d = discretize(model, data, rule.task.name);
  const FactoredModel human = rule_model(rule);
  EquivarianceReport r = verify_region(d.model, human, Translation::identity(human.system()), d.region, options);
  return TransparencyReport{std::move(d), std::move(r)};
}

}  // namespace equivar::nir
