#include "equivar/nir/dataset.hpp"

#include <sstream>

#include "equivar/errors.hpp"
#include "equivar/random.hpp"

namespace equivar::nir {

void DatasetRule::validate() const {
  if (input_dim == 0) throw InvalidArgument("dataset rule: input_dim must be positive");
  if (concepts.empty()) throw InvalidArgument("dataset rule: at least one concept is required");
  for (const auto& c : concepts) {
    if (c.coefficients.size() != input_dim) {
      throw InvalidArgument("dataset rule: concept '" + c.name + "' needs " + std::to_string(input_dim) +
                            " coefficients");
    }
  }
  if (task.weights.size() != concepts.size()) {
    throw InvalidArgument("dataset rule: task needs one weight per concept");
  }
  if (task.name.empty()) throw InvalidArgument("dataset rule: task needs a name");
  if (samples == 0) throw InvalidArgument("dataset rule: samples must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("dataset rule: train_fraction must lie in (0, 1)");
  }
  if (!(low < high)) throw InvalidArgument("dataset rule: low must be below high");
}

std::vector<std::string> DatasetRule::concept_names() const {
  std::vector<std::string> out;
  for (const auto& c : concepts) out.push_back(c.name);
  return out;
}

std::string DatasetRule::describe() const {
  std::ostringstream os;
  os << "x ~ U[" << low << ", " << high << "]^" << input_dim;
  for (const auto& c : concepts) {
    os << "; " << c.name << " := 1[";
    bool first = true;
    for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
      if (c.coefficients[i] == 0.0) continue;
      os << (first ? "" : " + ") << c.coefficients[i] << "*x" << i + 1;
      first = false;
    }
    os << " > " << c.threshold << "]";
  }
  os << "; " << task.name << " := 1[";
  for (std::size_t j = 0; j < concepts.size(); ++j) os << task.weights[j] << "*" << concepts[j].name << " + ";
  os << task.bias << " > 0]";
  return os.str();
}

SyntheticDataset SyntheticDataset::slice(std::size_t begin, std::size_t end) const {
  const auto b = static_cast<Eigen::Index>(begin);
  const auto n = static_cast<Eigen::Index>(end - begin);
  return SyntheticDataset{inputs.middleCols(b, n), concept_labels.middleCols(b, n), task_labels.segment(b, n)};
}

std::vector<std::size_t> concept_labels_of(const DatasetRule& rule, const Eigen::VectorXd& x) {
  std::vector<std::size_t> out;
  for (const auto& c : rule.concepts) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.coefficients.size(); ++i) s += c.coefficients[i] * x(static_cast<Eigen::Index>(i));
    out.push_back(s > c.threshold ? 1 : 0);
  }
  return out;
}

std::size_t task_label_of(const DatasetRule& rule, const std::vector<std::size_t>& concepts) {
  double s = rule.task.bias;
  for (std::size_t j = 0; j < concepts.size(); ++j) s += rule.task.weights[j] * static_cast<double>(concepts[j]);
  return s > 0.0 ? 1 : 0;
}

SyntheticDataset generate(const DatasetRule& rule) {
  rule.validate();
  const auto d = static_cast<Eigen::Index>(rule.input_dim);
  const auto n = static_cast<Eigen::Index>(rule.samples);
  const auto k = static_cast<Eigen::Index>(rule.concepts.size());
  SyntheticDataset out{Eigen::MatrixXd(d, n), Eigen::MatrixXd(k, n), Eigen::VectorXd(n)};
  Rng rng(rule.seed);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < d; ++i) out.inputs(i, s) = rng.uniform(rule.low, rule.high);
    const auto c = concept_labels_of(rule, out.inputs.col(s));
    for (Eigen::Index j = 0; j < k; ++j) out.concept_labels(j, s) = static_cast<double>(c[static_cast<std::size_t>(j)]);
    out.task_labels(s) = static_cast<double>(task_label_of(rule, c));
  }
  return out;
}

std::pair<SyntheticDataset, SyntheticDataset> split(const SyntheticDataset& data, double train_fraction) {
  const auto cut = static_cast<std::size_t>(static_cast<double>(data.size()) * train_fraction);
  return {data.slice(0, cut), data.slice(cut, data.size())};
}

bool consistent(const DatasetRule& rule, const SyntheticDataset& data) {
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    const auto c = concept_labels_of(rule, data.inputs.col(col));
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (data.concept_labels(static_cast<Eigen::Index>(j), col) != static_cast<double>(c[j])) return false;
    }
    if (data.task_labels(col) != static_cast<double>(task_label_of(rule, c))) return false;
  }
  return true;
}

FactoredModel rule_model(const DatasetRule& rule) {
  rule.validate();
  const std::size_t k = rule.concepts.size();
  std::vector<Variable> vars;
  for (const auto& c : rule.concepts) vars.push_back({c.name, {"0", "1"}});
  vars.push_back({rule.task.name, {"0", "1"}});
  std::vector<std::vector<std::size_t>> parents(k + 1);
  std::vector<Cpd> cpds(k, Cpd::uniform(2));
  for (std::size_t j = 0; j < k; ++j) parents[k].push_back(j);
  std::vector<double> table;
  std::vector<std::size_t> cell(k, 0);
  for (std::size_t r = 0; r < (std::size_t{1} << k); ++r) {
    for (std::size_t j = 0; j < k; ++j) cell[j] = r >> (k - 1 - j) & 1;
    const std::size_t y = task_label_of(rule, cell);
    table.push_back(y == 0 ? 1.0 : 0.0);
    table.push_back(y == 1 ? 1.0 : 0.0);
  }
  cpds.push_back(Cpd::table(std::move(table)));
  return FactoredModel(VariableSystem(std::move(vars)), std::move(parents), std::move(cpds));
}

}  // namespace equivar::nir
