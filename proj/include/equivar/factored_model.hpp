#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "equivar/variable_system.hpp"

namespace equivar {

// Conditional probability distribution of one variable given its parents.
//
// A table stores one probability vector per parent assignment, rows in odometer
// order over the parents (last parent fastest). A logistic CPD is a compact form
// for a binary child with many parents: P(child = 1) = logistic(bias + sum_k
// weights[k] * value_index(parent_k)).
class Cpd {
 public:
  struct Table {
    std::vector<double> probabilities;
    bool operator==(const Table&) const = default;
  };
  struct Logistic {
    double bias = 0.0;
    std::vector<double> weights;
    bool operator==(const Logistic&) const = default;
  };

  static Cpd table(std::vector<double> probabilities) { return Cpd(Table{std::move(probabilities)}); }
  static Cpd logistic(double bias, std::vector<double> weights) {
    return Cpd(Logistic{bias, std::move(weights)});
  }
  // A root whose whole mass sits on `value`.
  static Cpd point_mass(std::size_t cardinality, std::size_t value);
  static Cpd uniform(std::size_t cardinality, std::size_t rows = 1);

  bool is_table() const { return std::holds_alternative<Table>(form_); }
  const Table& as_table() const { return std::get<Table>(form_); }
  const Logistic& as_logistic() const { return std::get<Logistic>(form_); }

  bool operator==(const Cpd&) const = default;

 private:
  explicit Cpd(Table t) : form_(std::move(t)) {}
  explicit Cpd(Logistic l) : form_(std::move(l)) {}

  std::variant<Table, Logistic> form_;
};

// A DAG-factored distribution over a VariableSystem. Immutable once built; the
// constructor enforces every structural invariant and throws InvalidModel.
class FactoredModel {
 public:
  FactoredModel(VariableSystem system, std::vector<std::vector<std::size_t>> parents,
                std::vector<Cpd> cpds, std::vector<std::size_t> parameter_vars = {});

  const VariableSystem& system() const { return system_; }
  std::size_t size() const { return system_.size(); }

  std::span<const std::size_t> parents(std::size_t i) const { return parents_[i]; }
  const std::vector<std::vector<std::size_t>>& all_parents() const { return parents_; }
  const Cpd& cpd(std::size_t i) const { return cpds_[i]; }
  const std::vector<Cpd>& cpds() const { return cpds_; }
  const std::vector<std::size_t>& parameter_vars() const { return parameter_vars_; }
  bool is_parameter(std::size_t i) const;

  const std::vector<std::size_t>& topological_order() const { return order_; }
  std::vector<std::size_t> children(std::size_t i) const;
  // Parents, children and co-parents, ascending.
  std::vector<std::size_t> markov_blanket(std::size_t i) const;
  // All ancestors of `seeds`, including the seeds, as a membership mask.
  std::vector<bool> ancestral_closure(std::span<const std::size_t> seeds) const;

  // Number of parent assignments of variable i (saturating).
  std::uint64_t row_count(std::size_t i) const;
  // Row index of the parent assignment found in a full joint assignment.
  std::uint64_t row_index(std::size_t i, std::span<const std::size_t> assignment) const;
  // P(V_i = value | parents as set in `assignment`).
  double conditional(std::size_t i, std::size_t value, std::span<const std::size_t> assignment) const;
  // Probability vector of V_i for the parent assignment found in `assignment`.
  std::vector<double> row(std::size_t i, std::span<const std::size_t> assignment) const;

  // Copy with variable i's parents and CPD replaced.
  FactoredModel with_cpd(std::size_t i, std::vector<std::size_t> parents, Cpd cpd) const;

 private:
  VariableSystem system_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<Cpd> cpds_;
  std::vector<std::size_t> parameter_vars_;
  std::vector<std::vector<std::uint64_t>> parent_strides_;
  std::vector<std::size_t> order_;
};

}  // namespace equivar
