#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bntrim/errors.hpp"

namespace bntrim {

/// Absolute tolerance on CPT row sums.
inline constexpr double kRowSumTolerance = 1e-9;

struct Variable {
  std::string name;
  std::vector<std::string> values;

  std::size_t cardinality() const { return values.size(); }
  /// Index of a value label, or nullopt.
  std::optional<int> value_index(const std::string& label) const;

  bool operator==(const Variable&) const = default;
};

/// Conditional probability table. Rows are row-major over `parents`, with
/// the last parent varying fastest; each row has one entry per child value.
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;

  bool operator==(const Cpt&) const = default;
};

/// Result of structural validation. Empty `violations` means valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_network(const std::vector<Variable>& variables,
                                  const std::vector<Cpt>& cpts);

/// Discrete Bayesian network. Immutable once constructed; the constructor
/// validates and throws ModelError listing every violation.
class BayesianNetwork {
 public:
  BayesianNetwork(std::vector<Variable> variables, std::vector<Cpt> cpts);

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int v) const { return variables_[v]; }
  /// Index of a variable; throws ModelError for an unknown name.
  int index_of(const std::string& name) const;
  std::optional<int> find(const std::string& name) const;
  int cardinality(int v) const {
    return static_cast<int>(variables_[v].values.size());
  }

  /// CPTs in the order they were given.
  const std::vector<Cpt>& cpts() const { return cpts_; }
  /// CPT whose child is variable `v`.
  const Cpt& cpt_of(int v) const { return cpts_[cpt_index_[v]]; }
  /// Parent indices of variable `v`, in CPT declaration order.
  const std::vector<int>& parents(int v) const { return parents_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  /// Parents always precede children.
  const std::vector<int>& topological_order() const { return order_; }

  /// Row of `v`'s CPT selected by a full assignment of its parents.
  std::size_t row_index(int v, const std::vector<int>& assignment) const;
  double probability(int v, const std::vector<int>& assignment) const {
    return cpt_of(v).rows[row_index(v, assignment)][assignment[v]];
  }

  bool operator==(const BayesianNetwork& other) const {
    return variables_ == other.variables_ && cpts_ == other.cpts_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  std::map<std::string, int> index_;
  std::vector<std::size_t> cpt_index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> order_;
};

/// Binary Bayesian classifier (class variable, positive value, features,
/// threshold): positive iff Pr(positive | features) >= threshold.
struct Classifier {
  std::string class_var;
  int positive_value = 0;
  std::vector<std::string> features;
  double threshold = 0.5;
};

/// Throws ModelError when the classifier does not fit the network.
void validate_classifier(const BayesianNetwork& net, const Classifier& clf);

/// Feature costs and a budget.
struct CostModel {
  std::map<std::string, double> cost;
  double budget = 0.0;

  /// Unit cost for every feature.
  static CostModel unit(const std::vector<std::string>& features,
                        double budget);
};

/// Throws ModelError on a missing or non-positive cost or negative budget.
void validate_costs(const Classifier& clf, const CostModel& costs);

/// Class variable is a root and every feature's only parent is the class.
bool is_naive_bayes(const BayesianNetwork& net, const Classifier& clf);

/// True iff `subset` and `features \ subset` are d-separated by the class
/// variable. Throws ModelError when `subset` is not within the features.
bool cond_independent_given_class(const BayesianNetwork& net,
                                  const Classifier& clf,
                                  const std::vector<std::string>& subset);

/// General d-separation test of X and Y given Z (variable indices).
bool d_separated(const BayesianNetwork& net, const std::vector<int>& x,
                 const std::vector<int>& y, const std::vector<int>& z);

}  // namespace bntrim
