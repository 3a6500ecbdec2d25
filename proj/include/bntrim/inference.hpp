#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bntrim/model.hpp"

namespace bntrim {

/// Partial assignment over a network's variables, indexed by variable index.
/// Unassigned entries hold kUnassigned.
class Assignment {
 public:
  static constexpr int kUnassigned = -1;

  explicit Assignment(std::size_t num_vars) : values_(num_vars, kUnassigned) {}
  /// Builds from (variable, value label) pairs; throws ModelError on
  /// unknown names or labels.
  Assignment(const BayesianNetwork& net,
             const std::vector<std::pair<std::string, std::string>>& labels);

  int operator[](int v) const { return values_[v]; }
  void set(int v, int value) { values_[v] = value; }
  void clear(int v) { values_[v] = kUnassigned; }
  bool assigned(int v) const { return values_[v] != kUnassigned; }
  bool full() const;
  std::size_t size() const { return values_.size(); }
  const std::vector<int>& values() const { return values_; }

 private:
  std::vector<int> values_;
};

/// Chain-rule product of CPT entries. Throws ModelError for a partial
/// assignment.
double joint_prob(const BayesianNetwork& net, const Assignment& a);

/// Sum of joint_prob over every completion of `a`. Only ancestors of the
/// assigned variables are enumerated; the rest sum out to one.
double marginal(const BayesianNetwork& net, const Assignment& a);

/// Pr(positive, a) and Pr(negative, a) for evidence `a` (class unassigned).
struct ClassMass {
  double positive = 0.0;
  double negative = 0.0;

  double total() const { return positive + negative; }
  /// Pr(positive | a); throws ZeroEvidenceError when total() == 0.
  double posterior() const;
};

ClassMass class_mass(const BayesianNetwork& net, const Classifier& clf, const Assignment& a);

/// Pr(c | a). Throws ZeroEvidenceError when Pr(a) = 0.
double posterior_class(const BayesianNetwork& net, const Classifier& clf, const Assignment& a);

enum class Label { kNegative = 0, kPositive = 1 };

/// Positive iff Pr(c | a) >= clf.threshold. `a` must assign every feature.
Label classify(const BayesianNetwork& net, const Classifier& clf, const Assignment& a);

/// Threshold test shared by every classification path.
inline Label decide(double posterior, double threshold) {
  return posterior >= threshold ? Label::kPositive : Label::kNegative;
}

/// Naive Bayes classifier in the log-odds domain:
///   log O(c | f) = log O(c) + sum_i w(f_i),  w(x) = log Pr(x|c)/Pr(x|c̄).
/// Zero CPT entries give signed infinities. A feature value impossible
/// under both classes has NaN weight (zero-probability evidence).
struct LogOddsModel {
  double prior_log_odds = 0.0;
  /// Parallel to the classifier's features; one weight per feature value.
  std::vector<std::vector<double>> weights;
  double threshold_log_odds = 0.0;
  std::vector<int> feature_vars;

  /// Throws ModelError unless is_naive_bayes(net, clf).
  static LogOddsModel build(const BayesianNetwork& net, const Classifier& clf);
};

/// prior_log_odds plus the weights of the assigned feature values. Features
/// left unassigned are skipped.
double nb_log_odds(const LogOddsModel& model, const Assignment& a);

/// Classification in the log-odds domain: positive iff log-odds >= λ.
Label nb_classify(const LogOddsModel& model, const Assignment& a);

/// Mixed-radix enumeration of all assignments to `vars`, written into `a`.
/// Calls fn() once per assignment; the last variable varies fastest.
template <typename Fn>
void for_each_assignment(const BayesianNetwork& net, const std::vector<int>& vars,
                         Assignment& a, Fn&& fn) {
  for (int v : vars) a.set(v, 0);
  while (true) {
    fn();
    int k = static_cast<int>(vars.size()) - 1;
    for (; k >= 0; --k) {
      const int v = vars[k];
      if (a[v] + 1 < net.cardinality(v)) {
        a.set(v, a[v] + 1);
        break;
      }
      a.set(v, 0);
    }
    if (k < 0) break;
  }
  for (int v : vars) a.clear(v);
}

/// Number of joint assignments of `vars`, saturating at `cap + 1`.
std::size_t assignment_count(const BayesianNetwork& net, const std::vector<int>& vars,
                             std::size_t cap);

std::vector<int> variable_indices(const BayesianNetwork& net,
                                  const std::vector<std::string>& names);

}  // namespace bntrim
