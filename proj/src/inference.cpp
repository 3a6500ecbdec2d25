#include "bntrim/inference.hpp"

#include <cmath>
#include <limits>

namespace bntrim {

Assignment::Assignment(const BayesianNetwork& net,
                       const std::vector<std::pair<std::string, std::string>>& labels)
    : values_(net.size(), kUnassigned) {
  for (const auto& [name, label] : labels) {
    const int v = net.index_of(name);
    auto idx = net.variable(v).value_index(label);
    if (!idx) throw ModelError("variable '" + name + "' has no value '" + label + "'");
    values_[v] = *idx;
  }
}

bool Assignment::full() const {
  for (int x : values_)
    if (x == kUnassigned) return false;
  return true;
}

double joint_prob(const BayesianNetwork& net, const Assignment& a) {
  if (a.size() != net.size() || !a.full())
    throw ModelError("joint_prob requires a full assignment");
  double p = 1.0;
  for (int v : net.topological_order()) {
    p *= net.probability(v, a.values());
    if (p == 0.0) return 0.0;
  }
  return p;
}

double marginal(const BayesianNetwork& net, const Assignment& a) {
  const std::size_t n = net.size();
  std::vector<char> relevant(n, 0);
  std::vector<int> stack;
  for (std::size_t v = 0; v < n; ++v)
    if (a.assigned(static_cast<int>(v))) stack.push_back(static_cast<int>(v));
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = 1;
    for (int p : net.parents(v)) stack.push_back(p);
  }
  std::vector<int> factors, hidden;
  for (int v : net.topological_order()) {
    if (!relevant[v]) continue;
    factors.push_back(v);
    if (!a.assigned(v)) hidden.push_back(v);
  }

  Assignment work = a;
  double total = 0.0;
  for_each_assignment(net, hidden, work, [&] {
    double p = 1.0;
    for (int v : factors) {
      p *= net.probability(v, work.values());
      if (p == 0.0) break;
    }
    total += p;
  });
  return total;
}

double ClassMass::posterior() const {
  const double t = total();
  if (!(t > 0.0)) throw ZeroEvidenceError("posterior undefined: evidence has probability zero");
  return positive / t;
}

ClassMass class_mass(const BayesianNetwork& net, const Classifier& clf, const Assignment& a) {
  const int c = net.index_of(clf.class_var);
  Assignment work = a;
  ClassMass m;
  work.set(c, clf.positive_value);
  m.positive = marginal(net, work);
  work.set(c, 1 - clf.positive_value);
  m.negative = marginal(net, work);
  return m;
}

double posterior_class(const BayesianNetwork& net, const Classifier& clf, const Assignment& a) {
  return class_mass(net, clf, a).posterior();
}

Label classify(const BayesianNetwork& net, const Classifier& clf, const Assignment& a) {
  for (const auto& f : clf.features)
    if (!a.assigned(net.index_of(f)))
      throw ModelError("classify requires every feature to be assigned ('" + f + "' missing)");
  return decide(posterior_class(net, clf, a), clf.threshold);
}

namespace {

double log_ratio(double num, double den) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (num == 0.0 && den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (den == 0.0) return inf;
  if (num == 0.0) return -inf;
  return std::log(num) - std::log(den);
}

}  // namespace

LogOddsModel LogOddsModel::build(const BayesianNetwork& net, const Classifier& clf) {
  validate_classifier(net, clf);
  if (!is_naive_bayes(net, clf)) throw ModelError("log-odds model requires a naive Bayes classifier");
  const int c = net.index_of(clf.class_var);
  const int pos = clf.positive_value;
  const int neg = 1 - pos;
  LogOddsModel m;
  const auto& prior = net.cpt_of(c).rows.front();
  m.prior_log_odds = log_ratio(prior[pos], prior[neg]);
  m.threshold_log_odds = log_ratio(clf.threshold, 1.0 - clf.threshold);
  for (const auto& f : clf.features) {
    const int v = net.index_of(f);
    const auto& rows = net.cpt_of(v).rows;
    std::vector<double> w;
    for (int x = 0; x < net.cardinality(v); ++x) w.push_back(log_ratio(rows[pos][x], rows[neg][x]));
    m.weights.push_back(std::move(w));
    m.feature_vars.push_back(v);
  }
  return m;
}

double nb_log_odds(const LogOddsModel& model, const Assignment& a) {
  double s = model.prior_log_odds;
  for (std::size_t i = 0; i < model.feature_vars.size(); ++i) {
    const int v = model.feature_vars[i];
    if (a.assigned(v)) s += model.weights[i][a[v]];
  }
  return s;
}

Label nb_classify(const LogOddsModel& model, const Assignment& a) {
  const double s = nb_log_odds(model, a);
  if (std::isnan(s)) throw ZeroEvidenceError("log-odds undefined: evidence has probability zero");
  return s >= model.threshold_log_odds ? Label::kPositive : Label::kNegative;
}

std::size_t assignment_count(const BayesianNetwork& net, const std::vector<int>& vars,
                             std::size_t cap) {
  std::size_t n = 1;
  for (int v : vars) {
    n *= static_cast<std::size_t>(net.cardinality(v));
    if (n > cap) return cap + 1;
  }
  return n;
}

std::vector<int> variable_indices(const BayesianNetwork& net,
                                  const std::vector<std::string>& names) {
  std::vector<int> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(net.index_of(n));
  return out;
}

}  // namespace bntrim
