#include "bntrim/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace bntrim {

FeatureScores info_gain(const BayesianNetwork& net, const Classifier& clf) {
  validate_classifier(net, clf);
  const int c = net.index_of(clf.class_var);
  FeatureScores out;
  for (const auto& f : clf.features) {
    const int v = net.index_of(f);
    Assignment a(net.size());
    // joint[x][k]: Pr(F = x, C = k)
    std::vector<std::array<double, 2>> joint(net.cardinality(v));
    for (int x = 0; x < net.cardinality(v); ++x) {
      a.set(v, x);
      for (int k = 0; k < 2; ++k) {
        a.set(c, k);
        joint[x][k] = marginal(net, a);
      }
    }
    double pc[2] = {0.0, 0.0};
    for (const auto& row : joint) {
      pc[0] += row[0];
      pc[1] += row[1];
    }
    double mi = 0.0;
    for (const auto& row : joint) {
      const double pf = row[0] + row[1];
      for (int k = 0; k < 2; ++k)
        if (row[k] > 0.0) mi += row[k] * std::log2(row[k] / (pf * pc[k]));
    }
    out.emplace_back(f, std::max(0.0, mi));
  }
  return out;
}

std::vector<std::string> ig_select(const FeatureScores& scores, const CostModel& costs) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].second > scores[b].second; });
  double left = costs.budget;
  std::vector<std::string> chosen;
  for (std::size_t i : order) {
    const auto& name = scores[i].first;
    auto it = costs.cost.find(name);
    if (it == costs.cost.end()) throw ModelError("missing cost for feature '" + name + "'");
    if (it->second <= left + 1e-9) {
      chosen.push_back(name);
      left -= it->second;
    }
  }
  return chosen;
}

SelectionReport ig_baseline(const BayesianNetwork& net, const Classifier& clf,
                            const CostModel& costs, bool reoptimize) {
  validate_costs(clf, costs);
  SelectionReport r;
  r.method = reoptimize ? "information-gain-maa" : "information-gain";
  r.scores = info_gain(net, clf);
  std::vector<std::string> picked = ig_select(r.scores, costs);
  // Report in classifier order.
  for (const auto& f : clf.features)
    if (std::find(picked.begin(), picked.end(), f) != picked.end()) r.chosen.push_back(f);
  if (reoptimize) {
    const MaaResult m = maa(net, clf, r.chosen);
    r.threshold = m.interval.representative;
    r.eca = m.score;
  } else {
    Classifier beta = clf;
    beta.features = r.chosen;
    r.threshold = clf.threshold;
    r.eca = eca(net, clf, beta);
  }
  return r;
}

namespace {

// Per full feature instantiation of alpha: Pr(f), alpha's decision, and the
// index of its projection onto beta's features. Per projection: Pr(c | f').
struct Enumeration {
  std::vector<double> mass;
  std::vector<char> alpha_positive;
  std::vector<std::size_t> projection;
  std::vector<double> trimmed_posterior;
  std::vector<char> trimmed_defined;
};

Enumeration enumerate(const BayesianNetwork& net, const Classifier& alpha,
                      const std::vector<std::string>& kept) {
  validate_classifier(net, alpha);
  for (const auto& k : kept)
    if (std::find(alpha.features.begin(), alpha.features.end(), k) == alpha.features.end())
      throw ModelError("'" + k + "' is not a feature of the original classifier");
  const std::vector<int> all = variable_indices(net, alpha.features);
  const std::vector<int> kv = variable_indices(net, kept);
  if (assignment_count(net, all, kMaxFeatureSpace) > kMaxFeatureSpace)
    throw EnumerationGuardError("feature space exceeds 2^20 instantiations");

  Enumeration e;
  const std::size_t proj_size = assignment_count(net, kv, kMaxFeatureSpace);
  e.trimmed_posterior.assign(proj_size, 0.0);
  e.trimmed_defined.assign(proj_size, 0);
  {
    Assignment a(net.size());
    std::size_t p = 0;
    for_each_assignment(net, kv, a, [&] {
      const ClassMass m = class_mass(net, alpha, a);
      if (m.total() > 0.0) {
        e.trimmed_posterior[p] = m.posterior();
        e.trimmed_defined[p] = 1;
      }
      ++p;
    });
  }
  Assignment a(net.size());
  for_each_assignment(net, all, a, [&] {
    const ClassMass m = class_mass(net, alpha, a);
    std::size_t p = 0;
    for (int v : kv) p = p * net.cardinality(v) + a[v];
    e.mass.push_back(m.total());
    e.alpha_positive.push_back(m.total() > 0.0 &&
                               decide(m.posterior(), alpha.threshold) == Label::kPositive);
    e.projection.push_back(p);
  });
  return e;
}

double agreement_at(const Enumeration& e, double threshold) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.mass.size(); ++i) {
    if (e.mass[i] == 0.0) continue;
    const std::size_t p = e.projection[i];
    const bool trimmed_positive = decide(e.trimmed_posterior[p], threshold) == Label::kPositive;
    if (trimmed_positive == static_cast<bool>(e.alpha_positive[i])) s += e.mass[i];
  }
  return s;
}

}  // namespace

double eca_bruteforce(const BayesianNetwork& net, const Classifier& alpha, const Classifier& beta) {
  if (beta.class_var != alpha.class_var || beta.positive_value != alpha.positive_value)
    throw ModelError("eca_bruteforce: trimming must share the class variable");
  return agreement_at(enumerate(net, alpha, beta.features), beta.threshold);
}

BruteForceMaa maa_bruteforce(const BayesianNetwork& net, const Classifier& alpha,
                             const std::vector<std::string>& kept) {
  const Enumeration e = enumerate(net, alpha, kept);
  std::set<double> candidates;
  for (std::size_t p = 0; p < e.trimmed_posterior.size(); ++p)
    if (e.trimmed_defined[p]) candidates.insert(e.trimmed_posterior[p]);
  candidates.insert(std::numeric_limits<double>::infinity());

  BruteForceMaa best{-1.0, 0.0};
  for (double t : candidates) {
    const double s = agreement_at(e, t);
    if (s > best.score + 1e-14) best = {s, t};
  }
  return best;
}

}  // namespace bntrim
