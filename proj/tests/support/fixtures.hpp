#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "bntrim/evalharness.hpp"
#include "bntrim/model.hpp"
#include "bntrim/netio.hpp"

namespace bntrim::testing {

inline std::string data_path(const std::string& name) {
  return std::string(BNTRIM_DATA_DIR) + "/" + name;
}

inline BayesianNetwork quiz() { return load_network(data_path("quiz.bn.json")); }
inline BayesianNetwork gbn4() { return load_network(data_path("gbn4.bn.json")); }

/// (C, {Q1,Q2,Q3}, 0.07) with C=+ positive.
inline Classifier quiz_classifier(double threshold = 0.07) {
  return {"C", 0, {"Q1", "Q2", "Q3"}, threshold};
}

/// (C, {F1,F2,F3}, 0.55) with C=+ positive.
inline Classifier gbn4_classifier(double threshold = 0.55) {
  return {"C", 0, {"F1", "F2", "F3"}, threshold};
}

struct RandomInstance {
  BayesianNetwork net;
  Classifier clf;
  CostModel costs;
  bool naive_bayes = false;
};

inline std::vector<double> random_row(std::mt19937_64& rng, int width, double zero_chance) {
  std::vector<double> row(width);
  double sum = 0.0;
  for (auto& p : row) {
    p = uniform01(rng) < zero_chance ? 0.0 : 0.05 + uniform01(rng);
    sum += p;
  }
  if (sum == 0.0) {
    row[rng() % width] = 1.0;
    return row;
  }
  for (auto& p : row) p /= sum;
  // Absorb rounding so rows sum to one as closely as possible.
  double rest = 1.0;
  for (int i = 0; i + 1 < width; ++i) rest -= row[i];
  row[width - 1] = std::max(0.0, rest);
  return row;
}

inline std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, int count, int width,
                                                    double zero_chance) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < count; ++i) rows.push_back(random_row(rng, width, zero_chance));
  return rows;
}

/// Random classifier with up to `max_features` features of 2..`max_values`
/// values. Naive Bayes when `naive_bayes`, otherwise a random DAG over the
/// class, the features, and sometimes one hidden variable. Costs are drawn
/// from {1,2,3}; the budget is a random integer in [0, total cost].
inline RandomInstance random_instance(std::mt19937_64& rng, bool naive_bayes, int max_features = 8,
                                      int max_values = 3, double zero_chance = 0.05) {
  const int nf = 1 + static_cast<int>(rng() % max_features);
  std::vector<Variable> vars{{"C", {"c1", "c0"}}};
  for (int i = 1; i <= nf; ++i) {
    const int card = 2 + static_cast<int>(rng() % (max_values - 1));
    Variable v{"F" + std::to_string(i), {}};
    for (int k = 0; k < card; ++k) v.values.push_back("v" + std::to_string(k));
    vars.push_back(std::move(v));
  }
  const bool hidden = !naive_bayes && rng() % 2 == 0;
  if (hidden) vars.push_back({"H", {"h0", "h1"}});

  std::vector<Cpt> cpts;
  if (naive_bayes) {
    cpts.push_back({"C", {}, random_rows(rng, 1, 2, 0.0)});
    for (int i = 1; i <= nf; ++i)
      cpts.push_back({vars[i].name, {"C"}, random_rows(rng, 2, static_cast<int>(vars[i].cardinality()),
                                                       zero_chance)});
  } else {
    std::vector<int> order(vars.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const Variable& child = vars[order[pos]];
      std::vector<std::string> parents;
      const int want = static_cast<int>(rng() % 3);
      for (int k = 0; k < want && pos > 0; ++k) {
        const std::string& p = vars[order[rng() % pos]].name;
        if (std::find(parents.begin(), parents.end(), p) == parents.end()) parents.push_back(p);
      }
      int rows = 1;
      for (const auto& p : parents)
        for (const auto& v : vars)
          if (v.name == p) rows *= static_cast<int>(v.cardinality());
      cpts.push_back({child.name, parents,
                      random_rows(rng, rows, static_cast<int>(child.cardinality()), zero_chance)});
    }
  }

  Classifier clf;
  clf.class_var = "C";
  clf.positive_value = 0;
  for (int i = 1; i <= nf; ++i) clf.features.push_back(vars[i].name);
  clf.threshold = 0.02 + 0.96 * uniform01(rng);

  CostModel costs;
  double total = 0.0;
  for (const auto& f : clf.features) {
    costs.cost[f] = static_cast<double>(1 + rng() % 3);
    total += costs.cost[f];
  }
  costs.budget = static_cast<double>(rng() % (static_cast<std::uint64_t>(total) + 1));

  BayesianNetwork net(std::move(vars), std::move(cpts));
  const bool nb = is_naive_bayes(net, clf);
  return {std::move(net), std::move(clf), std::move(costs), nb};
}

/// Random subset of the classifier's features.
inline std::vector<std::string> random_subset(std::mt19937_64& rng, const Classifier& clf) {
  std::vector<std::string> out;
  for (const auto& f : clf.features)
    if (rng() % 2) out.push_back(f);
  return out;
}

}  // namespace bntrim::testing
