#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bntrim/agreement.hpp"
#include "bntrim/model.hpp"

namespace bntrim {

/// Per-feature scores in the classifier's feature order.
using FeatureScores = std::vector<std::pair<std::string, double>>;

/// Mutual information I(C; F_i) in bits under the model distribution.
FeatureScores info_gain(const BayesianNetwork& net, const Classifier& clf);

/// Greedy by descending score, skipping features that no longer fit the
/// remaining budget. Ties keep input order.
std::vector<std::string> ig_select(const FeatureScores& scores, const CostModel& costs);

struct SelectionReport {
  std::string method;
  std::vector<std::string> chosen;
  double threshold = 0.0;
  double eca = 0.0;
  FeatureScores scores;
};

/// IG selection evaluated at the original threshold; with `reoptimize` the
/// threshold is the MAA-optimal one for the chosen subset instead.
SelectionReport ig_baseline(const BayesianNetwork& net, const Classifier& clf,
                            const CostModel& costs, bool reoptimize = false);

/// Literal sum over every full feature instantiation f of
/// [C_T(f) = C_T'(f')] * Pr(f). Throws EnumerationGuardError past 2^20.
double eca_bruteforce(const BayesianNetwork& net, const Classifier& alpha, const Classifier& beta);

struct BruteForceMaa {
  double score = 0.0;
  /// Maximizing threshold; +inf for the all-negative candidate.
  double threshold = 0.0;
};

/// Maximum of eca_bruteforce over the candidate thresholds: every distinct
/// Pr(c | f') plus an all-negative sentinel. Ties keep the smallest.
BruteForceMaa maa_bruteforce(const BayesianNetwork& net, const Classifier& alpha,
                             const std::vector<std::string>& kept);

}  // namespace bntrim
