#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bntrim/agreement.hpp"
#include "bntrim/model.hpp"

namespace bntrim {

enum class BranchOrder {
  kMpaDescending,  ///< descending single-feature MPA, ties by input order
  kInputOrder,
};

struct SearchOptions {
  BranchOrder branch_order = BranchOrder::kMpaDescending;
  /// Use MPA as the MAA value. Unset means "when is_naive_bayes holds".
  std::optional<bool> use_nb_fast_path;
  /// Worker threads; 1 runs the sequential search.
  int parallel = 1;
  /// One line per node: I, E, b, action, value.
  std::ostream* trace = nullptr;
};

struct SearchStats {
  std::size_t maa_evaluations = 0;
  std::size_t mpa_evaluations = 0;
  std::size_t nodes_expanded = 0;
  std::size_t subtrees_pruned = 0;
};

struct TrimResult {
  std::vector<std::string> best_features;
  double best_score = 0.0;
  ThresholdInterval threshold;
  SearchStats stats;
};

/// Branch-and-bound search for the within-budget feature subset of maximum
/// achievable agreement, bounding each subtree by the MPA of the features
/// not yet excluded.
TrimResult eca_trim(const BayesianNetwork& net, const Classifier& clf, const CostModel& costs,
                    const SearchOptions& opts = {});

/// Naive Bayes specialization: MAA equals MPA and is monotone, so agreement
/// is evaluated only on budget-exhausting subsets. Throws ModelError for a
/// classifier that is not naive Bayes.
TrimResult nb_trim(const BayesianNetwork& net, const Classifier& clf, const CostModel& costs,
                   const SearchOptions& opts = {});

/// Enumerates every within-budget subset (size first, then lexicographic by
/// feature position). Throws EnumerationGuardError beyond 2^20 subsets.
TrimResult exhaustive_trim(const BayesianNetwork& net, const Classifier& clf,
                           const CostModel& costs);

}  // namespace bntrim
