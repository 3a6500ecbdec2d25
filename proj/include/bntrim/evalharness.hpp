#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bntrim/agreement.hpp"
#include "bntrim/inference.hpp"
#include "bntrim/model.hpp"
#include "bntrim/netio.hpp"

namespace bntrim {

using Domains = std::map<std::string, std::vector<std::string>>;

struct LearnOptions {
  /// Additive (Laplace) smoothing added to every CPT count.
  double smoothing = 1.0;
  /// Feature columns to model; unset means every non-class column.
  std::optional<std::vector<std::string>> features;
  /// Label treated as the positive class; empty picks the minority label
  /// (ties go to the label that sorts last).
  std::string positive_label;
  /// Value lists per column; defaults to the labels present in the data.
  const Domains* domains = nullptr;
};

struct LearnedModel {
  BayesianNetwork net;
  Classifier clf;
};

/// Naive Bayes by smoothed maximum likelihood, threshold 0.5. Throws
/// ModelError for an empty dataset, a class column without exactly two
/// labels, or a CPT row with no counts and no smoothing.
LearnedModel learn_nb(const Dataset& data, const LearnOptions& opts = {});

/// Label chosen as positive when none is given.
std::string default_positive_label(const Dataset& data);

/// Every subset with total cost within budget, by size then lexicographic
/// feature position. Throws EnumerationGuardError beyond 20 features.
std::vector<std::vector<std::string>> enumerate_feasible(const Classifier& clf,
                                                         const CostModel& costs);

struct CvOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  double smoothing = 1.0;
  std::string positive_label;
  const Domains* domains = nullptr;
};

/// Stratified k-fold accuracy of naive Bayes restricted to `subset`, each
/// held-out row classified at threshold 0.5. Folds: each class's rows are
/// shuffled by a seeded permutation, then dealt round-robin.
double cv_accuracy(const Dataset& data, const std::vector<std::string>& subset,
                   const CvOptions& opts = {});

/// Fold index per row under the rule used by cv_accuracy.
std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed);

struct BudgetRule {
  enum class Kind { kAbsolute, kFraction };
  Kind kind = Kind::kFraction;
  double value = 0.5;

  /// Absolute budget, or ceil(value * num_features) for a fraction.
  double resolve(std::size_t num_features) const;
};

struct EvalConfig {
  double train_fraction = 0.8;
  int folds = 10;
  std::uint64_t seed = 0;
  double smoothing = 1.0;
  BudgetRule budget;
  /// Score each subset at threshold 0.5 instead of its MAA-optimal one.
  bool fixed_threshold = false;
  std::string positive_label;
};

struct ScatterRow {
  std::vector<std::string> subset;
  double eca = 0.0;
  double threshold = 0.0;
  double cv_accuracy = 0.0;
  bool optimal_eca = false;
  bool optimal_accuracy = false;

  /// "feasible", "optimal-eca", "optimal-accuracy", or both optimal markers
  /// joined by ';' when one subset wins both.
  std::string marker() const;
};

struct TestScore {
  std::vector<std::string> subset;
  double threshold = 0.0;
  double test_agreement = 0.0;
  double test_accuracy = 0.0;
};

struct ScatterReport {
  std::vector<ScatterRow> rows;
  TestScore optimal_eca;
  TestScore optimal_accuracy;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

/// Seeded stratified split into (train, test) row indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    const Dataset& data, double train_fraction, std::uint64_t seed);

/// Learns the full classifier on the training split, scores every feasible
/// subset by agreement and cross-validated accuracy, and evaluates the two
/// winners on the test split.
ScatterReport scatter(const Dataset& data, const EvalConfig& config);

/// Header `subset,eca,cv_accuracy,marker`; subset names joined by ';'.
std::string scatter_csv(const ScatterReport& report);
/// Object with `optimal_eca` and `optimal_accuracy`, each carrying
/// `subset`, `threshold`, `test_agreement`, `test_accuracy`.
std::string scatter_summary_json(const ScatterReport& report);

/// Forward sample of every variable.
Assignment sample_assignment(const BayesianNetwork& net, std::mt19937_64& rng);

/// Rows forward-sampled from a network, one column per variable.
Dataset sample_dataset(const BayesianNetwork& net, std::size_t rows, std::uint64_t seed,
                       const std::string& class_column);

/// Random binary naive Bayes model (class "C" with labels "+"/"-", features
/// F1..Fn) and `rows` samples drawn from it.
Dataset synthetic_dataset(int num_features, std::size_t rows, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

}  // namespace bntrim
