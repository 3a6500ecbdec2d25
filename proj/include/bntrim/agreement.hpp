#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bntrim/inference.hpp"
#include "bntrim/model.hpp"

namespace bntrim {

/// Largest feature-instantiation space any exhaustive routine will walk.
inline constexpr std::size_t kMaxFeatureSpace = std::size_t{1} << 20;

/// Relative tolerance under which two class posteriors share a cutoff.
inline constexpr double kPosteriorTieTolerance = 1e-9;

/// Bit i selects the classifier's i-th feature.
using FeatureMask = std::uint32_t;

/// One instantiation f' of the kept features.
struct InstanceRow {
  std::vector<int> values;  ///< value index per kept feature
  double mar = 0.0;         ///< Pr(f')
  double cpr = 0.0;         ///< Pr(c | f')
  double pos = 0.0;         ///< Pr(original classifier says positive | f')
  double pos_mass = 0.0;    ///< pos * mar, accumulated directly
  double neg_mass = 0.0;    ///< (1 - pos) * mar, accumulated directly

  static InstanceRow from(double mar, double cpr, double pos);
};

/// Rows with mar > 0, sorted by nondecreasing cpr.
struct InstanceTable {
  std::vector<std::string> kept;
  std::vector<InstanceRow> rows;
};

/// Thresholds t with lo < t <= hi classify every kept instantiation the
/// same way. lo = -inf marks "everything positive"; hi = +inf marks
/// "everything negative".
struct ThresholdInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double representative = 0.0;

  bool all_negative() const { return std::isinf(hi); }
  bool contains(double t) const { return t > lo && t <= hi; }
};

struct MaaResult {
  double score = 0.0;
  ThresholdInterval interval;
};

/// Sweeps every cutoff of a table and returns the best agreement with its
/// threshold interval. Ties keep the lowest interval.
MaaResult compute_maa(const InstanceTable& table);

/// ECA of the table's trimming at a fixed threshold: rows with
/// cpr >= threshold contribute pos*mar, the others (1-pos)*mar.
double table_eca(const InstanceTable& table, double threshold);

/// Sum of max(pos, 1 - pos) * mar.
double table_mpa(const InstanceTable& table);

/// Precomputes Pr(f, c), Pr(f, c̄) and the original decision for every full
/// feature instantiation f, then answers subset queries by projection.
/// Immutable after construction.
class AgreementContext {
 public:
  /// Throws EnumerationGuardError when the feature space exceeds
  /// kMaxFeatureSpace.
  AgreementContext(const BayesianNetwork& net, const Classifier& clf);

  const Classifier& classifier() const { return clf_; }
  std::size_t num_features() const { return feature_vars_.size(); }
  FeatureMask full_mask() const;
  /// Throws ModelError for a name outside the classifier's features.
  FeatureMask mask_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(FeatureMask mask) const;

  InstanceTable instance_table(FeatureMask kept) const;
  double mpa(FeatureMask kept) const { return table_mpa(instance_table(kept)); }
  MaaResult maa(FeatureMask kept) const { return compute_maa(instance_table(kept)); }
  double eca(FeatureMask kept, double threshold) const {
    return table_eca(instance_table(kept), threshold);
  }
  /// Probability that the original classifier decides positive.
  double positive_rate() const;

 private:
  Classifier clf_;
  std::vector<int> feature_vars_;
  std::vector<std::size_t> cards_;
  std::vector<std::size_t> strides_;
  std::vector<double> pos_joint_;
  std::vector<double> neg_joint_;
  std::vector<char> decision_;
};

InstanceTable build_instance_table(const BayesianNetwork& net, const Classifier& clf,
                                   const std::vector<std::string>& kept);

/// ECA(alpha, beta) via the instance table of beta's features.
/// Throws ModelError unless beta is a trimming of alpha.
double eca(const BayesianNetwork& net, const Classifier& alpha, const Classifier& beta);

/// SDP_{C,T}(X | e), enumerated through inference queries.
double sdp(const BayesianNetwork& net, const Classifier& clf, const std::vector<std::string>& x,
           const Assignment& e);

/// Two-threshold expected SDP:
///   sum_{y,z} [C_T(y z e) = C_T'(y e)] * Pr(y z | e)
/// with T = clf.threshold. Enumerated through inference queries only.
double esdp_two_threshold(const BayesianNetwork& net, const Classifier& clf,
                          double trimmed_threshold, const std::vector<std::string>& z,
                          const std::vector<std::string>& y, const Assignment& e);
double esdp_two_threshold(const BayesianNetwork& net, const Classifier& clf,
                          double trimmed_threshold, const std::vector<std::string>& z,
                          const std::vector<std::string>& y);

double mpa(const BayesianNetwork& net, const Classifier& clf,
           const std::vector<std::string>& kept);

MaaResult maa(const BayesianNetwork& net, const Classifier& clf,
              const std::vector<std::string>& kept);

}  // namespace bntrim
