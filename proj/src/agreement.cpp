#include "bntrim/agreement.hpp"

#include <algorithm>
#include <set>

namespace bntrim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scores closer than this are treated as equal so floating-point noise in the
// running sum cannot move the chosen interval away from the lowest one.
constexpr double kScoreTieTolerance = 1e-14;

bool same_posterior(double a, double b) {
  return std::abs(a - b) <= kPosteriorTieTolerance * std::max(std::abs(a), std::abs(b));
}

void check_subset_of_features(const Classifier& clf, const std::vector<std::string>& names,
                              const char* what) {
  for (const auto& n : names)
    if (std::find(clf.features.begin(), clf.features.end(), n) == clf.features.end())
      throw ModelError(std::string(what) + ": '" + n + "' is not a feature of the classifier");
}

}  // namespace

InstanceRow InstanceRow::from(double mar, double cpr, double pos) {
  InstanceRow r;
  r.mar = mar;
  r.cpr = cpr;
  r.pos = pos;
  r.pos_mass = pos * mar;
  r.neg_mass = (1.0 - pos) * mar;
  return r;
}

MaaResult compute_maa(const InstanceTable& table) {
  const auto& rows = table.rows;
  if (rows.empty()) throw ModelError("compute_maa: empty instance table");

  // Group rows whose posteriors coincide; a cutoff may only fall between groups.
  struct Group {
    double lo_cpr, hi_cpr, pos_mass, neg_mass;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    if (!groups.empty() && same_posterior(groups.back().hi_cpr, r.cpr)) {
      auto& g = groups.back();
      g.hi_cpr = r.cpr;
      g.pos_mass += r.pos_mass;
      g.neg_mass += r.neg_mass;
    } else {
      groups.push_back({r.cpr, r.cpr, r.pos_mass, r.neg_mass});
    }
  }

  // Cutoff k: groups [0, k) classified negative, [k, G) positive.
  const std::size_t n = groups.size();
  std::vector<double> neg_prefix(n + 1, 0.0), pos_suffix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) neg_prefix[k + 1] = neg_prefix[k] + groups[k].neg_mass;
  for (std::size_t k = n; k-- > 0;) pos_suffix[k] = pos_suffix[k + 1] + groups[k].pos_mass;

  std::size_t best_k = 0;
  double best = neg_prefix[0] + pos_suffix[0];
  for (std::size_t k = 1; k <= n; ++k) {
    const double m = neg_prefix[k] + pos_suffix[k];
    if (m > best + kScoreTieTolerance) {
      best = m;
      best_k = k;
    }
  }

  MaaResult out;
  out.score = best;
  auto& iv = out.interval;
  iv.lo = best_k == 0 ? -kInf : groups[best_k - 1].hi_cpr;
  iv.hi = best_k == n ? kInf : groups[best_k].lo_cpr;
  iv.representative = std::isinf(iv.hi) ? iv.lo + 1.0 : iv.hi;
  return out;
}

double table_eca(const InstanceTable& table, double threshold) {
  double s = 0.0;
  for (const auto& r : table.rows) s += decide(r.cpr, threshold) == Label::kPositive ? r.pos_mass : r.neg_mass;
  return s;
}

double table_mpa(const InstanceTable& table) {
  double s = 0.0;
  for (const auto& r : table.rows) s += std::max(r.pos_mass, r.neg_mass);
  return s;
}

AgreementContext::AgreementContext(const BayesianNetwork& net, const Classifier& clf) : clf_(clf) {
  validate_classifier(net, clf);
  if (clf.features.size() > 32) throw EnumerationGuardError("more than 32 features");
  feature_vars_ = variable_indices(net, clf.features);
  const std::size_t space = assignment_count(net, feature_vars_, kMaxFeatureSpace);
  if (space > kMaxFeatureSpace)
    throw EnumerationGuardError("feature space exceeds 2^20 instantiations");

  const std::size_t nf = feature_vars_.size();
  cards_.resize(nf);
  strides_.resize(nf);
  std::size_t stride = 1;
  for (std::size_t k = nf; k-- > 0;) {
    cards_[k] = static_cast<std::size_t>(net.cardinality(feature_vars_[k]));
    strides_[k] = stride;
    stride *= cards_[k];
  }

  pos_joint_.reserve(space);
  neg_joint_.reserve(space);
  decision_.reserve(space);
  Assignment a(net.size());
  for_each_assignment(net, feature_vars_, a, [&] {
    const ClassMass m = class_mass(net, clf, a);
    pos_joint_.push_back(m.positive);
    neg_joint_.push_back(m.negative);
    const bool positive = m.total() > 0.0 && decide(m.posterior(), clf.threshold) == Label::kPositive;
    decision_.push_back(positive ? 1 : 0);
  });
}

FeatureMask AgreementContext::full_mask() const {
  const std::size_t n = num_features();
  return n == 32 ? ~FeatureMask{0} : (FeatureMask{1} << n) - 1;
}

FeatureMask AgreementContext::mask_of(const std::vector<std::string>& names) const {
  FeatureMask m = 0;
  for (const auto& name : names) {
    auto it = std::find(clf_.features.begin(), clf_.features.end(), name);
    if (it == clf_.features.end()) throw ModelError("'" + name + "' is not a feature of the classifier");
    m |= FeatureMask{1} << (it - clf_.features.begin());
  }
  return m;
}

std::vector<std::string> AgreementContext::names_of(FeatureMask mask) const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < num_features(); ++k)
    if (mask >> k & 1u) out.push_back(clf_.features[k]);
  return out;
}

InstanceTable AgreementContext::instance_table(FeatureMask kept) const {
  std::vector<std::size_t> kept_idx;
  for (std::size_t k = 0; k < num_features(); ++k)
    if (kept >> k & 1u) kept_idx.push_back(k);
  std::vector<std::size_t> proj_stride(kept_idx.size());
  std::size_t proj_size = 1;
  for (std::size_t j = kept_idx.size(); j-- > 0;) {
    proj_stride[j] = proj_size;
    proj_size *= cards_[kept_idx[j]];
  }

  std::vector<double> pos(proj_size, 0.0), neg(proj_size, 0.0);
  std::vector<double> says_pos(proj_size, 0.0), says_neg(proj_size, 0.0);
  for (std::size_t i = 0; i < pos_joint_.size(); ++i) {
    std::size_t p = 0;
    for (std::size_t j = 0; j < kept_idx.size(); ++j) {
      const std::size_t k = kept_idx[j];
      p += (i / strides_[k]) % cards_[k] * proj_stride[j];
    }
    pos[p] += pos_joint_[i];
    neg[p] += neg_joint_[i];
    (decision_[i] ? says_pos : says_neg)[p] += pos_joint_[i] + neg_joint_[i];
  }

  InstanceTable table;
  table.kept = names_of(kept);
  for (std::size_t p = 0; p < proj_size; ++p) {
    const double mar = pos[p] + neg[p];
    if (!(mar > 0.0)) continue;
    InstanceRow r;
    r.values.resize(kept_idx.size());
    for (std::size_t j = 0; j < kept_idx.size(); ++j)
      r.values[j] = static_cast<int>(p / proj_stride[j] % cards_[kept_idx[j]]);
    r.mar = mar;
    r.cpr = pos[p] / mar;
    r.pos_mass = says_pos[p];
    r.neg_mass = says_neg[p];
    r.pos = says_pos[p] / mar;
    table.rows.push_back(std::move(r));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const InstanceRow& a, const InstanceRow& b) { return a.cpr < b.cpr; });
  return table;
}

double AgreementContext::positive_rate() const {
  double s = 0.0;
  for (std::size_t i = 0; i < pos_joint_.size(); ++i)
    if (decision_[i]) s += pos_joint_[i] + neg_joint_[i];
  return s;
}

InstanceTable build_instance_table(const BayesianNetwork& net, const Classifier& clf,
                                   const std::vector<std::string>& kept) {
  check_subset_of_features(clf, kept, "build_instance_table");
  AgreementContext ctx(net, clf);
  return ctx.instance_table(ctx.mask_of(kept));
}

double eca(const BayesianNetwork& net, const Classifier& alpha, const Classifier& beta) {
  if (beta.class_var != alpha.class_var || beta.positive_value != alpha.positive_value)
    throw ModelError("eca: trimming must share the class variable and positive value");
  check_subset_of_features(alpha, beta.features, "eca");
  if (!(beta.threshold >= 0.0 && beta.threshold <= 1.0))
    throw ModelError("eca: trimmed threshold must lie in [0,1]");
  AgreementContext ctx(net, alpha);
  return ctx.eca(ctx.mask_of(beta.features), beta.threshold);
}

double sdp(const BayesianNetwork& net, const Classifier& clf, const std::vector<std::string>& x,
           const Assignment& e) {
  validate_classifier(net, clf);
  check_subset_of_features(clf, x, "sdp");
  const std::vector<int> xs = variable_indices(net, x);
  const int c = net.index_of(clf.class_var);
  if (e.assigned(c)) throw ModelError("sdp: evidence must not assign the class variable");
  for (int v : xs)
    if (e.assigned(v)) throw ModelError("sdp: observed set overlaps the evidence");

  const ClassMass at_e = class_mass(net, clf, e);
  const Label current = decide(at_e.posterior(), clf.threshold);
  const double pe = at_e.total();

  Assignment a = e;
  double same = 0.0;
  for_each_assignment(net, xs, a, [&] {
    const ClassMass m = class_mass(net, clf, a);
    if (m.total() > 0.0 && decide(m.posterior(), clf.threshold) == current) same += m.total();
  });
  return same / pe;
}

double esdp_two_threshold(const BayesianNetwork& net, const Classifier& clf,
                          double trimmed_threshold, const std::vector<std::string>& z,
                          const std::vector<std::string>& y, const Assignment& e) {
  validate_classifier(net, clf);
  check_subset_of_features(clf, z, "esdp");
  check_subset_of_features(clf, y, "esdp");
  std::set<std::string> ys(y.begin(), y.end());
  for (const auto& name : z)
    if (ys.count(name)) throw ModelError("esdp: sets Z and Y overlap on '" + name + "'");
  const std::vector<int> zs = variable_indices(net, z);
  const std::vector<int> yv = variable_indices(net, y);
  for (int v : zs)
    if (e.assigned(v)) throw ModelError("esdp: Z overlaps the evidence");
  for (int v : yv)
    if (e.assigned(v)) throw ModelError("esdp: Y overlaps the evidence");

  const double pe = class_mass(net, clf, e).total();
  if (!(pe > 0.0)) throw ZeroEvidenceError("esdp: evidence has probability zero");

  Assignment a = e;
  double agree = 0.0;
  for_each_assignment(net, yv, a, [&] {
    const ClassMass at_y = class_mass(net, clf, a);
    if (!(at_y.total() > 0.0)) return;
    const Label trimmed = decide(at_y.posterior(), trimmed_threshold);
    for_each_assignment(net, zs, a, [&] {
      const ClassMass m = class_mass(net, clf, a);
      if (m.total() > 0.0 && decide(m.posterior(), clf.threshold) == trimmed) agree += m.total();
    });
  });
  return agree / pe;
}

double esdp_two_threshold(const BayesianNetwork& net, const Classifier& clf,
                          double trimmed_threshold, const std::vector<std::string>& z,
                          const std::vector<std::string>& y) {
  return esdp_two_threshold(net, clf, trimmed_threshold, z, y, Assignment(net.size()));
}

double mpa(const BayesianNetwork& net, const Classifier& clf, const std::vector<std::string>& kept) {
  check_subset_of_features(clf, kept, "mpa");
  AgreementContext ctx(net, clf);
  return ctx.mpa(ctx.mask_of(kept));
}

MaaResult maa(const BayesianNetwork& net, const Classifier& clf, const std::vector<std::string>& kept) {
  check_subset_of_features(clf, kept, "maa");
  AgreementContext ctx(net, clf);
  return ctx.maa(ctx.mask_of(kept));
}

}  // namespace bntrim
