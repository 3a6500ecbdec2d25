#include "bntrim/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace bntrim {

namespace {

// Fisher-Yates driven by raw engine output so the permutation does not
// depend on the standard library's distribution implementations.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::vector<std::size_t>> rows_by_class(const Dataset& data,
                                                    const std::vector<std::string>& labels) {
  const int c = data.column_index(data.class_column);
  std::vector<std::vector<std::size_t>> out(labels.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    auto it = std::find(labels.begin(), labels.end(), data.rows[i][c]);
    out[it - labels.begin()].push_back(i);
  }
  return out;
}

std::vector<std::string> sorted_labels(const Dataset& data, const std::string& column) {
  return data.domains().at(column);
}

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Assignment assignment_for_row(const BayesianNetwork& net, const Dataset& data,
                              const std::vector<std::string>& row,
                              const std::vector<std::string>& features) {
  Assignment a(net.size());
  for (const auto& f : features) {
    const int v = net.index_of(f);
    const std::string& label = row[data.column_index(f)];
    auto idx = net.variable(v).value_index(label);
    if (!idx) throw ModelError("value '" + label + "' of column '" + f + "' not in the model");
    a.set(v, *idx);
  }
  return a;
}

}  // namespace

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string default_positive_label(const Dataset& data) {
  const auto labels = sorted_labels(data, data.class_column);
  if (labels.size() != 2)
    throw ModelError("class column '" + data.class_column + "' must have exactly two labels, found " +
                     std::to_string(labels.size()));
  const auto groups = rows_by_class(data, labels);
  return groups[0].size() < groups[1].size() ? labels[0] : labels[1];
}

LearnedModel learn_nb(const Dataset& data, const LearnOptions& opts) {
  if (data.rows.empty()) throw ModelError("cannot learn from an empty dataset");
  if (!(opts.smoothing >= 0.0)) throw ModelError("smoothing must be nonnegative");
  const Domains own = opts.domains ? Domains{} : data.domains();
  const Domains& dom = opts.domains ? *opts.domains : own;

  const std::vector<std::string> class_labels = dom.at(data.class_column);
  if (class_labels.size() != 2)
    throw ModelError("class column '" + data.class_column + "' must have exactly two labels, found " +
                     std::to_string(class_labels.size()));
  const std::string positive =
      opts.positive_label.empty() ? default_positive_label(data) : opts.positive_label;
  auto pos_it = std::find(class_labels.begin(), class_labels.end(), positive);
  if (pos_it == class_labels.end()) throw ModelError("positive label '" + positive + "' not in class column");

  const std::vector<std::string> features = opts.features.value_or(data.feature_columns());
  const int c = data.column_index(data.class_column);

  std::vector<Variable> vars;
  std::vector<Cpt> cpts;
  vars.push_back({data.class_column, class_labels});

  std::vector<double> class_count(2, 0.0);
  std::vector<int> row_class(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& label = data.rows[i][c];
    auto it = std::find(class_labels.begin(), class_labels.end(), label);
    if (it == class_labels.end()) throw ModelError("class label '" + label + "' not in domain");
    row_class[i] = static_cast<int>(it - class_labels.begin());
    class_count[row_class[i]] += 1.0;
  }
  const double n = static_cast<double>(data.rows.size());
  cpts.push_back({data.class_column,
                  {},
                  {{(class_count[0] + opts.smoothing) / (n + 2.0 * opts.smoothing),
                    (class_count[1] + opts.smoothing) / (n + 2.0 * opts.smoothing)}}});

  for (const auto& f : features) {
    if (f == data.class_column) throw ModelError("class column listed as a feature");
    const int col = data.column_index(f);
    const std::vector<std::string>& labels = dom.at(f);
    if (labels.size() < 2) throw ModelError("feature column '" + f + "' has fewer than two labels");
    std::vector<std::vector<double>> counts(2, std::vector<double>(labels.size(), 0.0));
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      auto it = std::find(labels.begin(), labels.end(), data.rows[i][col]);
      if (it == labels.end()) throw ModelError("value '" + data.rows[i][col] + "' not in domain of '" + f + "'");
      counts[row_class[i]][it - labels.begin()] += 1.0;
    }
    Cpt cpt{f, {data.class_column}, {}};
    for (int k = 0; k < 2; ++k) {
      const double denom = class_count[k] + opts.smoothing * static_cast<double>(labels.size());
      if (!(denom > 0.0))
        throw ModelError("class '" + class_labels[k] + "' has no rows and smoothing is zero");
      std::vector<double> row;
      for (double cnt : counts[k]) row.push_back((cnt + opts.smoothing) / denom);
      cpt.rows.push_back(std::move(row));
    }
    vars.push_back({f, labels});
    cpts.push_back(std::move(cpt));
  }

  Classifier clf;
  clf.class_var = data.class_column;
  clf.positive_value = static_cast<int>(pos_it - class_labels.begin());
  clf.features = features;
  clf.threshold = 0.5;
  return {BayesianNetwork(std::move(vars), std::move(cpts)), std::move(clf)};
}

std::vector<std::vector<std::string>> enumerate_feasible(const Classifier& clf, const CostModel& costs) {
  validate_costs(clf, costs);
  const int n = static_cast<int>(clf.features.size());
  if (n > 20) throw EnumerationGuardError("subset enumeration limited to 2^20 subsets");
  std::vector<std::vector<std::string>> out;
  for (int size = 0; size <= n; ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      double used = 0.0;
      for (int i : idx) used += costs.cost.at(clf.features[i]);
      if (used <= costs.budget + 1e-9) {
        std::vector<std::string> subset;
        for (int i : idx) subset.push_back(clf.features[i]);
        out.push_back(std::move(subset));
      }
      int i = size - 1;
      while (i >= 0 && idx[i] == n - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed) {
  if (folds < 2) throw ModelError("need at least two folds");
  if (static_cast<std::size_t>(folds) > data.rows.size())
    throw ModelError("more folds than rows");
  const auto labels = sorted_labels(data, data.class_column);
  auto groups = rows_by_class(data, labels);
  std::vector<int> fold(data.rows.size(), 0);
  std::size_t dealt = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::mt19937_64 rng = derived_rng(seed, g);
    shuffle(groups[g], rng);
    for (std::size_t i : groups[g]) fold[i] = static_cast<int>(dealt++ % folds);
  }
  return fold;
}

double cv_accuracy(const Dataset& data, const std::vector<std::string>& subset, const CvOptions& opts) {
  const Domains own = opts.domains ? Domains{} : data.domains();
  const Domains& dom = opts.domains ? *opts.domains : own;
  const std::string positive =
      opts.positive_label.empty() ? default_positive_label(data) : opts.positive_label;
  const std::vector<int> fold = stratified_folds(data, opts.folds, opts.seed);
  const int c = data.column_index(data.class_column);

  double total = 0.0;
  for (int k = 0; k < opts.folds; ++k) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.rows.size(); ++i) (fold[i] == k ? test : train).push_back(i);
    if (test.empty()) continue;
    const Dataset train_data = data.subset_rows(train);
    LearnOptions lo;
    lo.smoothing = opts.smoothing;
    lo.features = subset;
    lo.positive_label = positive;
    lo.domains = &dom;
    const LearnedModel model = learn_nb(train_data, lo);

    std::size_t correct = 0;
    for (std::size_t i : test) {
      const auto& row = data.rows[i];
      const Assignment a = assignment_for_row(model.net, data, row, subset);
      const bool positive_pred = classify(model.net, model.clf, a) == Label::kPositive;
      if (positive_pred == (row[c] == positive)) ++correct;
    }
    total += static_cast<double>(correct) / static_cast<double>(test.size());
  }
  return total / opts.folds;
}

double BudgetRule::resolve(std::size_t num_features) const {
  if (kind == Kind::kAbsolute) return value;
  return std::ceil(value * static_cast<double>(num_features) - 1e-9);
}

std::string ScatterRow::marker() const {
  if (optimal_eca && optimal_accuracy) return "optimal-eca;optimal-accuracy";
  if (optimal_eca) return "optimal-eca";
  if (optimal_accuracy) return "optimal-accuracy";
  return "feasible";
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ModelError("train fraction must lie in (0,1)");
  const auto labels = sorted_labels(data, data.class_column);
  auto groups = rows_by_class(data, labels);
  std::vector<std::size_t> train, test;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::mt19937_64 rng = derived_rng(seed, 1000 + g);
    shuffle(groups[g], rng);
    const auto cut = static_cast<std::size_t>(std::llround(train_fraction * groups[g].size()));
    train.insert(train.end(), groups[g].begin(), groups[g].begin() + cut);
    test.insert(test.end(), groups[g].begin() + cut, groups[g].end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

ScatterReport scatter(const Dataset& data, const EvalConfig& config) {
  if (config.folds < 2) throw ModelError("need at least two folds");
  if (!(config.smoothing >= 0.0)) throw ModelError("smoothing must be nonnegative");
  const Domains dom = data.domains();
  const std::string positive =
      config.positive_label.empty() ? default_positive_label(data) : config.positive_label;
  const auto [train_idx, test_idx] = train_test_split(data, config.train_fraction, config.seed);
  const Dataset train = data.subset_rows(train_idx);
  const Dataset test = data.subset_rows(test_idx);

  LearnOptions lo;
  lo.smoothing = config.smoothing;
  lo.positive_label = positive;
  lo.domains = &dom;
  const LearnedModel full = learn_nb(train, lo);
  const CostModel costs =
      CostModel::unit(full.clf.features, config.budget.resolve(full.clf.features.size()));
  const AgreementContext ctx(full.net, full.clf);

  ScatterReport report;
  report.train_rows = train.rows.size();
  report.test_rows = test.rows.size();
  CvOptions cv;
  cv.folds = config.folds;
  cv.seed = config.seed;
  cv.smoothing = config.smoothing;
  cv.positive_label = positive;
  cv.domains = &dom;
  std::size_t best_eca = 0, best_acc = 0;
  for (const auto& subset : enumerate_feasible(full.clf, costs)) {
    ScatterRow row;
    row.subset = subset;
    const FeatureMask mask = ctx.mask_of(subset);
    if (config.fixed_threshold) {
      row.threshold = 0.5;
      row.eca = ctx.eca(mask, 0.5);
    } else {
      const MaaResult m = ctx.maa(mask);
      row.threshold = m.interval.representative;
      row.eca = m.score;
    }
    row.cv_accuracy = cv_accuracy(train, subset, cv);
    report.rows.push_back(std::move(row));
    const std::size_t i = report.rows.size() - 1;
    if (report.rows[i].eca > report.rows[best_eca].eca) best_eca = i;
    if (report.rows[i].cv_accuracy > report.rows[best_acc].cv_accuracy) best_acc = i;
  }
  report.rows[best_eca].optimal_eca = true;
  report.rows[best_acc].optimal_accuracy = true;

  const int c = test.column_index(test.class_column);
  auto evaluate = [&](const ScatterRow& row, double threshold) {
    TestScore s;
    s.subset = row.subset;
    s.threshold = threshold;
    if (test.rows.empty()) return s;
    Classifier trimmed = full.clf;
    trimmed.features = row.subset;
    std::size_t agree = 0, correct = 0;
    for (const auto& r : test.rows) {
      const Assignment af = assignment_for_row(full.net, test, r, full.clf.features);
      const Assignment at = assignment_for_row(full.net, test, r, row.subset);
      const bool original = classify(full.net, full.clf, af) == Label::kPositive;
      const bool trimmed_pos =
          decide(posterior_class(full.net, trimmed, at), threshold) == Label::kPositive;
      if (original == trimmed_pos) ++agree;
      if (trimmed_pos == (r[c] == positive)) ++correct;
    }
    const double n = static_cast<double>(test.rows.size());
    s.test_agreement = static_cast<double>(agree) / n;
    s.test_accuracy = static_cast<double>(correct) / n;
    return s;
  };
  report.optimal_eca = evaluate(report.rows[best_eca], report.rows[best_eca].threshold);
  report.optimal_accuracy = evaluate(report.rows[best_acc], 0.5);
  return report;
}

std::string scatter_csv(const ScatterReport& report) {
  std::string out = "subset,eca,cv_accuracy,marker\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.subset.size(); ++i) {
      if (i) out += ';';
      out += row.subset[i];
    }
    out += ',' + fmt12(row.eca) + ',' + fmt12(row.cv_accuracy) + ',' + row.marker() + '\n';
  }
  return out;
}

std::string scatter_summary_json(const ScatterReport& report) {
  using nlohmann::ordered_json;
  auto num = [](double x) { return std::strtod(fmt12(x).c_str(), nullptr); };
  auto entry = [&](const TestScore& s) {
    ordered_json j;
    j["subset"] = s.subset;
    if (std::isinf(s.threshold) || s.threshold > 1.0)
      j["threshold"] = "all-negative";
    else
      j["threshold"] = num(s.threshold);
    j["test_agreement"] = num(s.test_agreement);
    j["test_accuracy"] = num(s.test_accuracy);
    return j;
  };
  ordered_json doc;
  doc["optimal_eca"] = entry(report.optimal_eca);
  doc["optimal_accuracy"] = entry(report.optimal_accuracy);
  doc["train_rows"] = report.train_rows;
  doc["test_rows"] = report.test_rows;
  return doc.dump(2) + "\n";
}

Assignment sample_assignment(const BayesianNetwork& net, std::mt19937_64& rng) {
  Assignment a(net.size());
  std::vector<int> values(net.size(), 0);
  for (int v : net.topological_order()) {
    const auto& row = net.cpt_of(v).rows[net.row_index(v, values)];
    const double u = uniform01(rng);
    double acc = 0.0;
    int x = static_cast<int>(row.size()) - 1;
    for (std::size_t k = 0; k < row.size(); ++k) {
      acc += row[k];
      if (u < acc) {
        x = static_cast<int>(k);
        break;
      }
    }
    // Never land on a zero-probability value through rounding at the top end.
    while (x > 0 && row[x] == 0.0) --x;
    values[v] = x;
    a.set(v, x);
  }
  return a;
}

Dataset sample_dataset(const BayesianNetwork& net, std::size_t rows, std::uint64_t seed,
                       const std::string& class_column) {
  Dataset data;
  for (const auto& v : net.variables()) data.columns.push_back(v.name);
  data.class_column = class_column;
  std::mt19937_64 rng(seed);
  data.rows.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const Assignment a = sample_assignment(net, rng);
    std::vector<std::string> row;
    for (std::size_t v = 0; v < net.size(); ++v)
      row.push_back(net.variable(static_cast<int>(v)).values[a[static_cast<int>(v)]]);
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dataset synthetic_dataset(int num_features, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng = derived_rng(seed, 7);
  std::vector<Variable> vars{{"C", {"+", "-"}}};
  const double prior = 0.3 + 0.4 * uniform01(rng);
  std::vector<Cpt> cpts{{"C", {}, {{prior, 1.0 - prior}}}};
  for (int i = 1; i <= num_features; ++i) {
    const std::string name = "F" + std::to_string(i);
    vars.push_back({name, {"+", "-"}});
    const double p = 0.05 + 0.9 * uniform01(rng);
    const double q = 0.05 + 0.9 * uniform01(rng);
    cpts.push_back({name, {"C"}, {{p, 1.0 - p}, {q, 1.0 - q}}});
  }
  const BayesianNetwork net(std::move(vars), std::move(cpts));
  return sample_dataset(net, rows, seed, "C");
}

}  // namespace bntrim
