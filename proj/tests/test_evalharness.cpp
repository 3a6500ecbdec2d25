#include <doctest.h>

#include <set>

#include "bntrim/errors.hpp"
#include "bntrim/evalharness.hpp"
#include "support/fixtures.hpp"

using namespace bntrim;

namespace {

std::set<std::vector<std::string>> as_set(const std::vector<std::vector<std::string>>& v) {
  return {v.begin(), v.end()};
}

Dataset separable(std::size_t n) {
  Dataset d;
  d.columns = {"A", "B", "C"};
  d.class_column = "C";
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    d.rows.push_back({pos ? "x" : "y", i % 3 == 0 ? "u" : "v", pos ? "yes" : "no"});
  }
  return d;
}

}  // namespace

TEST_CASE("laplace smoothing") {
  const auto d = parse_dataset("F,C\n+,c\n+,c\n-,d\n+,d\n", "C");
  LearnOptions opts;
  opts.positive_label = "c";
  const auto m = learn_nb(d, opts);
  const int f = m.net.index_of("F");
  std::vector<int> a(m.net.size(), 0);
  a[m.net.index_of("C")] = 0;
  a[f] = 0;
  CHECK(m.net.probability(f, a) == doctest::Approx(0.75));
  CHECK(m.clf.threshold == 0.5);
  CHECK(m.clf.features == std::vector<std::string>{"F"});
}

TEST_CASE("zero smoothing permits zero cells") {
  Domains dom{{"F", {"+", "-", "?x"}}, {"C", {"c", "d"}}};
  const auto d = parse_dataset("F,C\n+,c\n-,d\n", "C");
  LearnOptions opts;
  opts.smoothing = 0.0;
  opts.domains = &dom;
  const auto m = learn_nb(d, opts);
  const int f = m.net.index_of("F");
  std::vector<int> a(m.net.size(), 0);
  a[f] = 2;
  CHECK(m.net.probability(f, a) == 0.0);
}

TEST_CASE("learning errors") {
  CHECK_THROWS_AS(learn_nb(parse_dataset("F,C\n+,a\n+,b\n-,c\n", "C")), ModelError);
  Dataset empty;
  empty.columns = {"F", "C"};
  empty.class_column = "C";
  CHECK_THROWS_AS(learn_nb(empty), ModelError);
}

TEST_CASE("minority label is positive by default") {
  CHECK(default_positive_label(parse_dataset("C\na\na\nb\n", "C")) == "b");
  CHECK(default_positive_label(parse_dataset("C\na\nb\n", "C")) == "b");
}

TEST_CASE("feasible subsets") {
  const Classifier three{"C", 0, {"F1", "F2", "F3"}, 0.5};
  CHECK(as_set(enumerate_feasible(three, CostModel::unit(three.features, 1.5))) ==
        std::set<std::vector<std::string>>{{}, {"F1"}, {"F2"}, {"F3"}});
  const Classifier four{"C", 0, {"F1", "F2", "F3", "F4"}, 0.5};
  const CostModel fig{{{"F1", 0.5}, {"F2", 1.0}, {"F3", 1.0}, {"F4", 2.0}}, 1.5};
  const auto subsets = enumerate_feasible(four, fig);
  CHECK(subsets.size() == 6);
  CHECK(as_set(subsets) == std::set<std::vector<std::string>>{
                               {}, {"F1"}, {"F2"}, {"F3"}, {"F1", "F2"}, {"F1", "F3"}});
  CHECK(enumerate_feasible(four, CostModel::unit(four.features, 0)).size() == 1);
}

TEST_CASE("cross-validated accuracy") {
  CvOptions opts;
  opts.folds = 5;
  CHECK(cv_accuracy(separable(40), {"A"}, opts) == doctest::Approx(1.0));

  Dataset d;
  d.columns = {"F", "C"};
  d.class_column = "C";
  for (int i = 0; i < 20; ++i) d.rows.push_back({i % 2 ? "a" : "b", i < 5 ? "p" : "n"});
  CHECK(cv_accuracy(d, {}, opts) == doctest::Approx(0.75));

  const auto synth = synthetic_dataset(4, 200, 3);
  opts.seed = 9;
  CHECK(cv_accuracy(synth, {"F1", "F3"}, opts) == cv_accuracy(synth, {"F1", "F3"}, opts));
}

TEST_CASE("stratified folds balance each class") {
  const auto d = separable(40);
  const auto folds = stratified_folds(d, 4, 1);
  std::vector<int> per_fold(4, 0);
  for (std::size_t i = 0; i < d.rows.size(); ++i)
    if (d.rows[i][2] == "yes") ++per_fold[folds[i]];
  for (int c : per_fold) CHECK(c == 5);
  CHECK(stratified_folds(d, 4, 1) == folds);
}

TEST_CASE("budget rule") {
  CHECK(BudgetRule{BudgetRule::Kind::kFraction, 0.5}.resolve(5) == 3.0);
  CHECK(BudgetRule{BudgetRule::Kind::kFraction, 0.5}.resolve(4) == 2.0);
  CHECK(BudgetRule{BudgetRule::Kind::kAbsolute, 1.5}.resolve(10) == 1.5);
}

TEST_CASE("scatter on a synthetic dataset") {
  const auto data = synthetic_dataset(4, 400, 11);
  EvalConfig cfg;
  cfg.seed = 5;
  cfg.folds = 5;
  cfg.budget = {BudgetRule::Kind::kAbsolute, 2};
  const auto report = scatter(data, cfg);
  CHECK(report.rows.size() == 11);
  CHECK(report.train_rows + report.test_rows == 400);
  int eca_marks = 0, acc_marks = 0;
  double best = 0.0;
  for (const auto& r : report.rows) {
    eca_marks += r.optimal_eca;
    acc_marks += r.optimal_accuracy;
    best = std::max(best, r.eca);
  }
  CHECK(eca_marks == 1);
  CHECK(acc_marks == 1);
  for (const auto& r : report.rows)
    if (r.optimal_eca) CHECK(r.eca == best);

  const auto csv = scatter_csv(report);
  CHECK(csv.rfind("subset,eca,cv_accuracy,marker\n", 0) == 0);
  CHECK(csv == scatter_csv(scatter(data, cfg)));
  const auto json = scatter_summary_json(report);
  CHECK(json.find("optimal_eca") != std::string::npos);
  CHECK(json.find("test_agreement") != std::string::npos);
}

TEST_CASE("full budget picks the full set with agreement one") {
  const auto data = synthetic_dataset(3, 300, 2);
  EvalConfig cfg;
  cfg.folds = 3;
  cfg.budget = {BudgetRule::Kind::kAbsolute, 3};
  const auto report = scatter(data, cfg);
  CHECK(report.optimal_eca.subset.size() == 3);
  for (const auto& r : report.rows)
    if (r.optimal_eca) CHECK(r.eca == doctest::Approx(1.0));
  CHECK(report.optimal_eca.test_agreement == doctest::Approx(1.0));
}

TEST_CASE("optimal-eca subset agrees best on held-out data") {
  const auto data = synthetic_dataset(5, 3000, 21);
  EvalConfig cfg;
  cfg.folds = 3;
  cfg.seed = 4;
  cfg.budget = {BudgetRule::Kind::kAbsolute, 2};
  const auto report = scatter(data, cfg);
  double best_eca = 0.0;
  for (const auto& r : report.rows) best_eca = std::max(best_eca, r.eca);
  CHECK(report.optimal_eca.test_agreement >= best_eca - 0.05);
}

TEST_CASE("sampling matches model marginals") {
  const auto net = bntrim::testing::quiz();
  const auto d = sample_dataset(net, 20000, 8, "C");
  CHECK(d.rows.size() == 20000);
  const int c = d.column_index("C");
  double pos = 0;
  for (const auto& r : d.rows) pos += r[c] == "+";
  CHECK(pos / 20000.0 == doctest::Approx(0.1).epsilon(0.1));
  CHECK(serialize_dataset(sample_dataset(net, 50, 8, "C")) ==
        serialize_dataset(sample_dataset(net, 50, 8, "C")));
}

TEST_CASE("uniform01 is reproducible and in range") {
  std::mt19937_64 a(1), b(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform01(a);
    CHECK(x == uniform01(b));
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("marker strings") {
  ScatterRow r;
  CHECK(r.marker() == "feasible");
  r.optimal_eca = true;
  CHECK(r.marker() == "optimal-eca");
  r.optimal_accuracy = true;
  CHECK(r.marker() == "optimal-eca;optimal-accuracy");
}
