#include "bntrim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "bntrim/agreement.hpp"
#include "bntrim/baselines.hpp"
#include "bntrim/evalharness.hpp"
#include "bntrim/netio.hpp"
#include "bntrim/trimsearch.hpp"
#include "json.hpp"

namespace bntrim::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 12 significant digits; infinities become strings.
ordered_json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ';';
      s += scalar_text(v[i]);
    }
    return s;
  }
  return v.dump();
}

void emit(const ordered_json& doc, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << doc.dump(2) << '\n';
    return;
  }
  // Flatten one level of nesting into dotted keys.
  std::vector<std::pair<std::string, ordered_json>> flat;
  for (const auto& [k, v] : doc.items()) {
    if (v.is_object())
      for (const auto& [k2, v2] : v.items()) flat.emplace_back(k + "." + k2, v2);
    else
      flat.emplace_back(k, v);
  }
  if (format == "text") {
    for (const auto& [k, v] : flat) out << k << ": " << scalar_text(v) << '\n';
    return;
  }
  for (std::size_t i = 0; i < flat.size(); ++i) out << (i ? "," : "") << flat[i].first;
  out << '\n';
  for (std::size_t i = 0; i < flat.size(); ++i) out << (i ? "," : "") << scalar_text(flat[i].second);
  out << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split_list(s)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected name=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

ordered_json interval_json(const ThresholdInterval& iv) {
  return ordered_json::array({num(iv.lo), num(iv.hi)});
}

struct Common {
  std::string network;
  std::string class_var;
  std::string positive;
  double threshold = 0.5;
  std::string features;
  std::string costs;
  double budget = -1.0;
  double budget_frac = -1.0;
  std::string format = "json";
  int jobs = 1;
  bool trace = false;
};

void add_classifier_options(CLI::App* sub, Common& c, bool with_budget) {
  sub->add_option("--network", c.network, "network document")->required();
  sub->add_option("--class", c.class_var, "class variable")->required();
  sub->add_option("--positive", c.positive, "positive class value (default: first value)");
  sub->add_option("--threshold", c.threshold, "decision threshold T");
  sub->add_option("--features", c.features, "comma-separated features (default: all but class)");
  sub->add_option("--format", c.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  if (with_budget) {
    sub->add_option("--costs", c.costs, "name=cost,... (default: unit costs)");
    auto* b = sub->add_option("--budget", c.budget, "absolute budget");
    sub->add_option("--budget-frac", c.budget_frac, "budget as ceil(frac * |F|)")->excludes(b);
  }
}

struct Loaded {
  BayesianNetwork net;
  Classifier clf;
};

Loaded load(const Common& c) {
  BayesianNetwork net = load_network(c.network);
  Classifier clf;
  clf.class_var = c.class_var;
  clf.threshold = c.threshold;
  const int cv = net.index_of(c.class_var);
  if (!c.positive.empty()) {
    auto idx = net.variable(cv).value_index(c.positive);
    if (!idx) throw ModelError("class '" + c.class_var + "' has no value '" + c.positive + "'");
    clf.positive_value = *idx;
  }
  if (c.features.empty()) {
    for (const auto& v : net.variables())
      if (v.name != c.class_var) clf.features.push_back(v.name);
  } else {
    clf.features = split_list(c.features);
  }
  validate_classifier(net, clf);
  return {std::move(net), std::move(clf)};
}

CostModel cost_model(const Common& c, const Classifier& clf) {
  double budget = c.budget;
  if (c.budget_frac >= 0.0) {
    budget = BudgetRule{BudgetRule::Kind::kFraction, c.budget_frac}.resolve(clf.features.size());
  } else if (c.budget < 0.0) {
    throw UsageError("one of --budget or --budget-frac is required");
  }
  CostModel m = CostModel::unit(clf.features, budget);
  for (const auto& [name, value] : split_pairs(c.costs)) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') throw UsageError("bad cost '" + value + "'");
    m.cost[name] = x;
  }
  validate_costs(clf, m);
  return m;
}

ordered_json trim_json(const std::string& method, const TrimResult& r) {
  ordered_json j;
  j["method"] = method;
  j["best_features"] = r.best_features;
  j["score"] = num(r.best_score);
  j["threshold_interval"] = interval_json(r.threshold);
  j["representative"] = num(r.threshold.representative);
  j["stats"] = {{"maa_evaluations", r.stats.maa_evaluations},
                {"mpa_evaluations", r.stats.mpa_evaluations},
                {"nodes_expanded", r.stats.nodes_expanded},
                {"subtrees_pruned", r.stats.subtrees_pruned}};
  return j;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BNTRIM_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw UsageError("BNTRIM_SEED must be an unsigned integer");
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budgeted trimming of Bayesian network classifiers", "bntrim"};
  app.require_subcommand(1);

  Common c;
  // trim / exhaustive
  auto* trim = app.add_subcommand("trim", "optimal trimming by branch and bound");
  add_classifier_options(trim, c, true);
  bool generic = false;
  std::string branch_order = "mpa";
  trim->add_flag("--generic", generic, "always use the general search, never the naive Bayes one");
  trim->add_option("--branch-order", branch_order, "mpa or input")
      ->check(CLI::IsMember({"mpa", "input"}));
  trim->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  trim->add_flag("--trace", c.trace, "write the search trace to stderr");
  auto* exhaustive = app.add_subcommand("exhaustive", "optimal trimming by full enumeration");
  add_classifier_options(exhaustive, c, true);

  std::string trim_features;
  double trim_threshold = -1.0;
  auto* maa_cmd = app.add_subcommand("maa", "maximum achievable agreement of a subset");
  add_classifier_options(maa_cmd, c, false);
  maa_cmd->add_option("--trim-features", trim_features, "kept features");
  auto* mpa_cmd = app.add_subcommand("mpa", "maximum potential agreement of a subset");
  add_classifier_options(mpa_cmd, c, false);
  mpa_cmd->add_option("--trim-features", trim_features, "kept features");
  auto* eca_cmd = app.add_subcommand("eca", "expected classification agreement of a trimming");
  add_classifier_options(eca_cmd, c, false);
  eca_cmd->add_option("--trim-features", trim_features, "kept features");
  eca_cmd->add_option("--trim-threshold", trim_threshold, "threshold of the trimming")->required();

  std::string observe, evidence;
  auto* sdp_cmd = app.add_subcommand("sdp", "same-decision probability");
  add_classifier_options(sdp_cmd, c, false);
  sdp_cmd->add_option("--observe", observe, "features still to be observed");
  sdp_cmd->add_option("--evidence", evidence, "name=value,... observed so far");

  bool reoptimize = false;
  auto* ig_cmd = app.add_subcommand("ig", "information-gain ranking and selection");
  add_classifier_options(ig_cmd, c, true);
  ig_cmd->add_flag("--reoptimize", reoptimize, "report the MAA-optimal threshold for the selection");

  std::string data_path, class_column, summary_path;
  EvalConfig eval;
  std::uint64_t seed = 0;
  bool seed_given = false;
  auto* scatter_cmd = app.add_subcommand("scatter", "agreement vs accuracy over feasible subsets");
  scatter_cmd->add_option("--data", data_path, "CSV dataset")->required();
  scatter_cmd->add_option("--class-column", class_column, "class column")->required();
  scatter_cmd->add_option("--positive", eval.positive_label, "positive class label");
  auto* sb = scatter_cmd->add_option("--budget", c.budget, "absolute budget");
  scatter_cmd->add_option("--budget-frac", c.budget_frac, "budget as ceil(frac * |F|)")->excludes(sb);
  scatter_cmd->add_option("--folds", eval.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  scatter_cmd->add_option("--train-fraction", eval.train_fraction, "train split fraction");
  scatter_cmd->add_option("--smoothing", eval.smoothing, "Laplace smoothing");
  scatter_cmd->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_given = true; });
  scatter_cmd->add_flag("--fixed-threshold", eval.fixed_threshold, "score subsets at threshold 0.5");
  scatter_cmd->add_option("--summary", summary_path, "write the test-set summary document here");

  double smoothing = 1.0;
  std::string learn_positive;
  auto* learn_cmd = app.add_subcommand("learn", "learn a naive Bayes network from CSV");
  learn_cmd->add_option("--data", data_path, "CSV dataset")->required();
  learn_cmd->add_option("--class-column", class_column, "class column")->required();
  learn_cmd->add_option("--smoothing", smoothing, "Laplace smoothing");
  learn_cmd->add_option("--positive", learn_positive, "positive class label");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a network document");
  validate_cmd->add_option("path", validate_path, "network document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (trim->parsed() || exhaustive->parsed()) {
      const Loaded m = load(c);
      const CostModel costs = cost_model(c, m.clf);
      if (exhaustive->parsed()) {
        emit(trim_json("exhaustive", exhaustive_trim(m.net, m.clf, costs)), c.format, out);
        return kOk;
      }
      SearchOptions opts;
      opts.branch_order = branch_order == "input" ? BranchOrder::kInputOrder : BranchOrder::kMpaDescending;
      opts.parallel = c.jobs;
      opts.trace = c.trace ? &err : nullptr;
      const bool nb = !generic && is_naive_bayes(m.net, m.clf);
      const TrimResult r = nb ? nb_trim(m.net, m.clf, costs, opts) : eca_trim(m.net, m.clf, costs, opts);
      emit(trim_json(nb ? "nb_trim" : "eca_trim", r), c.format, out);
    } else if (maa_cmd->parsed() || mpa_cmd->parsed()) {
      const Loaded m = load(c);
      const auto kept = split_list(trim_features);
      ordered_json j;
      j["features"] = kept;
      if (maa_cmd->parsed()) {
        const MaaResult r = maa(m.net, m.clf, kept);
        j["score"] = num(r.score);
        j["threshold_interval"] = interval_json(r.interval);
        j["representative"] = num(r.interval.representative);
      } else {
        j["mpa"] = num(mpa(m.net, m.clf, kept));
      }
      emit(j, c.format, out);
    } else if (eca_cmd->parsed()) {
      const Loaded m = load(c);
      Classifier beta = m.clf;
      beta.features = split_list(trim_features);
      beta.threshold = trim_threshold;
      ordered_json j;
      j["features"] = beta.features;
      j["threshold"] = num(beta.threshold);
      j["eca"] = num(eca(m.net, m.clf, beta));
      emit(j, c.format, out);
    } else if (sdp_cmd->parsed()) {
      const Loaded m = load(c);
      const Assignment e(m.net, split_pairs(evidence));
      ordered_json j;
      j["observe"] = split_list(observe);
      j["sdp"] = num(sdp(m.net, m.clf, split_list(observe), e));
      emit(j, c.format, out);
    } else if (ig_cmd->parsed()) {
      const Loaded m = load(c);
      const CostModel costs = cost_model(c, m.clf);
      const SelectionReport r = ig_baseline(m.net, m.clf, costs, reoptimize);
      ordered_json j;
      j["method"] = r.method;
      ordered_json scores = ordered_json::object();
      for (const auto& [name, s] : r.scores) scores[name] = num(s);
      j["scores"] = scores;
      j["selected"] = r.chosen;
      j["threshold"] = num(r.threshold);
      j["eca"] = num(r.eca);
      emit(j, c.format, out);
    } else if (scatter_cmd->parsed()) {
      const Dataset data = load_dataset(data_path, class_column);
      eval.seed = seed_given ? seed : default_seed();
      if (c.budget >= 0.0)
        eval.budget = {BudgetRule::Kind::kAbsolute, c.budget};
      else if (c.budget_frac >= 0.0)
        eval.budget = {BudgetRule::Kind::kFraction, c.budget_frac};
      const ScatterReport r = scatter(data, eval);
      out << scatter_csv(r);
      if (!summary_path.empty()) {
        std::ofstream f(summary_path, std::ios::binary);
        if (!f) throw ModelError("cannot write '" + summary_path + "'");
        f << scatter_summary_json(r);
      }
    } else if (learn_cmd->parsed()) {
      const Dataset data = load_dataset(data_path, class_column);
      LearnOptions lo;
      lo.smoothing = smoothing;
      lo.positive_label = learn_positive;
      const LearnedModel m = learn_nb(data, lo);
      out << serialize_network(m.net);
      err << "positive value: " << m.net.variable(m.net.index_of(m.clf.class_var)).values[m.clf.positive_value]
          << '\n';
    } else if (validate_cmd->parsed()) {
      std::string text = read_file(validate_path);
      try {
        parse_network(text);
      } catch (const ModelError& e) {
        err << e.what() << '\n';
        out << "invalid\n";
        return kDataError;
      }
      out << "valid\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const EnumerationGuardError& e) {
    err << "enumeration guard: " << e.what() << '\n';
    return kGuardError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace bntrim::cli
