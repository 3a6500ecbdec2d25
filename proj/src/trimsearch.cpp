#include "bntrim/trimsearch.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <ostream>
#include <thread>

namespace bntrim {

namespace {

constexpr double kBudgetSlack = 1e-9;

bool fits(double used, double budget) { return used <= budget + kBudgetSlack; }

std::vector<double> feature_costs(const Classifier& clf, const CostModel& costs) {
  validate_costs(clf, costs);
  std::vector<double> out;
  for (const auto& f : clf.features) out.push_back(costs.cost.at(f));
  return out;
}

std::string format_set(const AgreementContext& ctx, FeatureMask m) {
  std::string s = "{";
  bool first = true;
  for (const auto& n : ctx.names_of(m)) {
    if (!first) s += ',';
    s += n;
    first = false;
  }
  return s + "}";
}

// Incumbent shared by every worker. Reads of the score go through the atomic
// so pruning may use a stale (lower) value, which is always sound.
struct Incumbent {
  std::mutex mu;
  std::atomic<double> score{-1.0};
  FeatureMask mask = 0;
  ThresholdInterval interval;
  bool set = false;

  bool offer(double m, FeatureMask candidate, const ThresholdInterval& iv) {
    std::lock_guard<std::mutex> lock(mu);
    if (set && !(m > score.load())) return false;
    score.store(m);
    mask = candidate;
    interval = iv;
    set = true;
    return true;
  }
};

struct Counters {
  std::atomic<std::size_t> maa{0}, mpa{0}, nodes{0}, pruned{0};
};

struct Task {
  FeatureMask included, excluded;
  double used;
  bool included_changed;
  std::optional<double> bound;
};

class Searcher {
 public:
  Searcher(const AgreementContext& ctx, std::vector<double> costs, double budget,
           std::vector<int> order, bool fast_path, bool frontier_only, std::ostream* trace)
      : ctx_(ctx),
        costs_(std::move(costs)),
        budget_(budget),
        order_(std::move(order)),
        fast_path_(fast_path),
        frontier_only_(frontier_only),
        trace_(trace) {}

  void run(int workers) {
    if (workers <= 1) {
      visit({0, 0, 0.0, true, std::nullopt}, nullptr, 0);
      return;
    }
    // Expand the top of the tree sequentially, deferring subtrees below
    // spawn depth to the workers.
    int depth = 0;
    while ((1 << depth) < 4 * workers && depth < 16) ++depth;
    std::vector<Task> tasks;
    spawn_depth_ = depth;
    visit({0, 0, 0.0, true, std::nullopt}, &tasks, 0);

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) visit(tasks[i], nullptr, -1);
      });
    }
    for (auto& t : pool) t.join();
  }

  TrimResult result() {
    TrimResult r;
    r.best_features = ctx_.names_of(incumbent_.mask);
    r.best_score = incumbent_.score.load();
    r.threshold = incumbent_.interval;
    r.stats.maa_evaluations = counters_.maa.load();
    r.stats.mpa_evaluations = counters_.mpa.load();
    r.stats.nodes_expanded = counters_.nodes.load();
    r.stats.subtrees_pruned = counters_.pruned.load();
    return r;
  }

 private:
  double mpa(FeatureMask m) {
    ++counters_.mpa;
    return ctx_.mpa(m);
  }

  void log(const Task& t, const char* action, double value) {
    if (!trace_) return;
    std::lock_guard<std::mutex> lock(trace_mu_);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    *trace_ << "I=" << format_set(ctx_, t.included) << " E=" << format_set(ctx_, t.excluded)
            << " b=" << (budget_ - t.used) << " action=" << action << " value=" << buf << '\n';
  }

  bool is_maximal(FeatureMask included, double used) const {
    for (int k : order_)
      if (!(included >> k & 1u) && fits(used + costs_[k], budget_)) return false;
    return true;
  }

  void evaluate(const Task& t) {
    ++counters_.maa;
    const InstanceTable table = ctx_.instance_table(t.included);
    MaaResult r = compute_maa(table);
    if (fast_path_) r.score = table_mpa(table);
    log(t, "maa", r.score);
    if (r.score > incumbent_.score.load() && incumbent_.offer(r.score, t.included, r.interval))
      log(t, "update", r.score);
  }

  // `depth` < 0 disables task spawning.
  void visit(Task t, std::vector<Task>* spawn, int depth) {
    if (spawn && depth == spawn_depth_) {
      spawn->push_back(t);
      return;
    }
    ++counters_.nodes;
    if (fits(t.used, budget_) && t.included_changed) {
      if (!frontier_only_ || is_maximal(t.included, t.used)) evaluate(t);
    }

    int branch = -1;
    for (int k : order_) {
      const FeatureMask bit = FeatureMask{1} << k;
      if ((t.included & bit) || (t.excluded & bit)) continue;
      if (fits(t.used + costs_[k], budget_)) {
        branch = k;
        break;
      }
    }
    if (branch < 0) return;

    if (!t.bound) {
      t.bound = mpa(ctx_.full_mask() & ~t.excluded);
      log(t, "bound", *t.bound);
    }
    if (*t.bound <= incumbent_.score.load()) {
      ++counters_.pruned;
      log(t, "prune", *t.bound);
      return;
    }

    const FeatureMask bit = FeatureMask{1} << branch;
    const int next = depth < 0 ? -1 : depth + 1;
    visit({t.included | bit, t.excluded, t.used + costs_[branch], true, t.bound}, spawn, next);
    visit({t.included, t.excluded | bit, t.used, false, std::nullopt}, spawn, next);
  }

  const AgreementContext& ctx_;
  std::vector<double> costs_;
  double budget_;
  std::vector<int> order_;
  bool fast_path_;
  bool frontier_only_;
  std::ostream* trace_;
  std::mutex trace_mu_;
  int spawn_depth_ = -1;
  Incumbent incumbent_;
  Counters counters_;
};

TrimResult run_search(const BayesianNetwork& net, const Classifier& clf, const CostModel& costs,
                      const SearchOptions& opts, bool fast_path, bool frontier_only) {
  std::vector<double> cost = feature_costs(clf, costs);
  AgreementContext ctx(net, clf);
  const int n = static_cast<int>(clf.features.size());

  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::size_t ordering_evals = 0;
  if (opts.branch_order == BranchOrder::kMpaDescending) {
    std::vector<double> single(n);
    for (int k = 0; k < n; ++k) single[k] = ctx.mpa(FeatureMask{1} << k);
    ordering_evals = static_cast<std::size_t>(n);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return single[a] > single[b]; });
  }
  Searcher searcher(ctx, std::move(cost), costs.budget, std::move(order), fast_path, frontier_only,
                    opts.trace);
  searcher.run(std::max(1, opts.parallel));
  TrimResult r = searcher.result();
  r.stats.mpa_evaluations += ordering_evals;
  return r;
}

}  // namespace

TrimResult eca_trim(const BayesianNetwork& net, const Classifier& clf, const CostModel& costs,
                    const SearchOptions& opts) {
  validate_classifier(net, clf);
  const bool fast = opts.use_nb_fast_path.value_or(is_naive_bayes(net, clf));
  return run_search(net, clf, costs, opts, fast, false);
}

TrimResult nb_trim(const BayesianNetwork& net, const Classifier& clf, const CostModel& costs,
                   const SearchOptions& opts) {
  validate_classifier(net, clf);
  if (!is_naive_bayes(net, clf)) throw ModelError("nb_trim requires a naive Bayes classifier");
  return run_search(net, clf, costs, opts, true, true);
}

TrimResult exhaustive_trim(const BayesianNetwork& net, const Classifier& clf,
                           const CostModel& costs) {
  validate_classifier(net, clf);
  const std::vector<double> cost = feature_costs(clf, costs);
  const int n = static_cast<int>(clf.features.size());
  if (n > 20) throw EnumerationGuardError("exhaustive search limited to 2^20 subsets");
  AgreementContext ctx(net, clf);

  TrimResult best;
  best.best_score = -1.0;
  FeatureMask best_mask = 0;
  // Subsets of each size in lexicographic order of their index lists.
  for (int size = 0; size <= n; ++size) {
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      FeatureMask m = 0;
      double used = 0.0;
      for (int i : idx) {
        m |= FeatureMask{1} << i;
        used += cost[i];
      }
      if (fits(used, costs.budget)) {
        ++best.stats.maa_evaluations;
        const MaaResult r = ctx.maa(m);
        if (r.score > best.best_score) {
          best.best_score = r.score;
          best.threshold = r.interval;
          best_mask = m;
        }
      }
      int i = size - 1;
      while (i >= 0 && idx[i] == n - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  best.best_features = ctx.names_of(best_mask);
  return best;
}

}  // namespace bntrim
