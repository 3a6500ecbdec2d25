#include "bntrim/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace bntrim {

namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Kahn's algorithm over resolved parent lists. Returns an empty order when a
// cycle exists.
std::vector<int> topo_sort(const std::vector<std::vector<int>>& parents) {
  const int n = static_cast<int>(parents.size());
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    pending[v] = static_cast<int>(parents[v].size());
    for (int p : parents[v]) children[p].push_back(v);
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int v = n - 1; v >= 0; --v)
    if (pending[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    // Keep the order stable w.r.t. declaration order among ready nodes.
    std::vector<int> released;
    for (int c : children[v])
      if (--pending[c] == 0) released.push_back(c);
    std::sort(released.rbegin(), released.rend());
    for (int c : released) ready.push_back(c);
  }
  if (static_cast<int>(order.size()) != n) return {};
  return order;
}

}  // namespace

std::optional<int> Variable::value_index(const std::string& label) const {
  auto it = std::find(values.begin(), values.end(), label);
  if (it == values.end()) return std::nullopt;
  return static_cast<int>(it - values.begin());
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    out += v;
    out += '\n';
  }
  return out;
}

ValidationReport validate_network(const std::vector<Variable>& variables,
                                  const std::vector<Cpt>& cpts) {
  ValidationReport report;
  auto& out = report.violations;
  if (variables.empty()) {
    out.push_back("no variables");
    return report;
  }

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const Variable& var = variables[i];
    if (var.name.empty()) out.push_back("variable " + std::to_string(i) + ": empty name");
    if (!index.emplace(var.name, static_cast<int>(i)).second)
      out.push_back("duplicate variable '" + var.name + "'");
    if (var.values.size() < 2)
      out.push_back("variable '" + var.name + "': cardinality must be at least 2");
    std::set<std::string> seen;
    for (const auto& label : var.values)
      if (!seen.insert(label).second)
        out.push_back("variable '" + var.name + "': duplicate value '" + label + "'");
  }

  std::vector<int> cpt_count(variables.size(), 0);
  std::vector<std::vector<int>> parents(variables.size());
  bool structure_ok = true;
  for (const Cpt& cpt : cpts) {
    auto child = index.find(cpt.child);
    if (child == index.end()) {
      out.push_back("dangling reference: cpt child '" + cpt.child + "' is not a variable");
      structure_ok = false;
      continue;
    }
    const int c = child->second;
    ++cpt_count[c];
    std::size_t expected_rows = 1;
    bool parents_ok = true;
    std::set<std::string> seen;
    for (const auto& p : cpt.parents) {
      auto it = index.find(p);
      if (it == index.end()) {
        out.push_back("dangling reference: parent '" + p + "' of '" + cpt.child +
                      "' is not a variable");
        parents_ok = false;
        continue;
      }
      if (!seen.insert(p).second) {
        out.push_back("cpt '" + cpt.child + "': duplicate parent '" + p + "'");
        parents_ok = false;
      }
      if (p == cpt.child) {
        out.push_back("cycle: '" + p + "' is its own parent");
        parents_ok = false;
      }
      expected_rows *= variables[it->second].values.size();
      if (cpt_count[c] == 1) parents[c].push_back(it->second);
    }
    if (!parents_ok) {
      structure_ok = false;
      continue;
    }
    if (cpt.rows.size() != expected_rows) {
      out.push_back("cpt '" + cpt.child + "': wrong row count " +
                    std::to_string(cpt.rows.size()) + ", expected " +
                    std::to_string(expected_rows));
      continue;
    }
    const std::size_t width = variables[c].values.size();
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      const std::string where = "cpt '" + cpt.child + "' row " + std::to_string(r);
      if (row.size() != width) {
        out.push_back(where + ": wrong entry count " + std::to_string(row.size()) +
                      ", expected " + std::to_string(width));
        continue;
      }
      double sum = 0.0;
      bool range_ok = true;
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0)) range_ok = false;
        sum += p;
      }
      if (!range_ok) out.push_back(where + ": entry outside [0,1]");
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance))
        out.push_back(where + ": row sum " + format_number(sum));
    }
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (cpt_count[v] == 0) {
      out.push_back("variable '" + variables[v].name + "' has no cpt");
      structure_ok = false;
    } else if (cpt_count[v] > 1) {
      out.push_back("variable '" + variables[v].name + "' has " +
                    std::to_string(cpt_count[v]) + " cpts");
      structure_ok = false;
    }
  }
  if (structure_ok && topo_sort(parents).empty())
    out.push_back("cycle in parent graph");
  return report;
}

BayesianNetwork::BayesianNetwork(std::vector<Variable> variables,
                                 std::vector<Cpt> cpts)
    : variables_(std::move(variables)), cpts_(std::move(cpts)) {
  ValidationReport report = validate_network(variables_, cpts_);
  if (!report.ok()) throw ModelError("invalid network: " + report.violations.front());

  const std::size_t n = variables_.size();
  for (std::size_t i = 0; i < n; ++i) index_[variables_[i].name] = static_cast<int>(i);
  cpt_index_.assign(n, 0);
  parents_.assign(n, {});
  children_.assign(n, {});
  for (std::size_t k = 0; k < cpts_.size(); ++k) {
    const int c = index_.at(cpts_[k].child);
    cpt_index_[c] = k;
    for (const auto& p : cpts_[k].parents) {
      const int pi = index_.at(p);
      parents_[c].push_back(pi);
      children_[pi].push_back(c);
    }
  }
  order_ = topo_sort(parents_);
}

int BayesianNetwork::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ModelError("unknown variable '" + name + "'");
  return it->second;
}

std::optional<int> BayesianNetwork::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t BayesianNetwork::row_index(int v, const std::vector<int>& assignment) const {
  std::size_t row = 0;
  for (int p : parents_[v]) row = row * variables_[p].values.size() + assignment[p];
  return row;
}

void validate_classifier(const BayesianNetwork& net, const Classifier& clf) {
  auto c = net.find(clf.class_var);
  if (!c) throw ModelError("unknown class variable '" + clf.class_var + "'");
  if (net.cardinality(*c) != 2)
    throw ModelError("class variable '" + clf.class_var + "' must be binary");
  if (clf.positive_value < 0 || clf.positive_value > 1)
    throw ModelError("positive value index out of range");
  if (!(clf.threshold >= 0.0 && clf.threshold <= 1.0))
    throw ModelError("threshold must lie in [0,1]");
  std::set<std::string> seen;
  for (const auto& f : clf.features) {
    if (!net.find(f)) throw ModelError("unknown feature '" + f + "'");
    if (f == clf.class_var) throw ModelError("class variable listed as a feature");
    if (!seen.insert(f).second) throw ModelError("duplicate feature '" + f + "'");
  }
}

CostModel CostModel::unit(const std::vector<std::string>& features, double budget) {
  CostModel m;
  for (const auto& f : features) m.cost[f] = 1.0;
  m.budget = budget;
  return m;
}

void validate_costs(const Classifier& clf, const CostModel& costs) {
  if (!(costs.budget >= 0.0)) throw ModelError("budget must be nonnegative");
  for (const auto& f : clf.features) {
    auto it = costs.cost.find(f);
    if (it == costs.cost.end()) throw ModelError("missing cost for feature '" + f + "'");
    if (!(it->second > 0.0)) throw ModelError("cost of feature '" + f + "' must be positive");
  }
}

bool is_naive_bayes(const BayesianNetwork& net, const Classifier& clf) {
  const int c = net.index_of(clf.class_var);
  if (!net.parents(c).empty()) return false;
  for (const auto& f : clf.features) {
    const auto& ps = net.parents(net.index_of(f));
    if (ps.size() != 1 || ps.front() != c) return false;
  }
  return true;
}

bool d_separated(const BayesianNetwork& net, const std::vector<int>& x,
                 const std::vector<int>& y, const std::vector<int>& z) {
  if (x.empty() || y.empty()) return true;
  const std::size_t n = net.size();

  // Ancestral subgraph of X ∪ Y ∪ Z, moralized, with Z removed.
  std::vector<char> keep(n, 0);
  std::vector<int> stack;
  for (const auto* group : {&x, &y, &z})
    for (int v : *group) stack.push_back(v);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = 1;
    for (int p : net.parents(v)) stack.push_back(p);
  }
  std::vector<std::vector<int>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& ps = net.parents(static_cast<int>(v));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      adj[v].push_back(ps[i]);
      adj[ps[i]].push_back(static_cast<int>(v));
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        adj[ps[i]].push_back(ps[j]);
        adj[ps[j]].push_back(ps[i]);
      }
    }
  }
  std::vector<char> blocked(n, 0), target(n, 0), seen(n, 0);
  for (int v : z) blocked[v] = 1;
  for (int v : y) target[v] = 1;
  for (int v : x) {
    if (target[v] && !blocked[v]) return false;
    if (!blocked[v]) stack.push_back(v);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    if (target[v]) return false;
    for (int w : adj[v])
      if (!blocked[w] && !seen[w]) stack.push_back(w);
  }
  return true;
}

bool cond_independent_given_class(const BayesianNetwork& net, const Classifier& clf,
                                  const std::vector<std::string>& subset) {
  std::set<std::string> in_subset;
  for (const auto& s : subset) {
    if (std::find(clf.features.begin(), clf.features.end(), s) == clf.features.end())
      throw ModelError("'" + s + "' is not a classifier feature");
    in_subset.insert(s);
  }
  std::vector<int> x, y;
  for (const auto& f : clf.features)
    (in_subset.count(f) ? x : y).push_back(net.index_of(f));
  return d_separated(net, x, y, {net.index_of(clf.class_var)});
}

}  // namespace bntrim
