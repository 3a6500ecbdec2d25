#include "bntrim/netio.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bntrim {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(where + ": missing field '" + key + "'");
  return *it;
}

std::vector<std::string> string_list(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ModelError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : arr) {
    if (!s.is_string()) throw ModelError(where + ": expected a string");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

BayesianNetwork parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte offset; translate to line/column.
    std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
      throw ModelError("no variables: empty document");
    throw ModelError("parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) throw ModelError("network document must be an object");

  std::vector<Variable> variables;
  if (doc.contains("variables")) {
    const json& vars = doc.at("variables");
    if (!vars.is_array()) throw ModelError("'variables' must be an array");
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const std::string where = "variables[" + std::to_string(i) + "]";
      const json& v = vars[i];
      if (!v.is_object()) throw ModelError(where + ": expected an object");
      const json& name = require(v, "name", where);
      if (!name.is_string()) throw ModelError(where + ": 'name' must be a string");
      variables.push_back({name.get<std::string>(),
                           string_list(require(v, "values", where), where + ".values")});
    }
  }
  if (variables.empty()) throw ModelError("no variables");

  std::vector<Cpt> cpts;
  const json& cpds = require(doc, "cpds", "document");
  if (!cpds.is_array()) throw ModelError("'cpds' must be an array");
  for (std::size_t i = 0; i < cpds.size(); ++i) {
    const std::string where = "cpds[" + std::to_string(i) + "]";
    const json& c = cpds[i];
    if (!c.is_object()) throw ModelError(where + ": expected an object");
    Cpt cpt;
    const json& child = require(c, "child", where);
    if (!child.is_string()) throw ModelError(where + ": 'child' must be a string");
    cpt.child = child.get<std::string>();
    cpt.parents = c.contains("parents") ? string_list(c.at("parents"), where + ".parents")
                                        : std::vector<std::string>{};
    const json& rows = require(c, "rows", where);
    if (!rows.is_array()) throw ModelError(where + ": 'rows' must be an array");
    for (const auto& row : rows) {
      if (!row.is_array()) throw ModelError(where + ": each row must be an array");
      std::vector<double> values;
      for (const auto& p : row) {
        if (!p.is_number()) throw ModelError(where + ": probabilities must be numbers");
        values.push_back(p.get<double>());
      }
      cpt.rows.push_back(std::move(values));
    }
    cpts.push_back(std::move(cpt));
  }

  ValidationReport report = validate_network(variables, cpts);
  if (!report.ok()) {
    std::string msg = "invalid network:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ModelError(msg);
  }
  return BayesianNetwork(std::move(variables), std::move(cpts));
}

std::string serialize_network(const BayesianNetwork& net) {
  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (const auto& v : net.variables()) {
    ordered_json var;
    var["name"] = v.name;
    var["values"] = v.values;
    doc["variables"].push_back(std::move(var));
  }
  doc["cpds"] = ordered_json::array();
  for (const auto& c : net.cpts()) {
    ordered_json cpd;
    cpd["child"] = c.child;
    cpd["parents"] = c.parents;
    cpd["rows"] = c.rows;
    doc["cpds"].push_back(std::move(cpd));
  }
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BayesianNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

int Dataset::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ModelError("unknown column '" + name + "'");
  return static_cast<int>(it - columns.begin());
}

std::map<std::string, std::vector<std::string>> Dataset::domains() const {
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::set<std::string> labels;
    for (const auto& row : rows) labels.insert(row[c]);
    out[columns[c]] = {labels.begin(), labels.end()};
  }
  return out;
}

std::vector<std::string> Dataset::feature_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns)
    if (c != class_column) out.push_back(c);
  return out;
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& indices) const {
  Dataset out{columns, {}, class_column};
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(rows.at(i));
  return out;
}

Dataset parse_dataset(std::string_view text, const std::string& class_column) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos
                                                                            : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos)
    lines.pop_back();
  if (lines.empty()) throw ModelError("empty dataset file");

  Dataset data;
  data.columns = split_line(lines.front());
  std::set<std::string> names;
  for (const auto& c : data.columns) {
    if (c.empty()) throw ModelError("empty column name in header");
    if (!names.insert(c).second) throw ModelError("duplicate column '" + c + "'");
  }
  if (!names.count(class_column)) throw ModelError("unknown class column '" + class_column + "'");
  data.class_column = class_column;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_line(lines[i]);
    if (cells.size() != data.columns.size())
      throw ModelError("ragged row " + std::to_string(i) + ": " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(data.columns.size()));
    for (const auto& cell : cells)
      if (cell.empty() || cell == "?")
        throw ModelError("missing value in row " + std::to_string(i));
    data.rows.push_back(std::move(cells));
  }
  return data;
}

std::string serialize_dataset(const Dataset& data) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(data.columns);
  for (const auto& row : data.rows) emit(row);
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& class_column) {
  return parse_dataset(read_file(path), class_column);
}

}  // namespace bntrim
