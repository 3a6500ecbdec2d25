#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bntrim/model.hpp"

namespace bntrim {

/// Parses a network document:
///
///   {"variables": [{"name": "C", "values": ["+", "-"]}, ...],
///    "cpds": [{"child": "Q1", "parents": ["C"], "rows": [[0.9, 0.1], ...]}]}
///
/// Throws ModelError on malformed input (with line/column when the JSON
/// itself is broken) or when the network fails validation.
BayesianNetwork parse_network(std::string_view text);

/// Canonical document: fixed key order, shortest round-trip decimals, LF.
std::string serialize_network(const BayesianNetwork& net);

BayesianNetwork load_network(const std::string& path);

/// Tabular data of discrete labels with a designated class column.
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string class_column;

  int column_index(const std::string& name) const;
  /// Sorted distinct labels per column.
  std::map<std::string, std::vector<std::string>> domains() const;
  std::vector<std::string> feature_columns() const;
  /// Rows selected by index, same columns.
  Dataset subset_rows(const std::vector<std::size_t>& indices) const;
};

/// Comma-separated text with a header row. LF or CRLF line endings; blank
/// trailing lines ignored; empty cells rejected.
Dataset parse_dataset(std::string_view text, const std::string& class_column);
std::string serialize_dataset(const Dataset& data);

Dataset load_dataset(const std::string& path, const std::string& class_column);

std::string read_file(const std::string& path);

}  // namespace bntrim
