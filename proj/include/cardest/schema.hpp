#pragma once

#include <map>
#include <string>
#include <vector>

#include "cardest/table.hpp"

namespace cardest {

struct JoinEdge {
  std::string left_table;
  std::string left_key;
  std::string right_table;
  std::string right_key;
};

/// A database schema whose join graph forms a tree. Attribute names must be
/// unique across tables; join keys are loaded as categorical columns but are
/// not modeled by Bayesian networks.
struct JoinSchema {
  std::vector<EncodedTable> tables;
  std::vector<JoinEdge> joins;

  int table_index(std::string_view name) const;
  const EncodedTable& table(std::string_view name) const;
  bool is_key(const std::string& table_name, const std::string& attr) const;
  /// Indices of tables adjacent to `t` in the join tree, with the edge index.
  std::vector<std::pair<int, int>> neighbors(int t) const;
  /// Validates tree-ness, key presence, and attribute-name uniqueness.
  void check() const;
  /// True when the named tables induce a connected subtree.
  bool connected(const std::vector<std::string>& names) const;
};

/// Load a schema description {tables: [{name, csv, attrs: [...]}], joins: [...]}
/// from JSON, pulling in the referenced CSV files. Join keys missing from the
/// attrs list are appended automatically as categorical attributes.
JoinSchema load_schema(const std::string& json_path);

}  // namespace cardest
