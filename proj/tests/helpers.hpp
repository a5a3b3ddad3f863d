#pragma once

#include <string>
#include <vector>

#include "cardest/table.hpp"

namespace cardest::testing {

inline AttributeMeta cat_attr(const std::string& name, int domain) {
  AttributeMeta a;
  a.name = name;
  a.kind = AttrKind::Categorical;
  for (int i = 0; i < domain; ++i) a.values.push_back(std::to_string(i));
  return a;
}

/// Build a table from row-major integer data with categorical attributes
/// whose raw values are the decimal codes.
inline EncodedTable make_table(const std::vector<std::string>& names,
                               const std::vector<int>& domains,
                               const std::vector<std::vector<Code>>& rows) {
  EncodedTable t;
  t.name = "t";
  for (std::size_t i = 0; i < names.size(); ++i)
    t.attrs.push_back(cat_attr(names[i], domains[i]));
  t.columns.assign(names.size(), {});
  for (const auto& row : rows)
    for (std::size_t i = 0; i < names.size(); ++i)
      t.columns[i].push_back(row[i]);
  t.row_count = rows.size();
  t.check();
  return t;
}

}  // namespace cardest::testing
