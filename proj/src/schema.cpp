#include "cardest/schema.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

namespace cardest {

int JoinSchema::table_index(std::string_view name) const {
  for (std::size_t i = 0; i < tables.size(); ++i)
    if (tables[i].name == name) return static_cast<int>(i);
  return -1;
}

const EncodedTable& JoinSchema::table(std::string_view name) const {
  int i = table_index(name);
  if (i < 0) throw Error("unknown table: " + std::string(name));
  return tables[static_cast<std::size_t>(i)];
}

bool JoinSchema::is_key(const std::string& table_name, const std::string& attr) const {
  for (const auto& j : joins) {
    if (j.left_table == table_name && j.left_key == attr) return true;
    if (j.right_table == table_name && j.right_key == attr) return true;
  }
  return false;
}

std::vector<std::pair<int, int>> JoinSchema::neighbors(int t) const {
  std::vector<std::pair<int, int>> out;
  const auto& name = tables[static_cast<std::size_t>(t)].name;
  for (std::size_t e = 0; e < joins.size(); ++e) {
    if (joins[e].left_table == name)
      out.emplace_back(table_index(joins[e].right_table), static_cast<int>(e));
    else if (joins[e].right_table == name)
      out.emplace_back(table_index(joins[e].left_table), static_cast<int>(e));
  }
  return out;
}

void JoinSchema::check() const {
  // Modeled attribute names must be unique across tables; join keys may
  // legitimately share a name on both sides of an edge.
  std::set<std::string> attr_names;
  for (const auto& t : tables) {
    for (const auto& a : t.attrs) {
      if (is_key(t.name, a.name)) continue;
      if (!attr_names.insert(a.name).second)
        throw Error("attribute name " + a.name + " appears in more than one table");
    }
  }
  for (const auto& j : joins) {
    table(j.left_table).require_attr(j.left_key);
    table(j.right_table).require_attr(j.right_key);
  }
  if (tables.size() > 1 && joins.size() != tables.size() - 1)
    throw Error("join graph is not a tree (edge count mismatch)");
  // Acyclicity and connectivity via union-find.
  std::vector<int> parent(tables.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (const auto& j : joins) {
    int a = find(table_index(j.left_table));
    int b = find(table_index(j.right_table));
    if (a == b) throw Error("join graph contains a cycle");
    parent[static_cast<std::size_t>(a)] = b;
  }
}

bool JoinSchema::connected(const std::vector<std::string>& names) const {
  if (names.empty()) return false;
  std::set<int> want;
  for (const auto& n : names) {
    int i = table_index(n);
    if (i < 0) return false;
    want.insert(i);
  }
  std::set<int> seen{*want.begin()};
  std::vector<int> stack{*want.begin()};
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    for (auto [nb, e] : neighbors(t)) {
      (void)e;
      if (want.count(nb) && !seen.count(nb)) {
        seen.insert(nb);
        stack.push_back(nb);
      }
    }
  }
  return seen.size() == want.size();
}

JoinSchema load_schema(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error("cannot open schema file: " + json_path);
  nlohmann::json doc = nlohmann::json::parse(in);

  JoinSchema schema;
  for (const auto& j : doc.at("joins")) {
    JoinEdge e;
    e.left_table = j.at("left_table");
    e.left_key = j.at("left_key");
    e.right_table = j.at("right_table");
    e.right_key = j.at("right_key");
    schema.joins.push_back(e);
  }

  const auto base = std::filesystem::path(json_path).parent_path();
  for (const auto& tj : doc.at("tables")) {
    const std::string name = tj.at("name");
    std::vector<AttrDecl> decls;
    for (const auto& aj : tj.at("attrs")) {
      AttrDecl d;
      d.name = aj.at("name");
      const std::string kind = aj.value("kind", "categorical");
      if (kind == "categorical")
        d.kind = AttrKind::Categorical;
      else if (kind == "continuous")
        d.kind = AttrKind::BinnedContinuous;
      else
        throw Error("unknown attribute kind: " + kind);
      d.bins = aj.value("bins", 64);
      decls.push_back(d);
    }
    // Join keys ride along as categorical columns.
    for (const auto& j : schema.joins) {
      for (const auto& [tn, kn] :
           {std::pair{j.left_table, j.left_key}, std::pair{j.right_table, j.right_key}}) {
        if (tn != name) continue;
        bool declared = false;
        for (const auto& d : decls) declared |= d.name == kn;
        if (!declared) decls.push_back({kn, AttrKind::Categorical, 0});
      }
    }
    std::string csv = tj.at("csv");
    std::filesystem::path p(csv);
    if (p.is_relative()) p = base / p;
    schema.tables.push_back(load_table(p.string(), name, decls));
  }
  schema.check();
  return schema;
}

}  // namespace cardest
