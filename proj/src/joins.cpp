#include "cardest/joins.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cardest/rng.hpp"

namespace cardest {

int GroupJoin::member_of_attr(const std::string& attr) const {
  for (const auto& [k, v] : join.metadata)
    if (k == "table_of_" + attr)
      for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i] == v) return static_cast<int>(i);
  return -1;
}

void append_numeric_column(EncodedTable& table, const std::string& name,
                           const std::vector<double>& values) {
  if (values.size() != table.row_count) throw Error("column length mismatch");
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() > 100000) throw Error("too many distinct values for a numeric column");

  AttributeMeta meta;
  meta.name = name;
  meta.kind = AttrKind::Categorical;
  std::unordered_map<double, Code> code_of;
  for (double v : distinct) {
    std::ostringstream os;
    if (v == std::floor(v) && std::abs(v) < 1e15)
      os << static_cast<long long>(v);
    else
      os << v;
    code_of[v] = static_cast<Code>(meta.values.size());
    meta.values.push_back(os.str());
  }
  std::vector<Code> col;
  col.reserve(values.size());
  for (double v : values) col.push_back(code_of[v]);
  table.attrs.push_back(std::move(meta));
  table.columns.push_back(std::move(col));
}

double numeric_code_value(const AttributeMeta& meta, Code c) {
  if (meta.has_absent && c == meta.absent_code())
    throw Error("absent code has no numeric value");
  double out = 0.0;
  if (!parse_number(meta.value_of(c), out))
    throw Error("attribute value is not numeric: " + meta.value_of(c));
  return out;
}

namespace {

// Provenance of one join row: per-member base-row index, -1 when absent.
using Prov = std::vector<std::int64_t>;

struct JoinBuild {
  std::vector<std::string> members;       // sorted
  std::vector<int> member_tables;         // schema table index per member
  std::vector<Prov> rows;
};

std::string key_raw(const EncodedTable& t, const std::string& key, std::int64_t row) {
  const int a = t.require_attr(key);
  return t.attrs[static_cast<std::size_t>(a)].value_of(
      t.columns[static_cast<std::size_t>(a)][static_cast<std::size_t>(row)]);
}

JoinBuild build_join(const JoinSchema& schema, std::vector<std::string> members,
                     std::size_t max_rows) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) throw Error("join needs at least one table");
  if (!schema.connected(members)) throw Error("tables do not form a connected subtree");

  JoinBuild jb;
  jb.members = members;
  for (const auto& m : members) jb.member_tables.push_back(schema.table_index(m));

  auto member_index = [&](const std::string& name) {
    auto it = std::find(members.begin(), members.end(), name);
    return it == members.end() ? -1 : static_cast<int>(it - members.begin());
  };

  // Seed with the first member's rows, then fold in one adjacent table at a
  // time (binary full outer joins compose exactly on a tree).
  const auto& first = schema.tables[static_cast<std::size_t>(jb.member_tables[0])];
  for (std::size_t r = 0; r < first.row_count; ++r) {
    Prov p(members.size(), -1);
    p[0] = static_cast<std::int64_t>(r);
    jb.rows.push_back(std::move(p));
  }

  std::vector<char> joined(members.size(), 0);
  joined[0] = 1;
  for (std::size_t step = 1; step < members.size(); ++step) {
    // Next edge with exactly one endpoint joined, lowest join index first.
    int edge = -1, mu = -1, mv = -1;
    std::string u_key, v_key;
    for (std::size_t e = 0; e < schema.joins.size(); ++e) {
      const auto& j = schema.joins[e];
      const int ml = member_index(j.left_table), mr = member_index(j.right_table);
      if (ml < 0 || mr < 0) continue;
      if (joined[static_cast<std::size_t>(ml)] && !joined[static_cast<std::size_t>(mr)]) {
        edge = static_cast<int>(e), mu = ml, mv = mr;
        u_key = j.left_key, v_key = j.right_key;
        break;
      }
      if (joined[static_cast<std::size_t>(mr)] && !joined[static_cast<std::size_t>(ml)]) {
        edge = static_cast<int>(e), mu = mr, mv = ml;
        u_key = j.right_key, v_key = j.left_key;
        break;
      }
    }
    if (edge < 0) throw Error("join tree traversal stuck");
    (void)edge;

    const auto& ut = schema.tables[static_cast<std::size_t>(jb.member_tables[static_cast<std::size_t>(mu)])];
    const auto& vt = schema.tables[static_cast<std::size_t>(jb.member_tables[static_cast<std::size_t>(mv)])];
    std::unordered_map<std::string, std::vector<std::int64_t>> v_rows;
    for (std::size_t r = 0; r < vt.row_count; ++r)
      v_rows[key_raw(vt, v_key, static_cast<std::int64_t>(r))].push_back(
          static_cast<std::int64_t>(r));

    std::vector<Prov> next;
    std::vector<char> v_matched(vt.row_count, 0);
    for (const auto& row : jb.rows) {
      const auto ur = row[static_cast<std::size_t>(mu)];
      if (ur < 0) {
        next.push_back(row);
        continue;
      }
      auto it = v_rows.find(key_raw(ut, u_key, ur));
      if (it == v_rows.end()) {
        next.push_back(row);
        continue;
      }
      for (auto vr : it->second) {
        v_matched[static_cast<std::size_t>(vr)] = 1;
        Prov p = row;
        p[static_cast<std::size_t>(mv)] = vr;
        next.push_back(std::move(p));
        if (next.size() > max_rows) throw Error("full join exceeds the row limit");
      }
    }
    for (std::size_t r = 0; r < vt.row_count; ++r) {
      if (v_matched[r]) continue;
      Prov p(members.size(), -1);
      p[static_cast<std::size_t>(mv)] = static_cast<std::int64_t>(r);
      next.push_back(std::move(p));
    }
    if (next.size() > max_rows) throw Error("full join exceeds the row limit");
    jb.rows = std::move(next);
    joined[static_cast<std::size_t>(mv)] = 1;
  }
  return jb;
}

GroupJoin encode_join(const JoinSchema& schema, const JoinBuild& jb) {
  GroupJoin g;
  g.members = jb.members;
  g.row_count = static_cast<double>(jb.rows.size());
  auto& out = g.join;
  out.name = jb.members[0];
  for (std::size_t i = 1; i < jb.members.size(); ++i) out.name += "+" + jb.members[i];
  out.row_count = jb.rows.size();

  const bool multi = jb.members.size() > 1;
  for (std::size_t m = 0; m < jb.members.size(); ++m) {
    const auto& t = schema.tables[static_cast<std::size_t>(jb.member_tables[m])];
    for (std::size_t a = 0; a < t.attrs.size(); ++a) {
      AttributeMeta meta = t.attrs[a];
      // Key columns get table-qualified names; keys may repeat across tables.
      if (schema.is_key(jb.members[m], meta.name))
        meta.name = jb.members[m] + "." + meta.name;
      meta.has_absent = multi;
      std::vector<Code> col;
      col.reserve(jb.rows.size());
      for (const auto& row : jb.rows)
        col.push_back(row[m] < 0 ? meta.absent_code()
                                 : t.columns[a][static_cast<std::size_t>(row[m])]);
      out.metadata.emplace_back("table_of_" + meta.name, jb.members[m]);
      out.attrs.push_back(std::move(meta));
      out.columns.push_back(std::move(col));
    }
  }

  if (multi) {
    // Per-member row multiplicity in the join.
    for (std::size_t m = 0; m < jb.members.size(); ++m) {
      std::unordered_map<std::int64_t, double> tally;
      for (const auto& row : jb.rows)
        if (row[m] >= 0) tally[row[m]] += 1.0;
      std::vector<double> vals;
      vals.reserve(jb.rows.size());
      for (const auto& row : jb.rows)
        vals.push_back(row[m] < 0 ? 0.0 : tally[row[m]]);
      append_numeric_column(out, "fanout_rc_" + jb.members[m], vals);
      out.metadata.emplace_back("fanout_kind_fanout_rc_" + jb.members[m], "rowcount");
    }
    // Directed key multiplicities across every in-group edge.
    auto member_index = [&](const std::string& name) {
      auto it = std::find(jb.members.begin(), jb.members.end(), name);
      return it == jb.members.end() ? -1 : static_cast<int>(it - jb.members.begin());
    };
    for (const auto& j : schema.joins) {
      const int ml = member_index(j.left_table), mr = member_index(j.right_table);
      if (ml < 0 || mr < 0) continue;
      struct Dir {
        int src, dst;
        std::string src_key, dst_key;
      };
      for (const auto& d : {Dir{ml, mr, j.left_key, j.right_key},
                            Dir{mr, ml, j.right_key, j.left_key}}) {
        const auto& st = schema.tables[static_cast<std::size_t>(jb.member_tables[static_cast<std::size_t>(d.src)])];
        const auto& dt = schema.tables[static_cast<std::size_t>(jb.member_tables[static_cast<std::size_t>(d.dst)])];
        std::unordered_map<std::string, double> matches;
        for (std::size_t r = 0; r < dt.row_count; ++r)
          matches[key_raw(dt, d.dst_key, static_cast<std::int64_t>(r))] += 1.0;
        std::vector<double> vals;
        vals.reserve(jb.rows.size());
        for (const auto& row : jb.rows) {
          const auto sr = row[static_cast<std::size_t>(d.src)];
          if (sr < 0) {
            vals.push_back(0.0);
            continue;
          }
          auto it = matches.find(key_raw(st, d.src_key, sr));
          vals.push_back(it == matches.end() ? 0.0 : it->second);
        }
        const std::string nm = "fanout_" + jb.members[static_cast<std::size_t>(d.src)] +
                               "_" + jb.members[static_cast<std::size_t>(d.dst)];
        append_numeric_column(out, nm, vals);
        out.metadata.emplace_back("fanout_kind_" + nm, "edge");
      }
    }
  }
  out.check();
  return g;
}

}  // namespace

GroupJoin full_outer_join(const JoinSchema& schema,
                          const std::vector<std::string>& members,
                          std::size_t max_rows) {
  return encode_join(schema, build_join(schema, members, max_rows));
}

GroupJoin sample_full_outer_join(const JoinSchema& schema,
                                 const std::vector<std::string>& members,
                                 std::size_t n, std::uint64_t seed,
                                 std::size_t max_rows) {
  auto jb = build_join(schema, members, max_rows);
  const std::size_t total = jb.rows.size();
  if (n == 0) throw Error("sample size must be positive");
  if (total > n) {
    // Partial Fisher-Yates, then restore row order.
    Rng rng(seed);
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i)
      std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.next_below(total - i))]);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    std::vector<Prov> picked;
    picked.reserve(n);
    for (auto i : idx) picked.push_back(std::move(jb.rows[i]));
    jb.rows = std::move(picked);
  }
  auto g = encode_join(schema, jb);
  g.row_count = static_cast<double>(total);
  g.sampled = total > n;
  return g;
}

double full_join_size(const JoinSchema& schema,
                      const std::vector<std::string>& members) {
  return static_cast<double>(build_join(schema, members, 5000000).rows.size());
}

std::map<std::string, double> key_row_counts(const GroupJoin& g,
                                             const std::string& key_attr) {
  const int a = g.join.require_attr(key_attr);
  const auto& meta = g.join.attrs[static_cast<std::size_t>(a)];
  std::map<std::string, double> counts;
  for (Code c : g.join.columns[static_cast<std::size_t>(a)]) {
    if (meta.has_absent && c == meta.absent_code()) continue;
    counts[meta.value_of(c)] += 1.0;
  }
  if (g.sampled && g.join.row_count > 0) {
    const double scale = g.row_count / static_cast<double>(g.join.row_count);
    for (auto& [k, v] : counts) v *= scale;
  }
  return counts;
}

}  // namespace cardest
