#include "cardest/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cardest/infer.hpp"
#include "cardest/structure.hpp"

namespace cardest {

std::string GroupModel::name() const {
  std::string out = members[0];
  for (std::size_t i = 1; i < members.size(); ++i) out += "," + members[i];
  return out;
}

bool GroupModel::has_member(const std::string& table) const {
  return std::binary_search(members.begin(), members.end(), table);
}

int EnsembleModel::group_of(const std::string& table) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].has_member(table)) return static_cast<int>(g);
  return -1;
}

void EnsembleModel::check() const {
  if (groups.empty()) throw Error("ensemble has no groups");
  std::set<std::string> seen;
  for (const auto& g : groups) {
    if (g.members.empty()) throw Error("empty group");
    if (!std::is_sorted(g.members.begin(), g.members.end()))
      throw Error("group members not sorted");
    for (const auto& m : g.members)
      if (!seen.insert(m).second) throw Error("table in more than one group");
    g.model.check();
    if (g.join_size < 0.0) throw Error("negative join size");
  }
  for (const auto& l : links) {
    if (l.group_a < 0 || l.group_b < 0 ||
        l.group_a >= static_cast<int>(groups.size()) ||
        l.group_b >= static_cast<int>(groups.size()) || l.group_a == l.group_b)
      throw Error("bad link endpoints");
  }
}

namespace {

std::vector<std::string> nonkey_attrs(const JoinSchema& schema,
                                      const EncodedTable& t) {
  std::vector<std::string> out;
  for (const auto& a : t.attrs)
    if (!schema.is_key(t.name, a.name)) out.push_back(a.name);
  return out;
}

}  // namespace

DependenceMatrix build_dependence_matrix(const JoinSchema& schema,
                                         const EnsembleOptions& opts) {
  DependenceMatrix m;
  for (const auto& t : schema.tables) {
    m.table_names.push_back(t.name);
    m.attr_counts.push_back(static_cast<int>(nonkey_attrs(schema, t).size()));
  }
  const auto n = m.table_names.size();
  m.scores.assign(n, std::vector<double>(n, 0.0));
  if (n < 2) return m;

  std::vector<std::string> all;
  for (const auto& t : schema.tables) all.push_back(t.name);
  auto sample = sample_full_outer_join(schema, all, opts.sample_rows, opts.seed,
                                       opts.max_join_rows);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ai = nonkey_attrs(schema, schema.tables[i]);
      const auto aj = nonkey_attrs(schema, schema.tables[j]);
      // Dependence is unmeasurable on a handful of rows; score such pairs 0.
      double s = 0.0;
      if (!ai.empty() && !aj.empty() && sample.join.row_count >= 10)
        s = table_pair_rdc(sample.join, ai, aj, opts.rdc);
      m.scores[i][j] = s;
      m.scores[j][i] = s;
    }
  m.check();
  return m;
}

std::vector<std::vector<std::string>> plan_groups(const JoinSchema& schema,
                                                  const DependenceMatrix& m,
                                                  int budget) {
  if (budget < 1) throw Error("budget must be at least 1");
  std::vector<std::vector<std::string>> groups;
  for (const auto& t : schema.tables) groups.push_back({t.name});
  if (budget == 1 || schema.tables.size() < 2) return groups;

  auto adjacent = [&](const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
    for (const auto& j : schema.joins) {
      const bool la = std::binary_search(a.begin(), a.end(), j.left_table);
      const bool lb = std::binary_search(b.begin(), b.end(), j.left_table);
      const bool ra = std::binary_search(a.begin(), a.end(), j.right_table);
      const bool rb = std::binary_search(b.begin(), b.end(), j.right_table);
      if ((la && rb) || (lb && ra)) return true;
    }
    return false;
  };
  auto group_name = [](const std::vector<std::string>& g) {
    std::string out = g[0];
    for (std::size_t i = 1; i < g.size(); ++i) out += "," + g[i];
    return out;
  };

  // Grow the largest permitted unions last: pass k' merges only pairs whose
  // union has exactly k' tables, strongest dependence first.
  for (int target = 2; target <= budget; ++target) {
    struct Cand {
      double score;
      std::string name_a, name_b;
      std::size_t ia, ib;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        if (static_cast<int>(groups[i].size() + groups[j].size()) != target)
          continue;
        if (!adjacent(groups[i], groups[j])) continue;
        Cand c;
        c.score = merged_group_rdc(m, groups[i], groups[j]);
        c.name_a = group_name(groups[i]);
        c.name_b = group_name(groups[j]);
        if (c.name_b < c.name_a) std::swap(c.name_a, c.name_b);
        c.ia = i;
        c.ib = j;
        cands.push_back(std::move(c));
      }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.name_a != b.name_a) return a.name_a < b.name_a;
      return a.name_b < b.name_b;
    });
    std::vector<char> dead(groups.size(), 0);
    std::vector<std::vector<std::string>> merged;
    for (const auto& c : cands) {
      if (dead[c.ia] || dead[c.ib]) continue;
      dead[c.ia] = dead[c.ib] = 1;
      std::vector<std::string> u = groups[c.ia];
      u.insert(u.end(), groups[c.ib].begin(), groups[c.ib].end());
      std::sort(u.begin(), u.end());
      merged.push_back(std::move(u));
    }
    std::vector<std::vector<std::string>> next;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (!dead[i]) next.push_back(std::move(groups[i]));
    for (auto& g : merged) next.push_back(std::move(g));
    std::sort(next.begin(), next.end());
    groups = std::move(next);
  }
  return groups;
}

namespace {

std::string fanout_name(const std::string& from, const std::string& to) {
  return "fanout_" + from + "_" + to;
}

/// Raw key strings of one column of a join table, absent rows flagged empty.
std::vector<std::string> raw_key_column(const EncodedTable& t, const std::string& attr) {
  const int a = t.require_attr(attr);
  const auto& meta = t.attrs[static_cast<std::size_t>(a)];
  std::vector<std::string> out;
  out.reserve(t.row_count);
  for (Code c : t.columns[static_cast<std::size_t>(a)])
    out.push_back(meta.has_absent && c == meta.absent_code() ? std::string()
                                                             : meta.value_of(c));
  return out;
}

}  // namespace

EnsembleModel build_ensemble(const JoinSchema& schema, const EnsembleOptions& opts) {
  std::vector<std::vector<std::string>> groups;
  if (opts.budget == 1 || schema.tables.size() < 2) {
    for (const auto& t : schema.tables) groups.push_back({t.name});
  } else {
    groups = plan_groups(schema, build_dependence_matrix(schema, opts), opts.budget);
  }
  return build_ensemble(schema, groups, opts);
}

EnsembleModel build_ensemble(const JoinSchema& schema,
                             const std::vector<std::vector<std::string>>& groups,
                             const EnsembleOptions& opts) {
  schema.check();
  {
    auto known = [&](const std::string& attr) {
      for (const auto& t : schema.tables)
        for (const auto& a : t.attrs)
          if (a.name == attr) return true;
      return false;
    };
    auto require_known = [&](const std::string& attr) {
      if (!known(attr))
        throw Error("constraint references unknown attribute: " + attr);
    };
    for (const auto& [p, c] : opts.forced_edges) require_known(p), require_known(c);
    for (const auto& [p, c] : opts.forbidden_edges) require_known(p), require_known(c);
    for (const auto& r : opts.forced_roots) require_known(r);
  }
  EnsembleModel em;
  std::vector<GroupJoin> joins;
  for (auto members : groups) {
    std::sort(members.begin(), members.end());
    auto gj = sample_full_outer_join(schema, members, opts.fit_sample_rows,
                                     opts.seed, opts.max_join_rows);
    GroupModel gm;
    gm.members = members;
    gm.join_size = gj.row_count;
    for (const auto& j : schema.joins) {
      const bool l = std::binary_search(members.begin(), members.end(), j.left_table);
      const bool r = std::binary_search(members.begin(), members.end(), j.right_table);
      if (l && r) gm.edges.emplace_back(j.left_table, j.right_table);
    }
    em.groups.push_back(std::move(gm));
    joins.push_back(std::move(gj));
  }

  // Cross-group links: append the outbound scaling column on each side and
  // average row-expansion factors for growing the query scope.
  for (const auto& j : schema.joins) {
    const int ga = em.group_of(j.left_table);
    const int gb = em.group_of(j.right_table);
    if (ga < 0 || gb < 0) throw Error("join references a table outside every group");
    if (ga == gb) continue;
    GroupLink link;
    link.group_a = ga;
    link.group_b = gb;
    link.table_a = j.left_table;
    link.table_b = j.right_table;
    link.fanout_attr_a = fanout_name(j.left_table, j.right_table);
    link.fanout_attr_b = fanout_name(j.right_table, j.left_table);

    struct Side {
      int group;
      std::string table, key, attr;
      int other_group;
      std::string other_table, other_key;
      double* expand;
    };
    Side sides[2] = {
        {ga, j.left_table, j.left_key, link.fanout_attr_a, gb, j.right_table,
         j.right_key, &link.expand_a_to_b},
        {gb, j.right_table, j.right_key, link.fanout_attr_b, ga, j.left_table,
         j.left_key, &link.expand_b_to_a}};
    for (const auto& s : sides) {
      auto& my_join = joins[static_cast<std::size_t>(s.group)];
      const auto& other_join = joins[static_cast<std::size_t>(s.other_group)];
      auto counts = key_row_counts(other_join, s.other_table + "." + s.other_key);
      auto keys = raw_key_column(my_join.join, s.table + "." + s.key);
      std::vector<double> vals;
      vals.reserve(keys.size());
      double mean_max = 0.0;
      for (const auto& k : keys) {
        double v = 0.0;
        if (!k.empty()) {
          auto it = counts.find(k);
          if (it != counts.end()) v = it->second;
        }
        vals.push_back(v);
        mean_max += std::max(v, 1.0);
      }
      mean_max /= static_cast<double>(keys.size());
      // Other-side join rows whose key never occurs in this base table dangle
      // into the combined scope as well.
      const auto& base = schema.table(s.table);
      const int ka = base.require_attr(s.key);
      std::set<std::string> base_keys;
      for (Code c : base.columns[static_cast<std::size_t>(ka)])
        base_keys.insert(base.attrs[static_cast<std::size_t>(ka)].value_of(c));
      double unmatched = 0.0;
      for (const auto& [k, v] : counts)
        if (!base_keys.count(k)) unmatched += v;
      *s.expand = mean_max +
                  unmatched / em.groups[static_cast<std::size_t>(s.group)].join_size;
      append_numeric_column(my_join.join, s.attr, vals);
    }
    em.links.push_back(std::move(link));
  }

  // Fit one network per group over the non-key columns.
  for (std::size_t g = 0; g < em.groups.size(); ++g) {
    auto& gm = em.groups[g];
    const auto& full = joins[g].join;
    EncodedTable sub;
    sub.name = gm.name();
    sub.row_count = full.row_count;
    for (std::size_t a = 0; a < full.attrs.size(); ++a) {
      const auto& name = full.attrs[a].name;
      if (name.find('.') != std::string::npos) continue;  // table-qualified key
      sub.attrs.push_back(full.attrs[a]);
      sub.columns.push_back(full.columns[a]);
      for (const auto& [k, v] : full.metadata)
        if (k == "table_of_" + name) gm.attr_tables.emplace_back(name, v);
    }
    sub.check();
    if (sub.attrs.empty()) throw Error("group has no modelable attributes: " + gm.name());

    Dag dag;
    if (opts.saturated_structure) {
      // Every node keeps all earlier nodes as parents: the fitted joint is
      // exactly the empirical distribution.  Exponential in attribute count.
      dag.node_count = static_cast<int>(sub.attrs.size());
      for (int i = 0; i < dag.node_count; ++i)
        for (int j = i + 1; j < dag.node_count; ++j) dag.edges.emplace_back(i, j);
      dag.refresh_topo_order();
    } else if (sub.attrs.size() == 1) {
      dag.node_count = 1;
      dag.refresh_topo_order();
    } else {
      StructureConstraints sc;
      for (const auto& [p, c] : opts.forced_edges) {
        const int pi = sub.attr_index(p), ci = sub.attr_index(c);
        if (pi >= 0 && ci >= 0) sc.forced_edges.emplace_back(pi, ci);
      }
      for (const auto& [p, c] : opts.forbidden_edges) {
        const int pi = sub.attr_index(p), ci = sub.attr_index(c);
        if (pi >= 0 && ci >= 0) sc.forbidden_edges.emplace_back(pi, ci);
      }
      for (const auto& r : opts.forced_roots) {
        const int ri = sub.attr_index(r);
        if (ri >= 0) sc.forced_roots.push_back(ri);
      }
      if (opts.greedy_structure)
        dag = greedy_hill_climb(sub, sc, opts.max_parents);
      else
        dag = chow_liu(sub, sc);
    }
    gm.model = fit_bayesnet(sub, dag, opts.alpha, gm.name());
  }
  em.check();
  return em;
}

namespace {

struct GroupPlan {
  BnQuery q;
  NodeWeights w;
};

/// Code region of a numeric categorical attribute excluding value 0.
std::vector<Code> nonzero_region(const AttributeMeta& meta) {
  std::vector<Code> codes;
  for (Code c = 0; c < meta.domain_size(); ++c)
    if (!(meta.has_absent && c == meta.absent_code()) &&
        numeric_code_value(meta, c) != 0.0)
      codes.push_back(c);
  return codes;
}

void intersect_region(BnQuery& q, int node, const std::vector<Code>& region) {
  auto& slot = q.regions[static_cast<std::size_t>(node)];
  if (!slot.has_value()) {
    slot = region;
    return;
  }
  std::vector<Code> merged;
  std::set_intersection(slot->begin(), slot->end(), region.begin(), region.end(),
                        std::back_inserter(merged));
  slot = std::move(merged);
}

void add_weight(NodeWeights& w, const BayesNet& bn, int node, bool reciprocal) {
  const auto& meta = bn.attrs[static_cast<std::size_t>(node)];
  std::vector<double> vec(static_cast<std::size_t>(meta.domain_size()), 1.0);
  for (Code c = 0; c < meta.domain_size(); ++c) {
    if (meta.has_absent && c == meta.absent_code()) continue;
    const double v = std::max(numeric_code_value(meta, c), 1.0);
    vec[static_cast<std::size_t>(c)] = reciprocal ? 1.0 / v : v;
  }
  auto& slot = w.weights[static_cast<std::size_t>(node)];
  if (!slot.has_value()) {
    slot = std::move(vec);
    return;
  }
  for (std::size_t i = 0; i < vec.size(); ++i) (*slot)[i] *= vec[i];
}

GroupPlan plan_group_query(const GroupModel& gm, const Query& query,
                           const std::set<std::string>& touched,
                           const std::vector<std::string>& child_link_attrs) {
  const auto& bn = gm.model;
  GroupPlan gp;
  gp.q = resolve_query(bn, query.predicates);
  gp.w = NodeWeights::none(bn.dag.node_count);

  std::vector<std::string> my_touched;
  for (const auto& m : gm.members)
    if (touched.count(m)) my_touched.push_back(m);
  if (my_touched.empty()) throw Error("group not touched by the query");

  // Presence: a touched table's row-multiplicity column is nonzero exactly
  // when the table's side of the join row exists.
  for (const auto& t : my_touched) {
    const int node = bn.attr_index("fanout_rc_" + t);
    if (node < 0) continue;  // single-table group
    intersect_region(gp.q, node, nonzero_region(bn.attrs[static_cast<std::size_t>(node)]));
  }

  // De-duplication: orient the member tree away from the touched tables and
  // divide out the key multiplicities along every edge leaving them.
  if (gm.members.size() > 1) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [a, b] : gm.edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::set<std::string> steiner(my_touched.begin(), my_touched.end());
    // Grow the touched set to its closure: repeatedly strip untouched leaves
    // of the member tree; what survives is on a path between touched tables.
    std::map<std::string, int> degree;
    std::set<std::string> alive(gm.members.begin(), gm.members.end());
    for (const auto& [t, nb] : adj) degree[t] = static_cast<int>(nb.size());
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& t : gm.members) {
        if (!alive.count(t) || steiner.count(t) || degree[t] > 1) continue;
        alive.erase(t);
        for (const auto& nb : adj[t])
          if (alive.count(nb)) --degree[nb];
        changed = true;
      }
    }
    // Orientation away from the root: BFS from the first touched table.
    std::map<std::string, std::string> parent;
    std::vector<std::string> frontier{my_touched[0]};
    std::set<std::string> seen{my_touched[0]};
    while (!frontier.empty()) {
      std::vector<std::string> next;
      for (const auto& u : frontier)
        for (const auto& v : adj[u])
          if (seen.insert(v).second) {
            parent[v] = u;
            next.push_back(v);
          }
      frontier = std::move(next);
    }
    for (const auto& [child, par] : parent) {
      if (alive.count(child)) continue;  // edge inside the touched closure
      const int node = bn.attr_index(fanout_name(par, child));
      if (node < 0) throw Error("missing scaling column " + fanout_name(par, child));
      add_weight(gp.w, bn, node, /*reciprocal=*/true);
    }
  }

  // Expected matches toward each downstream touched group.
  for (const auto& attr : child_link_attrs) {
    const int node = bn.attr_index(attr);
    if (node < 0) throw Error("missing scaling column " + attr);
    add_weight(gp.w, bn, node, /*reciprocal=*/false);
  }
  return gp;
}

}  // namespace

QueryPlanInfo analyze_query(const EnsembleModel& ensemble, const Query& query) {
  if (query.tables.empty()) throw Error("query names no tables");
  std::set<std::string> touched(query.tables.begin(), query.tables.end());
  std::set<int> tg;
  for (const auto& t : touched) {
    const int g = ensemble.group_of(t);
    if (g < 0) throw Error("unknown table: " + t);
    tg.insert(g);
  }

  // Span the touched groups from the lowest-index one; every traversal step
  // scales the scope size by the link's average expansion.
  const int root = *tg.begin();
  std::map<int, std::vector<std::string>> child_attrs;  // group -> outbound cols
  double scope = ensemble.groups[static_cast<std::size_t>(root)].join_size;
  std::set<int> seen{root};
  std::vector<int> frontier{root};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int g : frontier) {
      for (const auto& l : ensemble.links) {
        int other = -1;
        bool from_a = false;
        if (l.group_a == g && tg.count(l.group_b)) {
          other = l.group_b;
          from_a = true;
        } else if (l.group_b == g && tg.count(l.group_a)) {
          other = l.group_a;
        }
        if (other < 0 || seen.count(other)) continue;
        seen.insert(other);
        next.push_back(other);
        scope *= from_a ? l.expand_a_to_b : l.expand_b_to_a;
        child_attrs[g].push_back(from_a ? l.fanout_attr_a : l.fanout_attr_b);
      }
    }
    frontier = std::move(next);
  }
  if (seen.size() != tg.size())
    throw Error("query tables do not form a connected join");

  QueryPlanInfo info;
  info.scope = scope;
  for (int g : tg) {
    const auto& gm = ensemble.groups[static_cast<std::size_t>(g)];
    auto it = child_attrs.find(g);
    auto gp = plan_group_query(gm, query, touched,
                               it == child_attrs.end() ? std::vector<std::string>{}
                                                       : it->second);
    info.groups.push_back(g);
    info.queries.push_back(std::move(gp.q));
    info.weights.push_back(std::move(gp.w));
  }
  return info;
}

double estimate_cardinality(const EnsembleModel& ensemble, const Query& query,
                            const EstimateOptions& opts, PlanCache* cache) {
  auto info = analyze_query(ensemble, query);
  PlanCache local_cache;
  double estimate = info.scope;
  for (std::size_t i = 0; i < info.groups.size(); ++i) {
    const auto& gm = ensemble.groups[static_cast<std::size_t>(info.groups[i])];
    double p = 0.0;
    switch (opts.backend) {
      case Backend::Exact:
        p = exact_expectation(gm.model, info.queries[i], info.weights[i]);
        break;
      case Backend::CachedExact:
        p = cached_expectation(cache ? *cache : local_cache, gm.model,
                               info.queries[i], info.weights[i]);
        break;
      case Backend::Sampled:
        p = sampled_expectation(gm.model, info.queries[i], info.weights[i],
                                opts.sample_count, opts.seed);
        break;
    }
    estimate *= (gm.join_size / info.scope) * p;
  }
  return estimate;
}

std::size_t update_from_csv(EnsembleModel& ensemble, const std::string& csv_path,
                            bool insert) {
  const auto cells = read_csv(csv_path);
  if (cells.empty()) throw Error("update file has no header: " + csv_path);
  const auto& header = cells.front();

  for (auto& gm : ensemble.groups) {
    BayesNet& bn = gm.model;
    if (header.size() != bn.attrs.size()) continue;
    std::set<std::string> names(header.begin(), header.end());
    bool all = true;
    for (const auto& a : bn.attrs) all = all && names.count(a.name) > 0;
    if (!all) continue;

    std::vector<std::size_t> col_of;  // header position per model attribute
    for (const auto& a : bn.attrs)
      for (std::size_t h = 0; h < header.size(); ++h)
        if (header[h] == a.name) col_of.push_back(h);

    std::vector<std::vector<Code>> rows;
    for (std::size_t r = 1; r < cells.size(); ++r) {
      if (cells[r].size() != header.size())
        throw Error("update row " + std::to_string(r) + " has wrong width");
      std::vector<Code> row;
      for (std::size_t a = 0; a < bn.attrs.size(); ++a) {
        const auto& raw = cells[r][col_of[a]];
        const auto code = bn.attrs[a].code_of(raw);
        if (!code)
          throw Error("value '" + raw + "' outside the trained domain of " +
                      bn.attrs[a].name);
        row.push_back(*code);
      }
      rows.push_back(std::move(row));
    }
    if (insert)
      update_insert(bn, rows);
    else
      update_delete(bn, rows);
    gm.join_size = static_cast<double>(bn.row_count);
    return rows.size();
  }
  throw Error("update columns do not match any group model in " + csv_path);
}

}  // namespace cardest
