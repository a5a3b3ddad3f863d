#include "cardest/workload.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "cardest/rng.hpp"

namespace cardest {

namespace {

std::vector<int> pick_distinct(Rng& rng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

Predicate make_predicate(Rng& rng, const AttributeMeta& meta, int max_in) {
  Predicate p;
  p.attr = meta.name;
  if (meta.kind == AttrKind::BinnedContinuous) {
    p.op = PredOp::Range;
    const double span = meta.edges.back() - meta.edges.front();
    double a = meta.edges.front() + rng.next_double() * span;
    double b = meta.edges.front() + rng.next_double() * span;
    p.lo = std::min(a, b);
    p.hi = std::max(a, b);
  } else {
    p.op = PredOp::In;
    const int d = meta.base_domain_size();
    const int k = 1 + static_cast<int>(rng.next_below(
                          static_cast<std::uint64_t>(std::min(max_in, d))));
    for (int c : pick_distinct(rng, d, k))
      p.values.push_back(meta.values[static_cast<std::size_t>(c)]);
    std::sort(p.values.begin(), p.values.end());
  }
  return p;
}

Query make_query(Rng& rng, const std::vector<std::string>& tables,
                 const std::vector<const AttributeMeta*>& eligible,
                 const WorkloadOptions& opts) {
  if (eligible.empty()) throw Error("no filterable attributes available");
  const int lo = std::min<int>(opts.min_filters, static_cast<int>(eligible.size()));
  const int hi = std::min<int>(opts.max_filters, static_cast<int>(eligible.size()));
  if (opts.min_filters > static_cast<int>(eligible.size()))
    throw Error("predicate bounds exceed available attributes");
  const int nf = lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  Query q;
  q.tables = tables;
  for (int idx : pick_distinct(rng, static_cast<int>(eligible.size()), nf))
    q.predicates.push_back(
        make_predicate(rng, *eligible[static_cast<std::size_t>(idx)], opts.max_in_values));
  return q;
}

}  // namespace

std::vector<Query> gen_workload(const EncodedTable& table, const WorkloadOptions& opts) {
  if (opts.count < 1) throw Error("workload count must be at least 1");
  Rng rng(opts.seed);
  std::vector<const AttributeMeta*> eligible;
  for (const auto& a : table.attrs) eligible.push_back(&a);
  std::vector<Query> out;
  for (std::size_t i = 0; i < opts.count; ++i)
    out.push_back(make_query(rng, {table.name}, eligible, opts));
  return out;
}

std::vector<Query> gen_workload(const JoinSchema& schema, const WorkloadOptions& opts) {
  if (opts.count < 1) throw Error("workload count must be at least 1");
  if (opts.max_tables > static_cast<int>(schema.tables.size()))
    throw Error("table bounds exceed schema size");
  Rng rng(opts.seed);
  std::vector<Query> out;
  for (std::size_t i = 0; i < opts.count; ++i) {
    const int want = opts.min_tables +
                     static_cast<int>(rng.next_below(static_cast<std::uint64_t>(
                         opts.max_tables - opts.min_tables + 1)));
    std::set<int> chosen{static_cast<int>(rng.next_below(schema.tables.size()))};
    while (static_cast<int>(chosen.size()) < want) {
      std::set<int> frontier;
      for (int t : chosen)
        for (auto [nb, e] : schema.neighbors(t)) {
          (void)e;
          if (!chosen.count(nb)) frontier.insert(nb);
        }
      if (frontier.empty()) break;
      std::vector<int> cand(frontier.begin(), frontier.end());
      chosen.insert(cand[rng.next_below(cand.size())]);
    }
    std::vector<std::string> names;
    std::vector<const AttributeMeta*> eligible;
    for (int t : chosen) {
      const auto& tab = schema.tables[static_cast<std::size_t>(t)];
      names.push_back(tab.name);
      for (const auto& a : tab.attrs)
        if (!schema.is_key(tab.name, a.name)) eligible.push_back(&a);
    }
    std::sort(names.begin(), names.end());
    out.push_back(make_query(rng, names, eligible, opts));
  }
  return out;
}

namespace {

std::vector<char> row_mask(const EncodedTable& table, const Query& query) {
  std::vector<char> keep(table.row_count, 1);
  for (const auto& pred : query.predicates) {
    const int idx = table.attr_index(pred.attr);
    if (idx < 0) continue;
    const QueryRegion region = encode_region(table.attrs[static_cast<std::size_t>(idx)], pred);
    std::vector<char> in_region(static_cast<std::size_t>(
                                    table.attrs[static_cast<std::size_t>(idx)].domain_size()),
                                0);
    for (Code c : region.codes) in_region[static_cast<std::size_t>(c)] = 1;
    const auto& col = table.columns[static_cast<std::size_t>(idx)];
    for (std::size_t r = 0; r < table.row_count; ++r)
      if (!in_region[static_cast<std::size_t>(col[r])]) keep[r] = 0;
  }
  return keep;
}

}  // namespace

double true_cardinality(const EncodedTable& table, const Query& query) {
  for (const auto& pred : query.predicates)
    table.require_attr(pred.attr);
  auto keep = row_mask(table, query);
  std::size_t n = 0;
  for (char k : keep) n += static_cast<std::size_t>(k);
  return static_cast<double>(n);
}

double true_cardinality(const JoinSchema& schema, const Query& query) {
  if (query.tables.size() == 1)
    return true_cardinality(schema.table(query.tables.front()), query);
  if (!schema.connected(query.tables))
    throw Error("query tables do not form a connected subtree");

  std::set<int> touched;
  for (const auto& n : query.tables) touched.insert(schema.table_index(n));

  std::vector<std::vector<char>> masks(schema.tables.size());
  for (int t : touched)
    masks[static_cast<std::size_t>(t)] =
        row_mask(schema.tables[static_cast<std::size_t>(t)], query);

  // BFS join order from the first touched table.
  const int root = *touched.begin();
  std::vector<int> order{root};
  std::vector<int> join_parent{-1}, join_edge{-1};
  std::set<int> seen{root};
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    for (auto [nb, e] : schema.neighbors(order[qi])) {
      if (touched.count(nb) && !seen.count(nb)) {
        seen.insert(nb);
        order.push_back(nb);
        join_parent.push_back(order[qi]);
        join_edge.push_back(e);
      }
    }
  }

  std::vector<int> slot(schema.tables.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    slot[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  // Partial rows: row index per joined table, in `order` slots.
  std::vector<std::vector<std::int32_t>> partials;
  {
    const auto& t = schema.tables[static_cast<std::size_t>(root)];
    for (std::size_t r = 0; r < t.row_count; ++r)
      if (masks[static_cast<std::size_t>(root)][r])
        partials.push_back({static_cast<std::int32_t>(r)});
  }
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int child = order[i];
    const int parent = join_parent[i];
    const auto& je = schema.joins[static_cast<std::size_t>(join_edge[i])];
    const auto& child_tab = schema.tables[static_cast<std::size_t>(child)];
    const auto& parent_tab = schema.tables[static_cast<std::size_t>(parent)];
    const std::string child_key = je.left_table == child_tab.name ? je.left_key : je.right_key;
    const std::string parent_key = je.left_table == parent_tab.name ? je.left_key : je.right_key;
    const int ck = child_tab.require_attr(child_key);
    const int pk = parent_tab.require_attr(parent_key);

    std::unordered_map<std::string, std::vector<std::int32_t>> index;
    for (std::size_t r = 0; r < child_tab.row_count; ++r) {
      if (!masks[static_cast<std::size_t>(child)][r]) continue;
      const Code c = child_tab.columns[static_cast<std::size_t>(ck)][r];
      index[child_tab.attrs[static_cast<std::size_t>(ck)].value_of(c)].push_back(
          static_cast<std::int32_t>(r));
    }

    std::vector<std::vector<std::int32_t>> next;
    const int pslot = slot[static_cast<std::size_t>(parent)];
    for (const auto& row : partials) {
      const std::int32_t pr = row[static_cast<std::size_t>(pslot)];
      const Code c = parent_tab.columns[static_cast<std::size_t>(pk)][static_cast<std::size_t>(pr)];
      auto it = index.find(parent_tab.attrs[static_cast<std::size_t>(pk)].value_of(c));
      if (it == index.end()) continue;
      for (std::int32_t cr : it->second) {
        auto extended = row;
        extended.push_back(cr);
        next.push_back(std::move(extended));
      }
    }
    partials = std::move(next);
  }
  return static_cast<double>(partials.size());
}

}  // namespace cardest
