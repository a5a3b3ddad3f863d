#include "cardest/structure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace cardest {

std::vector<std::vector<int>> Dag::parents() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(node_count));
  for (auto [p, c] : edges) out[static_cast<std::size_t>(c)].push_back(p);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

std::vector<std::vector<int>> Dag::children() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(node_count));
  for (auto [p, c] : edges) out[static_cast<std::size_t>(p)].push_back(c);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

bool Dag::has_edge(int p, int c) const {
  return std::find(edges.begin(), edges.end(), std::make_pair(p, c)) != edges.end();
}

void Dag::refresh_topo_order() {
  std::vector<int> indeg(static_cast<std::size_t>(node_count), 0);
  for (auto [p, c] : edges) {
    (void)p;
    ++indeg[static_cast<std::size_t>(c)];
  }
  auto ch = children();
  topo_order.clear();
  std::vector<int> ready;
  for (int i = node_count - 1; i >= 0; --i)
    if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  while (!ready.empty()) {
    // Smallest index first for determinism.
    auto it = std::min_element(ready.begin(), ready.end());
    int v = *it;
    ready.erase(it);
    topo_order.push_back(v);
    for (int c : ch[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (static_cast<int>(topo_order.size()) != node_count)
    throw Error("graph contains a cycle");
}

void Dag::check() const {
  if (static_cast<int>(topo_order.size()) != node_count)
    throw Error("topo_order length mismatch");
  std::vector<int> pos(static_cast<std::size_t>(node_count), -1);
  for (std::size_t i = 0; i < topo_order.size(); ++i) {
    const int v = topo_order[i];
    if (v < 0 || v >= node_count || pos[static_cast<std::size_t>(v)] != -1)
      throw Error("topo_order is not a permutation");
    pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  for (auto [p, c] : edges) {
    if (p < 0 || p >= node_count || c < 0 || c >= node_count)
      throw Error("edge endpoint out of range");
    if (pos[static_cast<std::size_t>(p)] >= pos[static_cast<std::size_t>(c)])
      throw Error("edge violates topological order");
  }
}

void StructureConstraints::check(int node_count) const {
  std::set<std::pair<int, int>> forced(forced_edges.begin(), forced_edges.end());
  for (auto e : forbidden_edges)
    if (forced.count(e)) throw Error("edge both forced and forbidden");
  for (auto [p, c] : forced_edges)
    if (p < 0 || c < 0 || p >= node_count || c >= node_count || p == c)
      throw Error("invalid forced edge");
  Dag d;
  d.node_count = node_count;
  d.edges = forced_edges;
  d.refresh_topo_order();  // throws if forced edges alone are cyclic
  for (int r : forced_roots) {
    if (r < 0 || r >= node_count) throw Error("invalid forced root");
    for (auto [p, c] : forced_edges) {
      (void)p;
      if (c == r) throw Error("forced root has a forced parent");
    }
  }
}

bool StructureConstraints::forbidden(int p, int c) const {
  return std::find(forbidden_edges.begin(), forbidden_edges.end(),
                   std::make_pair(p, c)) != forbidden_edges.end();
}

double mutual_information(const EncodedTable& table, int i, int j) {
  if (i == j) throw Error("mutual_information requires distinct attributes");
  const auto& ai = table.attrs[static_cast<std::size_t>(i)];
  const auto& aj = table.attrs[static_cast<std::size_t>(j)];
  const int di = ai.domain_size();
  const int dj = aj.domain_size();
  const auto& ci = table.columns[static_cast<std::size_t>(i)];
  const auto& cj = table.columns[static_cast<std::size_t>(j)];
  const double n = static_cast<double>(table.row_count);

  std::vector<double> joint(static_cast<std::size_t>(di) * static_cast<std::size_t>(dj), 0.0);
  std::vector<double> mi_(static_cast<std::size_t>(di), 0.0), mj(static_cast<std::size_t>(dj), 0.0);
  for (std::size_t r = 0; r < table.row_count; ++r) {
    joint[static_cast<std::size_t>(ci[r]) * static_cast<std::size_t>(dj) +
          static_cast<std::size_t>(cj[r])] += 1.0;
    mi_[static_cast<std::size_t>(ci[r])] += 1.0;
    mj[static_cast<std::size_t>(cj[r])] += 1.0;
  }
  double mi = 0.0;
  for (int a = 0; a < di; ++a) {
    if (mi_[static_cast<std::size_t>(a)] == 0.0) continue;
    for (int b = 0; b < dj; ++b) {
      const double pxy = joint[static_cast<std::size_t>(a) * static_cast<std::size_t>(dj) +
                               static_cast<std::size_t>(b)];
      if (pxy == 0.0) continue;
      mi += (pxy / n) * std::log(pxy * n / (mi_[static_cast<std::size_t>(a)] *
                                            mj[static_cast<std::size_t>(b)]));
    }
  }
  return std::max(mi, 0.0);
}

std::vector<std::vector<double>> pairwise_mutual_information(const EncodedTable& table) {
  const int n = static_cast<int>(table.attrs.size());
  std::vector<std::vector<double>> mi(static_cast<std::size_t>(n),
                                      std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = mutual_information(table, i, j);
      mi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      mi[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
    }
  return mi;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace

Dag chow_liu(const EncodedTable& table, const StructureConstraints& constraints,
             int root_choice) {
  const int n = static_cast<int>(table.attrs.size());
  if (n < 2) throw Error("chow_liu needs at least 2 attributes");
  constraints.check(n);

  // Pin forced edges, then complete the maximum-MI spanning tree.
  UnionFind uf(n);
  std::vector<std::pair<int, int>> tree;  // undirected, stored as given
  std::map<std::pair<int, int>, std::pair<int, int>> forced_dir;  // {min,max} -> (p,c)
  for (auto [p, c] : constraints.forced_edges) {
    if (!uf.unite(p, c))
      throw Error("forced edges are unsatisfiable as a tree");
    tree.emplace_back(p, c);
    forced_dir[{std::min(p, c), std::max(p, c)}] = {p, c};
  }

  const auto mi = pairwise_mutual_information(table);
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (forced_dir.count({i, j})) continue;
      if (constraints.forbidden(i, j) || constraints.forbidden(j, i)) continue;
      candidates.emplace_back(i, j);
    }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                     const double wa = mi[static_cast<std::size_t>(a.first)][static_cast<std::size_t>(a.second)];
                     const double wb = mi[static_cast<std::size_t>(b.first)][static_cast<std::size_t>(b.second)];
                     if (wa != wb) return wa > wb;
                     return a < b;
                   });
  for (auto [i, j] : candidates)
    if (uf.unite(i, j)) tree.emplace_back(i, j);
  if (static_cast<int>(tree.size()) != n - 1)
    throw Error("constraints leave the tree disconnected");

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : tree) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  // Orient away from a root consistent with every forced direction: the root
  // must sit on the parent side of each forced edge.
  auto orient_from = [&](int root, std::vector<int>& parent_of) {
    parent_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> stack{root};
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        parent_of[static_cast<std::size_t>(w)] = v;
        stack.push_back(w);
      }
    }
  };
  auto root_ok = [&](int root) {
    std::vector<int> parent_of;
    orient_from(root, parent_of);
    for (const auto& [key, dir] : forced_dir) {
      (void)key;
      if (parent_of[static_cast<std::size_t>(dir.second)] != dir.first) return false;
    }
    for (int r : constraints.forced_roots)
      if (parent_of[static_cast<std::size_t>(r)] != -1) return false;
    return true;
  };

  int root = -1;
  if (root_choice >= 0) {
    if (!root_ok(root_choice))
      throw Error("requested root conflicts with forced edges");
    root = root_choice;
  } else if (!constraints.forced_roots.empty()) {
    root = *std::min_element(constraints.forced_roots.begin(),
                             constraints.forced_roots.end());
    if (!root_ok(root)) throw Error("forced root conflicts with forced edges");
  } else {
    for (int r = 0; r < n; ++r)
      if (root_ok(r)) {
        root = r;
        break;
      }
    if (root < 0) throw Error("forced edges admit no tree orientation");
  }

  std::vector<int> parent_of;
  orient_from(root, parent_of);
  Dag dag;
  dag.node_count = n;
  for (int v = 0; v < n; ++v)
    if (parent_of[static_cast<std::size_t>(v)] != -1)
      dag.edges.emplace_back(parent_of[static_cast<std::size_t>(v)], v);
  std::sort(dag.edges.begin(), dag.edges.end());
  dag.refresh_topo_order();
  dag.check();
  return dag;
}

namespace {

// BIC family score with Laplace-smoothed estimates, matching the parameter
// fitting convention.
class BicScorer {
 public:
  explicit BicScorer(const EncodedTable& table) : table_(table) {}

  double family_score(int node, std::vector<int> parents) {
    std::sort(parents.begin(), parents.end());
    auto key = std::make_pair(node, parents);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    const double alpha = 1.0;
    const int dc = table_.attrs[static_cast<std::size_t>(node)].domain_size();
    std::size_t configs = 1;
    for (int p : parents)
      configs *= static_cast<std::size_t>(table_.attrs[static_cast<std::size_t>(p)].domain_size());
    if (configs > max_configs_) return -std::numeric_limits<double>::infinity();

    std::vector<double> counts(configs * static_cast<std::size_t>(dc), 0.0);
    std::vector<double> config_totals(configs, 0.0);
    for (std::size_t r = 0; r < table_.row_count; ++r) {
      std::size_t cfg = 0;
      for (int p : parents) {
        cfg = cfg * static_cast<std::size_t>(
                        table_.attrs[static_cast<std::size_t>(p)].domain_size()) +
              static_cast<std::size_t>(table_.columns[static_cast<std::size_t>(p)][r]);
      }
      counts[cfg * static_cast<std::size_t>(dc) +
             static_cast<std::size_t>(table_.columns[static_cast<std::size_t>(node)][r])] += 1.0;
      config_totals[cfg] += 1.0;
    }
    double loglik = 0.0;
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      if (config_totals[cfg] == 0.0) continue;
      const double denom = config_totals[cfg] + alpha * static_cast<double>(dc);
      for (int x = 0; x < dc; ++x) {
        const double cnt = counts[cfg * static_cast<std::size_t>(dc) + static_cast<std::size_t>(x)];
        if (cnt == 0.0) continue;
        loglik += cnt * std::log((cnt + alpha) / denom);
      }
    }
    const double penalty = 0.5 * std::log(static_cast<double>(table_.row_count)) *
                           static_cast<double>(configs) * static_cast<double>(dc - 1);
    const double score = loglik - penalty;
    cache_[key] = score;
    return score;
  }

 private:
  const EncodedTable& table_;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
  static constexpr std::size_t max_configs_ = 100000;
};

bool reachable(const std::vector<std::vector<int>>& children, int from, int to) {
  std::vector<int> stack{from};
  std::set<int> seen{from};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (int c : children[static_cast<std::size_t>(v)])
      if (seen.insert(c).second) stack.push_back(c);
  }
  return false;
}

}  // namespace

Dag greedy_hill_climb(const EncodedTable& table, const StructureConstraints& constraints,
                      int max_parents, int max_iterations) {
  const int n = static_cast<int>(table.attrs.size());
  if (max_parents < 1) throw Error("max_parents must be at least 1");
  constraints.check(n);

  Dag dag;
  dag.node_count = n;
  dag.edges = constraints.forced_edges;
  std::sort(dag.edges.begin(), dag.edges.end());
  dag.refresh_topo_order();

  std::set<std::pair<int, int>> forced(constraints.forced_edges.begin(),
                                       constraints.forced_edges.end());
  std::set<int> roots(constraints.forced_roots.begin(), constraints.forced_roots.end());
  BicScorer scorer(table);

  auto current_parents = dag.parents();
  std::vector<double> node_score(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    node_score[static_cast<std::size_t>(v)] =
        scorer.family_score(v, current_parents[static_cast<std::size_t>(v)]);

  const double eps = 1e-9;
  for (int iter = 0; iter < max_iterations; ++iter) {
    auto children = dag.children();
    double best_delta = eps;
    int best_kind = -1;  // 0 add, 1 remove, 2 reverse
    std::pair<int, int> best_edge{-1, -1};
    std::array<double, 2> best_scores{0.0, 0.0};

    auto with_parent = [&](int c, int p) {
      auto ps = current_parents[static_cast<std::size_t>(c)];
      ps.push_back(p);
      return ps;
    };
    auto without_parent = [&](int c, int p) {
      auto ps = current_parents[static_cast<std::size_t>(c)];
      ps.erase(std::find(ps.begin(), ps.end(), p));
      return ps;
    };

    for (int p = 0; p < n; ++p) {
      for (int c = 0; c < n; ++c) {
        if (p == c) continue;
        const bool exists = dag.has_edge(p, c);
        if (!exists) {
          // Addition.
          if (constraints.forbidden(p, c) || roots.count(c)) continue;
          if (static_cast<int>(current_parents[static_cast<std::size_t>(c)].size()) >= max_parents)
            continue;
          if (reachable(children, c, p)) continue;
          const double s = scorer.family_score(c, with_parent(c, p));
          const double delta = s - node_score[static_cast<std::size_t>(c)];
          if (delta > best_delta) {
            best_delta = delta;
            best_kind = 0;
            best_edge = {p, c};
            best_scores = {s, 0.0};
          }
        } else {
          if (forced.count({p, c})) continue;
          // Removal.
          {
            const double s = scorer.family_score(c, without_parent(c, p));
            const double delta = s - node_score[static_cast<std::size_t>(c)];
            if (delta > best_delta) {
              best_delta = delta;
              best_kind = 1;
              best_edge = {p, c};
              best_scores = {s, 0.0};
            }
          }
          // Reversal.
          if (!constraints.forbidden(c, p) && !roots.count(p) &&
              static_cast<int>(current_parents[static_cast<std::size_t>(p)].size()) < max_parents) {
            auto trimmed = children;
            auto& pc = trimmed[static_cast<std::size_t>(p)];
            pc.erase(std::find(pc.begin(), pc.end(), c));
            if (!reachable(trimmed, p, c)) {
              const double sc = scorer.family_score(c, without_parent(c, p));
              const double sp = scorer.family_score(p, with_parent(p, c));
              const double delta = sc + sp - node_score[static_cast<std::size_t>(c)] -
                                   node_score[static_cast<std::size_t>(p)];
              if (delta > best_delta) {
                best_delta = delta;
                best_kind = 2;
                best_edge = {p, c};
                best_scores = {sc, sp};
              }
            }
          }
        }
      }
    }

    if (best_kind == -1) break;
    const auto [p, c] = best_edge;
    if (best_kind == 0) {
      dag.edges.emplace_back(p, c);
      current_parents[static_cast<std::size_t>(c)].push_back(p);
      std::sort(current_parents[static_cast<std::size_t>(c)].begin(),
                current_parents[static_cast<std::size_t>(c)].end());
      node_score[static_cast<std::size_t>(c)] = best_scores[0];
    } else if (best_kind == 1) {
      dag.edges.erase(std::find(dag.edges.begin(), dag.edges.end(), best_edge));
      auto& ps = current_parents[static_cast<std::size_t>(c)];
      ps.erase(std::find(ps.begin(), ps.end(), p));
      node_score[static_cast<std::size_t>(c)] = best_scores[0];
    } else {
      dag.edges.erase(std::find(dag.edges.begin(), dag.edges.end(), best_edge));
      dag.edges.emplace_back(c, p);
      auto& pc = current_parents[static_cast<std::size_t>(c)];
      pc.erase(std::find(pc.begin(), pc.end(), p));
      auto& pp = current_parents[static_cast<std::size_t>(p)];
      pp.push_back(c);
      std::sort(pp.begin(), pp.end());
      node_score[static_cast<std::size_t>(c)] = best_scores[0];
      node_score[static_cast<std::size_t>(p)] = best_scores[1];
    }
    std::sort(dag.edges.begin(), dag.edges.end());
  }

  dag.refresh_topo_order();
  dag.check();
  return dag;
}

}  // namespace cardest
