#include "cardest/infer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cardest/rng.hpp"

namespace cardest {

std::size_t Factor::index_of(const std::vector<Code>& assign) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    idx = idx * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(assign[i]);
  return idx;
}

void Factor::check() const {
  if (vars.size() != sizes.size()) throw Error("factor shape mismatch");
  std::size_t n = 1;
  for (int s : sizes) {
    if (s <= 0) throw Error("factor extent must be positive");
    n *= static_cast<std::size_t>(s);
  }
  if (data.size() != n) throw Error("factor storage size mismatch");
  for (std::size_t i = 1; i < vars.size(); ++i)
    if (vars[i - 1] >= vars[i]) throw Error("factor variables must be ascending");
}

BnQuery resolve_query(const BayesNet& bn, const std::vector<Predicate>& preds) {
  BnQuery q;
  q.regions.assign(bn.attrs.size(), std::nullopt);
  for (const auto& p : preds) {
    const int idx = bn.attr_index(p.attr);
    if (idx < 0) continue;
    auto region = encode_region(bn.attrs[static_cast<std::size_t>(idx)], p);
    auto& slot = q.regions[static_cast<std::size_t>(idx)];
    if (!slot.has_value()) {
      slot = std::move(region.codes);
      continue;
    }
    // Repeated predicates on one attribute intersect.
    std::vector<Code> merged;
    std::set_intersection(slot->begin(), slot->end(), region.codes.begin(),
                          region.codes.end(), std::back_inserter(merged));
    slot = std::move(merged);
  }
  return q;
}

std::vector<int> reduce_graph(const BayesNet& bn, const BnQuery& q,
                              const NodeWeights& w) {
  auto parents = [&bn](int node) -> const std::vector<int>& {
    return bn.cpts[static_cast<std::size_t>(node)]->parent_ids;
  };
  std::vector<char> kept(bn.attrs.size(), 0);
  std::vector<int> stack;
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (q.constrained(v) || w.weights[static_cast<std::size_t>(v)].has_value())
      stack.push_back(v);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (kept[static_cast<std::size_t>(v)]) continue;
    kept[static_cast<std::size_t>(v)] = 1;
    for (int p : parents(v)) stack.push_back(p);
  }
  std::vector<int> out;
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (kept[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

ReducedFactors reduce_and_prune(const BayesNet& bn, const BnQuery& q,
                                const NodeWeights& w) {
  ReducedFactors out;
  out.use_marginal.assign(bn.attrs.size(), 0);
  auto parents = [&bn](int node) -> const std::vector<int>& {
    return bn.cpts[static_cast<std::size_t>(node)]->parent_ids;
  };
  std::vector<char> kept(bn.attrs.size(), 0);
  for (int v : reduce_graph(bn, q, w)) kept[static_cast<std::size_t>(v)] = 1;
  auto scored = [&](int v) {
    return q.constrained(v) || w.weights[static_cast<std::size_t>(v)].has_value();
  };
  // Kept children never change: only tops are ever dropped, and a node with a
  // kept parent is not a top.  So build the child lists once and walk a
  // worklist of tops; dropping a top can expose its child as the next top.
  std::vector<std::vector<int>> kept_children(bn.attrs.size());
  std::vector<int> worklist;
  for (int v = 0; v < bn.dag.node_count; ++v) {
    if (!kept[static_cast<std::size_t>(v)]) continue;
    bool top = true;
    for (int p : parents(v))
      if (kept[static_cast<std::size_t>(p)]) {
        kept_children[static_cast<std::size_t>(p)].push_back(v);
        top = false;
      }
    if (top) worklist.push_back(v);
  }
  while (!worklist.empty()) {
    const int u = worklist.back();
    worklist.pop_back();
    const auto su = static_cast<std::size_t>(u);
    if (scored(u) || kept_children[su].size() != 1) continue;
    const int c = kept_children[su][0];
    const auto sc = static_cast<std::size_t>(c);
    if (out.use_marginal[sc]) continue;
    if (parents(sc).size() != 1 || !bn.marginals[sc]) continue;
    kept[su] = 0;
    out.use_marginal[sc] = 1;
    worklist.push_back(c);
  }
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (kept[static_cast<std::size_t>(v)]) out.kept.push_back(v);
  return out;
}

std::vector<int> elimination_order(const BayesNet& bn, const std::vector<int>& kept) {
  const std::set<int> kept_set(kept.begin(), kept.end());
  auto parents = [&bn](int node) -> const std::vector<int>& {
    return bn.cpts[static_cast<std::size_t>(node)]->parent_ids;
  };
  // Moralized induced graph: connect each kept node to its kept parents and
  // kept parents to each other.
  std::set<std::pair<int, int>> und;
  auto link = [&](int a, int b) {
    und.insert({std::min(a, b), std::max(a, b)});
  };
  bool forest = true;
  for (int v : kept) {
    std::vector<int> kp;
    for (int p : parents(v))
      if (kept_set.count(p)) kp.push_back(p);
    if (kp.size() > 1) forest = false;
    for (int p : kp) link(v, p);
    for (std::size_t i = 0; i < kp.size(); ++i)
      for (std::size_t j = i + 1; j < kp.size(); ++j) link(kp[i], kp[j]);
  }

  if (forest) {
    // Reverse topological order: children before parents.
    std::vector<int> order;
    for (auto it = bn.dag.topo_order.rbegin(); it != bn.dag.topo_order.rend(); ++it)
      if (kept_set.count(*it)) order.push_back(*it);
    return order;
  }

  // Min-degree with fill-in, smallest node id on ties.
  std::map<int, std::set<int>> adj;
  for (int v : kept) adj[v];
  for (auto [a, b] : und) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<int> order;
  while (!adj.empty()) {
    int best = -1;
    std::size_t best_deg = 0;
    for (const auto& [v, nb] : adj)
      if (best < 0 || nb.size() < best_deg) {
        best = v;
        best_deg = nb.size();
      }
    auto nbrs = adj[best];
    for (int a : nbrs) {
      adj[a].erase(best);
      for (int b : nbrs)
        if (a != b) adj[a].insert(b);
    }
    adj.erase(best);
    order.push_back(best);
  }
  return order;
}

Factor factor_product(const Factor& a, const Factor& b) {
  Factor out;
  std::merge(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
             std::back_inserter(out.vars));
  out.vars.erase(std::unique(out.vars.begin(), out.vars.end()), out.vars.end());
  std::vector<int> map_a(out.vars.size(), -1), map_b(out.vars.size(), -1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < out.vars.size(); ++i) {
    const int v = out.vars[i];
    int size = -1;
    auto ia = std::find(a.vars.begin(), a.vars.end(), v);
    if (ia != a.vars.end()) {
      map_a[i] = static_cast<int>(ia - a.vars.begin());
      size = a.sizes[static_cast<std::size_t>(map_a[i])];
    }
    auto ib = std::find(b.vars.begin(), b.vars.end(), v);
    if (ib != b.vars.end()) {
      map_b[i] = static_cast<int>(ib - b.vars.begin());
      const int sb = b.sizes[static_cast<std::size_t>(map_b[i])];
      if (size >= 0 && size != sb) throw Error("factor extents disagree");
      size = sb;
    }
    out.sizes.push_back(size);
    total *= static_cast<std::size_t>(size);
  }
  out.data.assign(total, 0.0);

  std::vector<Code> assign(out.vars.size(), 0);
  std::vector<Code> sub_a(a.vars.size(), 0), sub_b(b.vars.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = out.vars.size(); i-- > 0;) {
      assign[i] = static_cast<Code>(rem % static_cast<std::size_t>(out.sizes[i]));
      rem /= static_cast<std::size_t>(out.sizes[i]);
    }
    for (std::size_t i = 0; i < out.vars.size(); ++i) {
      if (map_a[i] >= 0) sub_a[static_cast<std::size_t>(map_a[i])] = assign[i];
      if (map_b[i] >= 0) sub_b[static_cast<std::size_t>(map_b[i])] = assign[i];
    }
    out.data[idx] = a.values()[a.index_of(sub_a)] * b.values()[b.index_of(sub_b)];
  }
  return out;
}

Factor factor_sum_out(const Factor& f, int var) {
  auto it = std::find(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end()) throw Error("variable not in factor");
  const auto pos = static_cast<std::size_t>(it - f.vars.begin());

  Factor out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (i == pos) continue;
    out.vars.push_back(f.vars[i]);
    out.sizes.push_back(f.sizes[i]);
    total *= static_cast<std::size_t>(f.sizes[i]);
  }
  out.data.assign(total, 0.0);

  std::size_t inner = 1;  // stride of `var` in f
  for (std::size_t i = pos + 1; i < f.vars.size(); ++i)
    inner *= static_cast<std::size_t>(f.sizes[i]);
  const auto extent = static_cast<std::size_t>(f.sizes[pos]);
  const std::size_t block = inner * extent;

  std::size_t src_base = 0;
  for (std::size_t outer = 0; outer < total / inner; ++outer) {
    for (std::size_t in = 0; in < inner; ++in) {
      double acc = 0.0;
      for (std::size_t v = 0; v < extent; ++v)
        acc += f.values()[src_base + v * inner + in];
      out.data[outer * inner + in] = acc;
    }
    src_base += block;
  }
  return out;
}

double run_elimination(std::vector<Factor> factors, const std::vector<int>& order) {
  // Power-of-two rescaling guards against underflow without perturbing the
  // mantissas of any intermediate value.
  int scale_exp = 0;
  auto maybe_rescale = [&](Factor& f) {
    double mx = 0.0;
    for (double v : f.data) mx = std::max(mx, v);
    if (mx > 0.0 && mx < 1e-120) {
      for (double& v : f.data) v = std::ldexp(v, 400);
      scale_exp += 400;
    }
  };

  // Fused product-and-sum for the common two-factor case: one factor is a
  // vector over `var` alone, the other contains `var`.  Performs the exact
  // multiply-then-accumulate sequence of factor_product + factor_sum_out
  // (ascending `var`, one accumulator per output cell), so results are
  // bit-identical to the generic path; it only skips materializing the
  // product factor.
  auto fused_vec_sum = [](const Factor& vec, const Factor& f, int var) {
    auto it = std::find(f.vars.begin(), f.vars.end(), var);
    const auto pos = static_cast<std::size_t>(it - f.vars.begin());
    Factor out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
      if (i == pos) continue;
      out.vars.push_back(f.vars[i]);
      out.sizes.push_back(f.sizes[i]);
      total *= static_cast<std::size_t>(f.sizes[i]);
    }
    out.data.assign(total, 0.0);
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < f.vars.size(); ++i)
      inner *= static_cast<std::size_t>(f.sizes[i]);
    const auto extent = static_cast<std::size_t>(f.sizes[pos]);
    const std::size_t block = inner * extent;
    std::size_t src_base = 0;
    for (std::size_t outer = 0; outer < total / inner; ++outer) {
      for (std::size_t in = 0; in < inner; ++in) {
        double acc = 0.0;
        for (std::size_t v = 0; v < extent; ++v)
          acc += f.values()[src_base + v * inner + in] * vec.values()[v];
        out.data[outer * inner + in] = acc;
      }
      src_base += block;
    }
    return out;
  };

  for (int var : order) {
    std::vector<Factor> touched;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), var) != f.vars.end())
        touched.push_back(std::move(f));
      else
        rest.push_back(std::move(f));
    }
    if (!touched.empty()) {
      Factor reduced;
      if (touched.size() == 2 && touched[0].vars.size() == 1 &&
          touched[1].vars.size() > 1) {
        reduced = fused_vec_sum(touched[0], touched[1], var);
      } else if (touched.size() == 2 && touched[1].vars.size() == 1 &&
                 touched[0].vars.size() > 1) {
        reduced = fused_vec_sum(touched[1], touched[0], var);
      } else {
        Factor merged = std::move(touched[0]);
        for (std::size_t i = 1; i < touched.size(); ++i)
          merged = factor_product(merged, touched[i]);
        reduced = factor_sum_out(merged, var);
      }
      maybe_rescale(reduced);
      rest.push_back(std::move(reduced));
    }
    factors = std::move(rest);
  }

  double result = 1.0;
  for (const auto& f : factors) {
    if (!f.vars.empty()) throw Error("elimination left a non-scalar factor");
    result *= f.values()[0];
  }
  return std::ldexp(result, -scale_exp);
}

namespace {

// Full-domain factor for one node's CPT with out-of-region entries zeroed and
// optional per-value weights folded in.  Variables are (parents..., child)
// merged into ascending order.
Factor node_factor(const BayesNet& bn, int v, const BnQuery& q,
                   const NodeWeights& w, bool use_marginal) {
  const auto& cpt = *bn.cpts[static_cast<std::size_t>(v)];
  std::vector<int> fam;
  if (!use_marginal) fam = cpt.parent_ids;
  fam.push_back(v);
  std::sort(fam.begin(), fam.end());

  // Untouched one-parent nodes (no region, no weights anywhere in the family,
  // not collapsed to a marginal) keep their table verbatim, so the factor is
  // a straight copy — or a transpose when the child id sorts first.
  if (!use_marginal && cpt.parent_ids.size() == 1) {
    bool untouched = !w.weights[static_cast<std::size_t>(v)].has_value();
    for (int n : fam)
      if (q.constrained(n)) untouched = false;
    if (untouched) {
      const int p = cpt.parent_ids[0];
      const auto dp =
          static_cast<std::size_t>(bn.attrs[static_cast<std::size_t>(p)].domain_size());
      const auto dcs = static_cast<std::size_t>(cpt.child_domain);
      Factor fast;
      fast.vars = fam;
      for (int n : fam)
        fast.sizes.push_back(bn.attrs[static_cast<std::size_t>(n)].domain_size());
      if (p < v) {
        fast.view = cpt.prob.data();
      } else {
        fast.data.resize(dp * dcs);
        for (std::size_t c = 0; c < dcs; ++c)
          for (std::size_t u = 0; u < dp; ++u)
            fast.data[c * dp + u] = cpt.prob[u * dcs + c];
      }
      return fast;
    }
  }

  Factor f;
  f.vars = fam;
  std::size_t total = 1;
  for (int n : fam) {
    const int d = bn.attrs[static_cast<std::size_t>(n)].domain_size();
    f.sizes.push_back(d);
    total *= static_cast<std::size_t>(d);
  }
  f.data.assign(total, 0.0);

  std::vector<char> in_region(
      static_cast<std::size_t>(bn.attrs[static_cast<std::size_t>(v)].domain_size()), 1);
  if (q.constrained(v)) {
    std::fill(in_region.begin(), in_region.end(), 0);
    for (Code c : *q.regions[static_cast<std::size_t>(v)])
      in_region[static_cast<std::size_t>(c)] = 1;
  }
  const auto& wv = w.weights[static_cast<std::size_t>(v)];

  std::vector<Code> assign(fam.size(), 0);
  const auto dc = static_cast<std::size_t>(cpt.child_domain);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = fam.size(); i-- > 0;) {
      assign[i] = static_cast<Code>(rem % static_cast<std::size_t>(f.sizes[i]));
      rem /= static_cast<std::size_t>(f.sizes[i]);
    }
    Code child = 0;
    std::size_t cfg = 0;
    if (!use_marginal) for (int p : cpt.parent_ids) {
      const auto pi = static_cast<std::size_t>(
          std::find(fam.begin(), fam.end(), p) - fam.begin());
      cfg = cfg * static_cast<std::size_t>(
                      bn.attrs[static_cast<std::size_t>(p)].domain_size()) +
            static_cast<std::size_t>(assign[pi]);
    }
    const auto ci = static_cast<std::size_t>(
        std::find(fam.begin(), fam.end(), v) - fam.begin());
    child = assign[ci];
    if (!in_region[static_cast<std::size_t>(child)]) continue;
    double val = use_marginal
                     ? (*bn.marginals[static_cast<std::size_t>(v)])[static_cast<std::size_t>(child)]
                     : cpt.prob[cfg * dc + static_cast<std::size_t>(child)];
    if (wv.has_value()) val *= (*wv)[static_cast<std::size_t>(child)];
    f.data[idx] = val;
  }
  return f;
}

double eliminate_reduced(const BayesNet& bn, const BnQuery& q, const NodeWeights& w) {
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (q.constrained(v) && q.regions[static_cast<std::size_t>(v)]->empty())
      return 0.0;
  auto reduced = reduce_and_prune(bn, q, w);
  if (reduced.kept.empty()) return 1.0;
  auto order = elimination_order(bn, reduced.kept);
  std::vector<Factor> factors;
  for (int v : reduced.kept)
    factors.push_back(node_factor(bn, v, q, w,
                                  reduced.use_marginal[static_cast<std::size_t>(v)] != 0));
  return run_elimination(std::move(factors), order);
}

}  // namespace

double brute_force_prob(const BayesNet& bn, const BnQuery& q, std::size_t max_states) {
  return brute_force_expectation(bn, q, NodeWeights::none(bn.dag.node_count),
                                 max_states);
}

double brute_force_expectation(const BayesNet& bn, const BnQuery& q,
                               const NodeWeights& w, std::size_t max_states) {
  std::size_t states = 1;
  for (const auto& a : bn.attrs) {
    states *= static_cast<std::size_t>(a.domain_size());
    if (states > max_states) throw Error("state space too large to enumerate");
  }
  const int n = bn.dag.node_count;
  std::vector<Code> assign(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t rem = s;
    for (int v = n - 1; v >= 0; --v) {
      const auto d = static_cast<std::size_t>(bn.attrs[static_cast<std::size_t>(v)].domain_size());
      assign[static_cast<std::size_t>(v)] = static_cast<Code>(rem % d);
      rem /= d;
    }
    bool inside = true;
    for (int v = 0; v < n && inside; ++v) {
      if (!q.constrained(v)) continue;
      const auto& region = *q.regions[static_cast<std::size_t>(v)];
      inside = std::binary_search(region.begin(), region.end(),
                                  assign[static_cast<std::size_t>(v)]);
    }
    if (!inside) continue;
    double p = 1.0;
    for (int v = 0; v < n; ++v) {
      const auto& cpt = *bn.cpts[static_cast<std::size_t>(v)];
      std::size_t cfg = 0;
      for (int pid : cpt.parent_ids)
        cfg = cfg * static_cast<std::size_t>(
                        bn.attrs[static_cast<std::size_t>(pid)].domain_size()) +
              static_cast<std::size_t>(assign[static_cast<std::size_t>(pid)]);
      p *= cpt.prob[cfg * static_cast<std::size_t>(cpt.child_domain) +
                    static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])];
      const auto& wv = w.weights[static_cast<std::size_t>(v)];
      if (wv.has_value()) p *= (*wv)[static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])];
    }
    total += p;
  }
  return total;
}

double exact_prob(const BayesNet& bn, const BnQuery& q) {
  return eliminate_reduced(bn, q, NodeWeights::none(bn.dag.node_count));
}

double exact_prob_full(const BayesNet& bn, const BnQuery& q) {
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (q.constrained(v) && q.regions[static_cast<std::size_t>(v)]->empty())
      return 0.0;
  const auto w = NodeWeights::none(bn.dag.node_count);
  std::vector<int> kept(static_cast<std::size_t>(bn.dag.node_count));
  for (int v = 0; v < bn.dag.node_count; ++v) kept[static_cast<std::size_t>(v)] = v;
  const auto order = elimination_order(bn, kept);
  std::vector<Factor> factors;
  for (int v : kept) factors.push_back(node_factor(bn, v, q, w, false));
  return run_elimination(std::move(factors), order);
}

double exact_expectation(const BayesNet& bn, const BnQuery& q, const NodeWeights& w) {
  return eliminate_reduced(bn, q, w);
}

namespace {

double progressive(const BayesNet& bn, const BnQuery& q, const NodeWeights& w,
                   std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error("sample count must be positive");
  for (int v = 0; v < bn.dag.node_count; ++v)
    if (q.constrained(v) && q.regions[static_cast<std::size_t>(v)]->empty())
      return 0.0;
  auto kept = reduce_graph(bn, q, w);
  if (kept.empty()) return 1.0;
  const std::set<int> kept_set(kept.begin(), kept.end());

  Rng rng(seed);
  std::vector<std::vector<Code>> samples(bn.attrs.size());
  std::vector<int> placed;  // kept nodes sampled so far, in sweep order
  double p = 1.0;

  // One forward sweep; at every constrained or weighted node the particle set
  // is bootstrap-resampled in proportion to its in-region mass, which keeps
  // parent configurations jointly consistent downstream.
  std::vector<double> mass;  // k rows of child_domain entries
  for (int v : bn.dag.topo_order) {
    if (!kept_set.count(v)) continue;
    const auto& cpt = *bn.cpts[static_cast<std::size_t>(v)];
    const auto dc = static_cast<std::size_t>(cpt.child_domain);
    const auto& wv = w.weights[static_cast<std::size_t>(v)];
    const bool scored = q.constrained(v) || wv.has_value();

    mass.assign(k * dc, 0.0);
    std::vector<double> totals(k, 0.0);
    for (std::size_t s = 0; s < k; ++s) {
      std::size_t cfg = 0;
      for (int pid : cpt.parent_ids)
        cfg = cfg * static_cast<std::size_t>(
                        bn.attrs[static_cast<std::size_t>(pid)].domain_size()) +
              static_cast<std::size_t>(samples[static_cast<std::size_t>(pid)][s]);
      double* row = mass.data() + s * dc;
      if (q.constrained(v)) {
        for (Code c : *q.regions[static_cast<std::size_t>(v)])
          row[c] = cpt.prob[cfg * dc + static_cast<std::size_t>(c)] *
                   (wv.has_value() ? (*wv)[static_cast<std::size_t>(c)] : 1.0);
      } else {
        for (std::size_t x = 0; x < dc; ++x)
          row[x] = cpt.prob[cfg * dc + x] * (wv.has_value() ? (*wv)[x] : 1.0);
      }
      double t = 0.0;
      for (std::size_t x = 0; x < dc; ++x) t += row[x];
      totals[s] = t;
    }

    auto& sv = samples[static_cast<std::size_t>(v)];
    sv.resize(k);
    if (scored) {
      double sum = 0.0;
      for (double t : totals) sum += t;
      if (sum <= 0.0) return 0.0;
      p *= sum / static_cast<double>(k);  // unconstrained nodes multiply by 1
      // Resample ancestries, then extend each surviving particle.
      std::vector<std::size_t> anc(k);
      for (std::size_t t = 0; t < k; ++t) anc[t] = rng.next_weighted(totals, sum);
      for (int u : placed) {
        auto& su = samples[static_cast<std::size_t>(u)];
        std::vector<Code> remapped(k);
        for (std::size_t t = 0; t < k; ++t) remapped[t] = su[anc[t]];
        su = std::move(remapped);
      }
      for (std::size_t t = 0; t < k; ++t) {
        const double* row = mass.data() + anc[t] * dc;
        sv[t] = static_cast<Code>(
            rng.next_weighted(std::vector<double>(row, row + dc), totals[anc[t]]));
      }
    } else {
      for (std::size_t s = 0; s < k; ++s) {
        const double* row = mass.data() + s * dc;
        sv[s] = static_cast<Code>(
            rng.next_weighted(std::vector<double>(row, row + dc), totals[s]));
      }
    }
    placed.push_back(v);
  }
  return p;
}

}  // namespace

double sampled_prob(const BayesNet& bn, const BnQuery& q, std::size_t k,
                    std::uint64_t seed) {
  return progressive(bn, q, NodeWeights::none(bn.dag.node_count), k, seed);
}

double sampled_expectation(const BayesNet& bn, const BnQuery& q,
                           const NodeWeights& w, std::size_t k, std::uint64_t seed) {
  return progressive(bn, q, w, k, seed);
}

}  // namespace cardest
