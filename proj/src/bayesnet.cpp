#include "cardest/bayesnet.hpp"

#include <algorithm>
#include <cmath>

namespace cardest {

std::size_t Cpt::config_of(const std::vector<int>& parent_domains,
                           const std::vector<Code>& parent_codes) const {
  std::size_t cfg = 0;
  for (std::size_t k = 0; k < parent_ids.size(); ++k)
    cfg = cfg * static_cast<std::size_t>(parent_domains[k]) +
          static_cast<std::size_t>(parent_codes[k]);
  return cfg;
}

void Cpt::renormalize(double alpha) {
  const auto dc = static_cast<std::size_t>(child_domain);
  prob.assign(counts.size(), 0.0);
  for (std::size_t cfg = 0; cfg < config_count; ++cfg) {
    double total = 0.0;
    for (std::size_t x = 0; x < dc; ++x) total += counts[cfg * dc + x];
    const double denom = total + alpha * static_cast<double>(child_domain);
    if (denom == 0.0) {
      // alpha == 0 and no observations: leave the column uniform.
      for (std::size_t x = 0; x < dc; ++x) prob[cfg * dc + x] = 1.0 / static_cast<double>(dc);
      continue;
    }
    for (std::size_t x = 0; x < dc; ++x)
      prob[cfg * dc + x] = (counts[cfg * dc + x] + alpha) / denom;
  }
}

void Cpt::check() const {
  if (child_domain <= 0) throw Error("cpt child domain must be positive");
  const auto expect = config_count * static_cast<std::size_t>(child_domain);
  if (counts.size() != expect || prob.size() != expect)
    throw Error("cpt storage size mismatch");
  for (double c : counts)
    if (c < 0.0) throw Error("cpt has a negative count");
  for (std::size_t cfg = 0; cfg < config_count; ++cfg) {
    double total = 0.0;
    for (int x = 0; x < child_domain; ++x)
      total += prob[cfg * static_cast<std::size_t>(child_domain) + static_cast<std::size_t>(x)];
    if (std::abs(total - 1.0) > 1e-9) throw Error("cpt column does not sum to 1");
  }
}

int BayesNet::attr_index(const std::string& name) const {
  for (std::size_t i = 0; i < attrs.size(); ++i)
    if (attrs[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> BayesNet::parent_domains(int node) const {
  std::vector<int> out;
  for (int p : cpts[static_cast<std::size_t>(node)]->parent_ids)
    out.push_back(attrs[static_cast<std::size_t>(p)].domain_size());
  return out;
}

void BayesNet::check() const {
  if (dag.node_count != static_cast<int>(attrs.size()) ||
      cpts.size() != attrs.size())
    throw Error("model node count mismatch");
  dag.check();
  auto parents = dag.parents();
  for (int v = 0; v < dag.node_count; ++v) {
    const auto& c = *cpts[static_cast<std::size_t>(v)];
    if (c.node != v || c.parent_ids != parents[static_cast<std::size_t>(v)])
      throw Error("cpt does not match graph");
    if (c.child_domain != attrs[static_cast<std::size_t>(v)].domain_size())
      throw Error("cpt domain does not match attribute");
    c.check();
  }
  if (row_count < 0.0) throw Error("negative row count");
}

namespace {

std::shared_ptr<Cpt> count_family(const EncodedTable& table, int node,
                                  const std::vector<int>& parents) {
  auto cpt = std::make_shared<Cpt>();
  cpt->node = node;
  cpt->parent_ids = parents;
  cpt->child_domain = table.attrs[static_cast<std::size_t>(node)].domain_size();
  for (int p : parents)
    cpt->config_count *= static_cast<std::size_t>(
        table.attrs[static_cast<std::size_t>(p)].domain_size());
  cpt->counts.assign(cpt->config_count * static_cast<std::size_t>(cpt->child_domain), 0.0);
  const auto dc = static_cast<std::size_t>(cpt->child_domain);
  for (std::size_t r = 0; r < table.row_count; ++r) {
    std::size_t cfg = 0;
    for (int p : parents)
      cfg = cfg * static_cast<std::size_t>(
                      table.attrs[static_cast<std::size_t>(p)].domain_size()) +
            static_cast<std::size_t>(table.columns[static_cast<std::size_t>(p)][r]);
    cpt->counts[cfg * dc +
                static_cast<std::size_t>(table.columns[static_cast<std::size_t>(node)][r])] += 1.0;
  }
  return cpt;
}

}  // namespace

void BayesNet::refresh_marginals() {
  marginals.assign(cpts.size(), nullptr);
  for (int v : dag.topo_order) {
    const auto sv = static_cast<std::size_t>(v);
    const Cpt& cpt = *cpts[sv];
    const auto dc = static_cast<std::size_t>(cpt.child_domain);
    if (cpt.parent_ids.empty()) {
      marginals[sv] = std::make_shared<const std::vector<double>>(cpt.prob);
      continue;
    }
    if (cpt.parent_ids.size() != 1) continue;
    const auto sp = static_cast<std::size_t>(cpt.parent_ids[0]);
    if (!marginals[sp]) continue;
    const auto& mp = *marginals[sp];
    std::vector<double> m(dc, 0.0);
    for (std::size_t u = 0; u < mp.size(); ++u)
      for (std::size_t c = 0; c < dc; ++c) m[c] += mp[u] * cpt.prob[u * dc + c];
    marginals[sv] = std::make_shared<const std::vector<double>>(std::move(m));
  }
}

BayesNet fit_bayesnet(const EncodedTable& table, const Dag& dag, double alpha,
                      const std::string& model_id) {
  if (dag.node_count != static_cast<int>(table.attrs.size()))
    throw Error("graph size does not match table");
  if (alpha < 0.0) throw Error("alpha must be non-negative");
  BayesNet bn;
  bn.model_id = model_id.empty() ? table.name : model_id;
  bn.attrs = table.attrs;
  bn.dag = dag;
  bn.row_count = static_cast<double>(table.row_count);
  bn.alpha = alpha;
  auto parents = dag.parents();
  for (int v = 0; v < dag.node_count; ++v) {
    auto cpt = count_family(table, v, parents[static_cast<std::size_t>(v)]);
    cpt->renormalize(alpha);
    bn.cpts.push_back(std::move(cpt));
  }
  bn.check();
  bn.refresh_marginals();
  return bn;
}

namespace {

void apply_rows(BayesNet& bn, const std::vector<std::vector<Code>>& rows, double sign) {
  for (const auto& row : rows) {
    if (row.size() != bn.attrs.size()) throw Error("update row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] < 0 || row[i] >= bn.attrs[i].domain_size())
        throw Error("update row value outside attribute domain");
  }
  // Copy-on-write: clone and adjust only once per node, then renormalize.
  std::vector<std::shared_ptr<Cpt>> fresh(bn.cpts.size());
  for (std::size_t v = 0; v < bn.cpts.size(); ++v)
    fresh[v] = std::make_shared<Cpt>(*bn.cpts[v]);
  for (const auto& row : rows) {
    for (std::size_t v = 0; v < fresh.size(); ++v) {
      auto& cpt = *fresh[v];
      std::size_t cfg = 0;
      for (int p : cpt.parent_ids)
        cfg = cfg * static_cast<std::size_t>(bn.attrs[static_cast<std::size_t>(p)].domain_size()) +
              static_cast<std::size_t>(row[static_cast<std::size_t>(p)]);
      auto& cell = cpt.counts[cfg * static_cast<std::size_t>(cpt.child_domain) +
                              static_cast<std::size_t>(row[v])];
      cell += sign;
      if (cell < -1e-9) throw Error("delete of a row that was never counted");
      if (cell < 0.0) cell = 0.0;
    }
  }
  const double new_rows = bn.row_count + sign * static_cast<double>(rows.size());
  if (new_rows < 0.0) throw Error("delete would make the row count negative");
  for (auto& cpt : fresh) cpt->renormalize(bn.alpha);
  for (std::size_t v = 0; v < fresh.size(); ++v) bn.cpts[v] = std::move(fresh[v]);
  bn.row_count = new_rows;
  bn.check();
  bn.refresh_marginals();
}

}  // namespace

void update_insert(BayesNet& bn, const std::vector<std::vector<Code>>& rows) {
  apply_rows(bn, rows, 1.0);
}

void update_delete(BayesNet& bn, const std::vector<std::vector<Code>>& rows) {
  apply_rows(bn, rows, -1.0);
}

void add_expert_edge(BayesNet& bn, const EncodedTable& table, int parent, int child) {
  if (parent < 0 || child < 0 || parent >= bn.dag.node_count || child >= bn.dag.node_count ||
      parent == child)
    throw Error("invalid edge");
  if (bn.dag.has_edge(parent, child)) throw Error("edge already present");
  Dag next = bn.dag;
  next.edges.emplace_back(parent, child);
  std::sort(next.edges.begin(), next.edges.end());
  next.refresh_topo_order();  // throws on a cycle
  auto parents = next.parents();
  auto cpt = count_family(table, child, parents[static_cast<std::size_t>(child)]);
  cpt->renormalize(bn.alpha);
  bn.dag = std::move(next);
  bn.cpts[static_cast<std::size_t>(child)] = std::move(cpt);
  bn.check();
  bn.refresh_marginals();
}

double joint_mass(const BayesNet& bn) {
  std::size_t states = 1;
  for (const auto& a : bn.attrs) {
    states *= static_cast<std::size_t>(a.domain_size());
    if (states > 2000000) throw Error("state space too large to enumerate");
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
    double p = 1.0;
    for (int v = 0; v < n; ++v) {
      const auto& cpt = *bn.cpts[static_cast<std::size_t>(v)];
      std::size_t cfg = 0;
      for (int q : cpt.parent_ids)
        cfg = cfg * static_cast<std::size_t>(bn.attrs[static_cast<std::size_t>(q)].domain_size()) +
              static_cast<std::size_t>(assign[static_cast<std::size_t>(q)]);
      p *= cpt.prob[cfg * static_cast<std::size_t>(cpt.child_domain) +
                    static_cast<std::size_t>(assign[static_cast<std::size_t>(v)])];
    }
    total += p;
  }
  return total;
}

}  // namespace cardest
