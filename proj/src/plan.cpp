#include "cardest/plan.hpp"

#include <algorithm>
#include <sstream>

namespace cardest {

namespace {

std::string shape_key(const std::string& model_id, const std::vector<int>& constrained,
                      const std::vector<int>& weighted) {
  std::string key = model_id;
  key += '|';
  for (int v : constrained) {
    key += std::to_string(v);
    key += ',';
  }
  key += '|';
  for (int v : weighted) {
    key += std::to_string(v);
    key += ',';
  }
  return key;
}

// Factor for one node sliced to the query regions, weights folded in.
// Entry order follows ascending retained codes, matching the full-domain
// zero-padded factor used by the per-query path entry for entry.
Factor sliced_node_factor(const BayesNet& bn, int v, const BnQuery& q,
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
      Factor f;
      f.vars = fam;
      for (int n : fam)
        f.sizes.push_back(bn.attrs[static_cast<std::size_t>(n)].domain_size());
      if (p < v) {
        f.view = cpt.prob.data();
      } else {
        f.data.resize(dp * dcs);
        for (std::size_t c = 0; c < dcs; ++c)
          for (std::size_t u = 0; u < dp; ++u)
            f.data[c * dp + u] = cpt.prob[u * dcs + c];
      }
      return f;
    }
  }

  // Retained codes per family variable.
  std::vector<std::vector<Code>> codes(fam.size());
  Factor f;
  f.vars = fam;
  std::size_t total = 1;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const int n = fam[i];
    if (q.constrained(n)) {
      codes[i] = *q.regions[static_cast<std::size_t>(n)];
    } else {
      const int d = bn.attrs[static_cast<std::size_t>(n)].domain_size();
      codes[i].resize(static_cast<std::size_t>(d));
      for (int c = 0; c < d; ++c) codes[i][static_cast<std::size_t>(c)] = c;
    }
    f.sizes.push_back(static_cast<int>(codes[i].size()));
    total *= codes[i].size();
  }
  f.data.assign(total, 0.0);

  const auto& wv = w.weights[static_cast<std::size_t>(v)];
  const auto dc = static_cast<std::size_t>(cpt.child_domain);
  std::vector<std::size_t> fam_pos_of_parent;
  if (!use_marginal)
    for (int p : cpt.parent_ids)
    fam_pos_of_parent.push_back(static_cast<std::size_t>(
        std::find(fam.begin(), fam.end(), p) - fam.begin()));
  const auto child_pos = static_cast<std::size_t>(
      std::find(fam.begin(), fam.end(), v) - fam.begin());

  std::vector<std::size_t> assign(fam.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = fam.size(); i-- > 0;) {
      assign[i] = rem % codes[i].size();
      rem /= codes[i].size();
    }
    std::size_t cfg = 0;
    if (!use_marginal) for (std::size_t pi = 0; pi < cpt.parent_ids.size(); ++pi) {
      const int p = cpt.parent_ids[pi];
      cfg = cfg * static_cast<std::size_t>(
                      bn.attrs[static_cast<std::size_t>(p)].domain_size()) +
            static_cast<std::size_t>(codes[fam_pos_of_parent[pi]][assign[fam_pos_of_parent[pi]]]);
    }
    const Code child = codes[child_pos][assign[child_pos]];
    double val = use_marginal
                     ? (*bn.marginals[static_cast<std::size_t>(v)])[static_cast<std::size_t>(child)]
                     : cpt.prob[cfg * dc + static_cast<std::size_t>(child)];
    if (wv.has_value()) val *= (*wv)[static_cast<std::size_t>(child)];
    f.data[idx] = val;
  }
  return f;
}

}  // namespace

std::vector<std::string> CompiledPlan::describe(const BayesNet& bn) const {
  std::vector<std::string> out;
  auto name = [&](int v) { return bn.attrs[static_cast<std::size_t>(v)].name; };
  {
    std::ostringstream os;
    os << "keep:";
    for (int v : kept) os << ' ' << name(v);
    out.push_back(os.str());
  }
  for (int v : kept) {
    std::ostringstream os;
    os << "slice " << name(v)
       << (use_marginal[static_cast<std::size_t>(v)] ? " stored marginal" : " table");
    if (std::binary_search(constrained.begin(), constrained.end(), v))
      os << " to region";
    if (std::binary_search(weighted.begin(), weighted.end(), v))
      os << ", fold weights";
    out.push_back(os.str());
  }
  for (int v : order) {
    std::ostringstream os;
    os << "multiply factors on " << name(v) << ", sum out " << name(v);
    out.push_back(os.str());
  }
  out.push_back("multiply remaining scalars");
  return out;
}

std::shared_ptr<const CompiledPlan> compile_plan(const BayesNet& bn,
                                                 const BnQuery& q,
                                                 const NodeWeights& w) {
  auto plan = std::make_shared<CompiledPlan>();
  plan->model_id = bn.model_id;
  for (int v = 0; v < bn.dag.node_count; ++v) {
    if (q.constrained(v)) plan->constrained.push_back(v);
    if (w.weights[static_cast<std::size_t>(v)].has_value()) plan->weighted.push_back(v);
  }
  auto reduced = reduce_and_prune(bn, q, w);
  plan->kept = std::move(reduced.kept);
  plan->use_marginal = std::move(reduced.use_marginal);
  plan->order = elimination_order(bn, plan->kept);
  return plan;
}

double execute_plan(const CompiledPlan& plan, const BayesNet& bn,
                    const BnQuery& q, const NodeWeights& w) {
  for (int v : plan.constrained)
    if (q.regions[static_cast<std::size_t>(v)]->empty()) return 0.0;
  if (plan.kept.empty()) return 1.0;
  std::vector<Factor> factors;
  factors.reserve(plan.kept.size());
  for (int v : plan.kept)
    factors.push_back(sliced_node_factor(
        bn, v, q, w, plan.use_marginal[static_cast<std::size_t>(v)] != 0));
  return run_elimination(std::move(factors), plan.order);
}

std::shared_ptr<const CompiledPlan> PlanCache::get_or_compile(const BayesNet& bn,
                                                              const BnQuery& q,
                                                              const NodeWeights& w) {
  std::vector<int> constrained, weighted;
  for (int v = 0; v < bn.dag.node_count; ++v) {
    if (q.constrained(v)) constrained.push_back(v);
    if (w.weights[static_cast<std::size_t>(v)].has_value()) weighted.push_back(v);
  }
  const auto key = shape_key(bn.model_id, constrained, weighted);

  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
      ++hits_;
      lru_.erase(it->second.second);
      lru_.push_front(key);
      it->second.second = lru_.begin();
      return it->second.first;
    }
    ++misses_;
  }

  auto plan = compile_plan(bn, q, w);

  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) return it->second.first;  // raced; keep the first
  lru_.push_front(key);
  map_[key] = {plan, lru_.begin()};
  while (map_.size() > capacity_) {
    map_.erase(lru_.back());
    lru_.pop_back();
  }
  return plan;
}

std::size_t PlanCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

double cached_prob(PlanCache& cache, const BayesNet& bn, const BnQuery& q) {
  auto w = NodeWeights::none(bn.dag.node_count);
  auto plan = cache.get_or_compile(bn, q, w);
  return execute_plan(*plan, bn, q, w);
}

double cached_expectation(PlanCache& cache, const BayesNet& bn, const BnQuery& q,
                          const NodeWeights& w) {
  auto plan = cache.get_or_compile(bn, q, w);
  return execute_plan(*plan, bn, q, w);
}

}  // namespace cardest
