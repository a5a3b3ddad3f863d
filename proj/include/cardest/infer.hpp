#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cardest/bayesnet.hpp"
#include "cardest/query.hpp"

namespace cardest {

// Query resolved against one model: per-node optional code sets.  A node
// without an entry is unconstrained.  An empty code set means probability 0.
struct BnQuery {
  std::vector<std::optional<std::vector<Code>>> regions;  // indexed by node

  bool constrained(int node) const {
    return regions[static_cast<std::size_t>(node)].has_value();
  }
};

/// Resolve the predicates that mention attributes of this model; others are
/// ignored.  Weighted attributes are handled separately by the caller.
BnQuery resolve_query(const BayesNet& bn, const std::vector<Predicate>& preds);

/// Per-value multiplicative weights attached to some nodes.  Weight vectors
/// have one entry per code of the node's domain and are folded into that
/// node's factor before elimination.
struct NodeWeights {
  std::vector<std::optional<std::vector<double>>> weights;  // indexed by node

  static NodeWeights none(int node_count) {
    NodeWeights w;
    w.weights.assign(static_cast<std::size_t>(node_count), std::nullopt);
    return w;
  }
  bool any() const {
    for (const auto& w : weights)
      if (w.has_value()) return true;
    return false;
  }
};

/// Discrete factor over a subset of nodes, row-major with the first variable
/// most significant.  `sizes[i]` is the retained extent of `vars[i]`.
struct Factor {
  std::vector<int> vars;            // ascending node ids
  std::vector<int> sizes;
  std::vector<double> data;
  /// When set, entries live in external storage (a CPT or marginal owned by
  /// the model, which must outlive the factor) and `data` stays empty.
  const double* view = nullptr;

  const double* values() const { return view ? view : data.data(); }

  std::size_t index_of(const std::vector<Code>& assign) const;
  void check() const;
};

/// Nodes kept after conditioning: ancestor closure of the constrained and
/// weighted nodes.  Marginalizing the rest never changes the answer because
/// every barren leaf's table sums to one.
std::vector<int> reduce_graph(const BayesNet& bn, const BnQuery& q,
                              const NodeWeights& w);

/// Result of reduce_and_prune: the nodes whose factors enter elimination, and
/// per node whether its factor is the stored marginal instead of its table.
struct ReducedFactors {
  std::vector<int> kept;
  /// Indexed by node id; 1 means build the factor from bn.marginals[v].
  std::vector<char> use_marginal;
};

/// reduce_graph followed by chain collapsing: an unscored kept node with no
/// kept parents and a single kept child, where the child has only that parent
/// and a stored marginal, is dropped and the child switches to its marginal.
/// Leaves the answer unchanged; makes chain-shaped ancestries O(1) per query.
ReducedFactors reduce_and_prune(const BayesNet& bn, const BnQuery& q,
                                const NodeWeights& w);

/// Elimination order over `kept`: reverse topological when the induced graph
/// is a forest, otherwise min-degree on the moralized induced graph.
/// Deterministic (ties broken by node id).
std::vector<int> elimination_order(const BayesNet& bn, const std::vector<int>& kept);

/// Shared elimination core.  Both the per-query path and compiled plans call
/// these, so their arithmetic is identical operation for operation.
Factor factor_product(const Factor& a, const Factor& b);
Factor factor_sum_out(const Factor& f, int var);
/// Eliminate every variable in `order` from `factors` (taken in list order),
/// returning the remaining scalar.  Factors are consumed.
double run_elimination(std::vector<Factor> factors, const std::vector<int>& order);

/// Exact query probability by summing the joint over the full state space.
/// Oracle for tests; throws when the space exceeds `max_states`.
double brute_force_prob(const BayesNet& bn, const BnQuery& q,
                        std::size_t max_states = 1000000);
double brute_force_expectation(const BayesNet& bn, const BnQuery& q,
                               const NodeWeights& w,
                               std::size_t max_states = 1000000);

/// Exact query probability by variable elimination on the reduced graph.
double exact_prob(const BayesNet& bn, const BnQuery& q);

/// Variable elimination over *all* nodes, skipping graph reduction. Slower;
/// exists so the reduction step can be verified against it.
double exact_prob_full(const BayesNet& bn, const BnQuery& q);

/// Exact weighted expectation: like exact_prob but each weighted node's
/// factor rows are scaled by its weight vector before elimination.
double exact_expectation(const BayesNet& bn, const BnQuery& q, const NodeWeights& w);

/// Forward progressive sampling over the reduced graph: one topological
/// sweep, k shared samples per node, the running probability accumulates each
/// constrained node's expected in-region mass.  Unconstrained nodes inside
/// the reduced graph are sampled but contribute factor 1 exactly.
double sampled_prob(const BayesNet& bn, const BnQuery& q, std::size_t k,
                    std::uint64_t seed);
double sampled_expectation(const BayesNet& bn, const BnQuery& q,
                           const NodeWeights& w, std::size_t k, std::uint64_t seed);

}  // namespace cardest
