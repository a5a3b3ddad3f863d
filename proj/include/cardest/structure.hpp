#pragma once

#include <string>
#include <vector>

#include "cardest/table.hpp"

namespace cardest {

/// Directed acyclic graph over attribute indices of one table. `topo_order`
/// witnesses acyclicity: every edge goes earlier -> later in it.
struct Dag {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;  // parent -> child
  std::vector<int> topo_order;

  std::vector<std::vector<int>> parents() const;
  std::vector<std::vector<int>> children() const;
  bool has_edge(int p, int c) const;
  void check() const;
  /// Recompute topo_order from edges; throws on a cycle.
  void refresh_topo_order();
};

struct StructureConstraints {
  std::vector<std::pair<int, int>> forced_edges;
  std::vector<std::pair<int, int>> forbidden_edges;
  std::vector<int> forced_roots;

  void check(int node_count) const;
  bool forbidden(int p, int c) const;
};

/// Empirical mutual information (nats) between two columns, from raw joint
/// code frequencies with no smoothing. Clamped at 0.
double mutual_information(const EncodedTable& table, int i, int j);

/// All pairwise MI values; entry (i, j) with i < j.
std::vector<std::vector<double>> pairwise_mutual_information(const EncodedTable& table);

/// Maximum-spanning tree over pairwise MI, directed away from the root.
/// Forced edges are pinned first and keep their direction; forbidden edges
/// are never selected. Deterministic lexicographic tie-breaking.
Dag chow_liu(const EncodedTable& table, const StructureConstraints& constraints = {},
             int root_choice = -1);

/// Greedy BIC hill climbing over single edge additions/removals/reversals,
/// starting from the forced edges. Deterministic.
Dag greedy_hill_climb(const EncodedTable& table,
                      const StructureConstraints& constraints = {},
                      int max_parents = 3, int max_iterations = 200);

}  // namespace cardest
