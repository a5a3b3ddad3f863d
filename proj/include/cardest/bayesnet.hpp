#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cardest/structure.hpp"
#include "cardest/table.hpp"

namespace cardest {

// Conditional probability table for one node.  Rows are child values, columns
// are parent configurations in mixed-radix order with the first parent most
// significant.  Raw counts are kept alongside probabilities so updates can be
// applied exactly.
struct Cpt {
  int node = -1;
  std::vector<int> parent_ids;       // sorted ascending
  int child_domain = 0;
  std::size_t config_count = 1;      // product of parent domain sizes
  std::vector<double> counts;        // config_count * child_domain, config-major
  std::vector<double> prob;          // same layout, smoothed and normalized

  std::size_t config_of(const std::vector<int>& parent_domains,
                        const std::vector<Code>& parent_codes) const;
  void renormalize(double alpha);
  void check() const;
};

struct BayesNet {
  std::string model_id;
  std::vector<AttributeMeta> attrs;
  Dag dag;
  std::vector<std::shared_ptr<const Cpt>> cpts;  // indexed by node
  // Stored marginal per node, defined wherever every ancestor has at most one
  // parent (a chain up to a root); null otherwise.  Derived from the tables,
  // refreshed after every fit or update, and used by inference to collapse
  // unconstrained chain tops without eliminating them per query.
  std::vector<std::shared_ptr<const std::vector<double>>> marginals;
  double row_count = 0.0;
  double alpha = 1.0;

  int attr_index(const std::string& name) const;
  std::vector<int> parent_domains(int node) const;
  void refresh_marginals();
  void check() const;
};

BayesNet fit_bayesnet(const EncodedTable& table, const Dag& dag, double alpha = 1.0,
                      const std::string& model_id = "");

// Incremental maintenance.  Rows are given in attribute order of bn.attrs.
// Only the touched tables are replaced (copy-on-write at CPT granularity).
void update_insert(BayesNet& bn, const std::vector<std::vector<Code>>& rows);
void update_delete(BayesNet& bn, const std::vector<std::vector<Code>>& rows);

// Re-learns only the child's table after adding a user-supplied edge.
void add_expert_edge(BayesNet& bn, const EncodedTable& table, int parent, int child);

// Joint distribution total, by brute force when the state space is small.
double joint_mass(const BayesNet& bn);

}  // namespace cardest
