#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardest/bayesnet.hpp"
#include "cardest/joins.hpp"
#include "cardest/plan.hpp"
#include "cardest/query.hpp"
#include "cardest/rdc.hpp"
#include "cardest/schema.hpp"

namespace cardest {

/// One model of the ensemble: a network over the full outer join of a
/// connected group of tables, including the appended scaling columns.
struct GroupModel {
  std::vector<std::string> members;  // sorted table names
  std::vector<std::pair<std::string, std::string>> edges;  // in-group join edges
  std::vector<std::pair<std::string, std::string>> attr_tables;  // attr -> member
  BayesNet model;
  double join_size = 0.0;  // exact |full join of members|

  std::string name() const;  // comma-joined members
  bool has_member(const std::string& table) const;
};

/// Join edge crossing two groups, with the outbound scaling column appended
/// to each side and the average row-expansion factors used to grow the scope
/// size across the link.
struct GroupLink {
  int group_a = -1, group_b = -1;
  std::string table_a, table_b;          // endpoint tables
  std::string fanout_attr_a;             // column on group_a's model
  std::string fanout_attr_b;
  double expand_a_to_b = 1.0;            // |scope(a,b)| / |scope(a)|
  double expand_b_to_a = 1.0;
};

struct EnsembleModel {
  std::vector<GroupModel> groups;
  std::vector<GroupLink> links;

  int group_of(const std::string& table) const;
  void check() const;
};

struct EnsembleOptions {
  int budget = 1;                 // max tables per group
  std::size_t sample_rows = 10000;  // dependence-matrix join sample
  std::size_t max_join_rows = 2000000;  // per-group materialization cap
  std::size_t fit_sample_rows = 500000;  // subsample cap for fitting
  double alpha = 1.0;
  bool greedy_structure = false;  // default: tree structure
  bool saturated_structure = false;  // chain over all attrs; tiny schemas only
  int max_parents = 3;
  RdcParams rdc;
  std::uint64_t seed = 0;

  // Expert structure constraints by attribute name. A forced or forbidden
  // edge applies inside every group that models both endpoints; a root
  // applies where the attribute is modeled. Unknown names are an error.
  std::vector<std::pair<std::string, std::string>> forced_edges;
  std::vector<std::pair<std::string, std::string>> forbidden_edges;
  std::vector<std::string> forced_roots;
};

/// Pairwise table dependence from one shared sample of the all-table join.
DependenceMatrix build_dependence_matrix(const JoinSchema& schema,
                                         const EnsembleOptions& opts);

/// Greedy grouping: every table starts alone; for growing target sizes, the
/// adjacent group pair with the highest dependence whose union hits the
/// target is contracted, highest score first.  Budget 1 keeps singletons.
std::vector<std::vector<std::string>> plan_groups(const JoinSchema& schema,
                                                  const DependenceMatrix& m,
                                                  int budget);

EnsembleModel build_ensemble(const JoinSchema& schema, const EnsembleOptions& opts);

/// Build with an externally chosen partition (each part a connected subtree).
EnsembleModel build_ensemble(const JoinSchema& schema,
                             const std::vector<std::vector<std::string>>& groups,
                             const EnsembleOptions& opts);

enum class Backend { Exact, CachedExact, Sampled };

/// Fully resolved per-group inference inputs for one query: touched groups,
/// their regions and weight vectors, and the scope (expected size of the full
/// join spanning the touched groups).
struct QueryPlanInfo {
  double scope = 0.0;
  std::vector<int> groups;        // touched group indices, ascending
  std::vector<BnQuery> queries;   // parallel to `groups`
  std::vector<NodeWeights> weights;
};

QueryPlanInfo analyze_query(const EnsembleModel& ensemble, const Query& query);

struct EstimateOptions {
  Backend backend = Backend::CachedExact;
  std::size_t sample_count = 10000;
  std::uint64_t seed = 0;
};

/// Cardinality of the (inner) join of the query's tables under its
/// predicates.  `cache` may be null; it is only consulted by CachedExact.
double estimate_cardinality(const EnsembleModel& ensemble, const Query& query,
                            const EstimateOptions& opts, PlanCache* cache = nullptr);

/// Incrementally add (or remove) the rows of a CSV file whose header names
/// exactly the modeled attributes of one group. Raw values must lie inside
/// the trained domains. Returns the number of rows applied.
std::size_t update_from_csv(EnsembleModel& ensemble, const std::string& csv_path,
                            bool insert);

}  // namespace cardest
