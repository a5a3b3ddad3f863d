#pragma once

#include <cstdint>
#include <vector>

#include "cardest/query.hpp"
#include "cardest/schema.hpp"

namespace cardest {

struct WorkloadOptions {
  std::size_t count = 100;
  int min_filters = 1;
  int max_filters = 4;
  int min_tables = 1;   // multi-table mode only
  int max_tables = 1;
  int max_in_values = 5;
  std::uint64_t seed = 0;
};

/// Single-table workload: uniformly pick a filter-attribute subset; range
/// predicates over binned attributes get two uniform domain values (ordered),
/// categorical attributes get k uniform distinct values.
std::vector<Query> gen_workload(const EncodedTable& table, const WorkloadOptions& opts);

/// Multi-table workload: pick a uniformly grown connected subtree of the join
/// tree with a table count inside [min_tables, max_tables], then apply the
/// single-table predicate procedure over the union of attributes.
std::vector<Query> gen_workload(const JoinSchema& schema, const WorkloadOptions& opts);

/// Exact evaluation by scan / hash join along the join tree. Ground truth for
/// workload labeling only; never consulted by estimators.
double true_cardinality(const EncodedTable& table, const Query& query);
double true_cardinality(const JoinSchema& schema, const Query& query);

}  // namespace cardest
