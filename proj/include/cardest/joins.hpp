#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cardest/schema.hpp"

namespace cardest {

/// Materialized full outer join of a connected table subset.  All member
/// attributes (keys included) are carried over; rows where a member is absent
/// hold that member's reserved absent codes.  Synthetic scaling columns are
/// appended under the "fanout_" prefix:
///   fanout_rc_<T>     rows of the join generated by this row's <T>-tuple
///                     (0 when <T> is absent — doubles as a presence flag),
///   fanout_<u>_<v>    matches of this row's <u>-side key in base table <v>,
///                     for every in-group join edge, both directions.
struct GroupJoin {
  std::vector<std::string> members;  // sorted table names
  EncodedTable join;
  double row_count = 0.0;  // exact full-join size, even when `join` is a sample
  bool sampled = false;

  int member_of_attr(const std::string& attr) const;  // index into members, -1 for fanouts
};

/// Exact materialization.  Throws when the result would exceed `max_rows`.
GroupJoin full_outer_join(const JoinSchema& schema,
                          const std::vector<std::string>& members,
                          std::size_t max_rows = 5000000);

/// Uniform subsample of the exact join (without replacement) when it has more
/// than `n` rows; `row_count` still reports the exact size.
GroupJoin sample_full_outer_join(const JoinSchema& schema,
                                 const std::vector<std::string>& members,
                                 std::size_t n, std::uint64_t seed,
                                 std::size_t max_rows = 5000000);

double full_join_size(const JoinSchema& schema,
                      const std::vector<std::string>& members);

/// Rows of the join (absent side excluded) per raw value of a key attribute.
/// Used to wire one group's scaling column to a neighboring group.
std::map<std::string, double> key_row_counts(const GroupJoin& g,
                                             const std::string& key_attr);

/// Append a numeric categorical column to a join from per-row double values.
void append_numeric_column(EncodedTable& table, const std::string& name,
                           const std::vector<double>& values);

/// Parsed numeric value of a code of a numeric categorical attribute.
double numeric_code_value(const AttributeMeta& meta, Code c);

}  // namespace cardest
