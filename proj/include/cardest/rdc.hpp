#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardest/table.hpp"

namespace cardest {

struct RdcParams {
  int k_features = 20;
  double sigma = 1.0 / 6.0;
  int repetitions = 5;
  std::uint64_t seed = 0;
};

/// Randomized dependence coefficient between two numeric columns: copula
/// (normalized-rank) transforms, k random affine projections through a sine
/// nonlinearity, largest canonical correlation; median over repetitions,
/// clamped to [0, 1]. Constant columns short-circuit to 0.
double rdc(const std::vector<double>& x, const std::vector<double>& y,
           const RdcParams& params = {});

/// Average pairwise RDC over all cross pairs between two attribute sets of a
/// (sampled) full outer join.
double table_pair_rdc(const EncodedTable& sample,
                      const std::vector<std::string>& attrs_left,
                      const std::vector<std::string>& attrs_right,
                      const RdcParams& params = {});

/// Symmetric table-level dependence scores plus per-table attribute counts.
struct DependenceMatrix {
  std::vector<std::string> table_names;
  std::vector<std::vector<double>> scores;  // symmetric, diagonal unused
  std::vector<int> attr_counts;

  int index_of(const std::string& table) const;
  double at(const std::string& a, const std::string& b) const;
  void check() const;
};

/// Attribute-count-weighted average dependence between two disjoint table
/// groups, derived from the pairwise matrix.
double merged_group_rdc(const DependenceMatrix& m,
                        const std::vector<std::string>& group_a,
                        const std::vector<std::string>& group_b);

}  // namespace cardest
