#pragma once

#include <cstdint>
#include <string>

#include "cardest/table.hpp"

namespace cardest {

/// Knobs for the synthetic table generator: Pareto skew s, copy-correlation c,
/// domain size d, attribute count n.
struct SyntheticSpec {
  double skew = 1.0;        // Pareto shape; 0 means uniform
  double correlation = 0.5; // probability a cell copies its source column
  int domain = 100;
  int scale = 10;           // number of attributes
  std::size_t rows = 100000;
  std::uint64_t seed = 0;
  std::string table_name = "synthetic";

  void check() const;
};

/// Generate a table of `scale` categorical columns over codes [0, domain).
/// Column 0 is Pareto(skew)-distributed; each later column i copies a fixed
/// source column j < i (chosen uniformly, recorded in metadata as
/// "source_of_<i>") with probability `correlation`, else redraws from the
/// Pareto code distribution. Bit-identical for a fixed seed.
EncodedTable gen_synthetic(const SyntheticSpec& spec);

}  // namespace cardest
