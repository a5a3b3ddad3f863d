#include "cardest/synthetic.hpp"

#include <cmath>

#include "cardest/rng.hpp"

namespace cardest {

void SyntheticSpec::check() const {
  if (skew < 0.0) throw Error("skew must be non-negative");
  if (correlation < 0.0 || correlation > 1.0)
    throw Error("correlation must lie in [0, 1]");
  if (domain < 1) throw Error("domain must be positive");
  if (scale < 1) throw Error("scale must be positive");
  if (rows < 1) throw Error("rows must be positive");
}

namespace {

// Pareto(s) over [1, inf) discretized by value: code k < d-1 has mass
// (k+1)^-s - (k+2)^-s, the tail collapses into code d-1. skew = 0 degenerates
// to the uniform distribution over d codes.
Code pareto_code(Rng& rng, double skew, int domain) {
  if (skew <= 0.0) return static_cast<Code>(rng.next_below(static_cast<std::uint64_t>(domain)));
  const double u = rng.next_double();
  const double x = std::pow(1.0 - u, -1.0 / skew);
  double f = std::floor(x) - 1.0;
  if (f < 0.0) f = 0.0;
  if (f > static_cast<double>(domain - 1)) f = static_cast<double>(domain - 1);
  return static_cast<Code>(f);
}

}  // namespace

EncodedTable gen_synthetic(const SyntheticSpec& spec) {
  spec.check();
  Rng rng(spec.seed);

  EncodedTable t;
  t.name = spec.table_name;
  t.row_count = spec.rows;
  for (int i = 0; i < spec.scale; ++i) {
    AttributeMeta meta;
    meta.name = "c" + std::to_string(i);
    meta.kind = AttrKind::Categorical;
    for (int v = 0; v < spec.domain; ++v) meta.values.push_back(std::to_string(v));
    t.attrs.push_back(std::move(meta));
    t.columns.emplace_back();
    t.columns.back().reserve(spec.rows);
  }

  std::vector<int> source(spec.scale, -1);
  for (int i = 1; i < spec.scale; ++i)
    source[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
  for (int i = 1; i < spec.scale; ++i)
    t.metadata.emplace_back("source_of_" + std::to_string(i),
                            std::to_string(source[i]));

  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (int i = 0; i < spec.scale; ++i) {
      Code c;
      if (i == 0) {
        c = pareto_code(rng, spec.skew, spec.domain);
      } else if (rng.next_double() < spec.correlation) {
        c = t.columns[static_cast<std::size_t>(source[i])][r];
      } else {
        c = pareto_code(rng, spec.skew, spec.domain);
      }
      t.columns[static_cast<std::size_t>(i)].push_back(c);
    }
  }
  return t;
}

}  // namespace cardest
