#include "cardest/query.hpp"

#include <algorithm>

namespace cardest {

QueryRegion encode_region(const AttributeMeta& meta, const Predicate& pred) {
  QueryRegion region;
  region.attr = meta.name;
  if (pred.op == PredOp::In) {
    if (meta.kind == AttrKind::Categorical) {
      for (const auto& v : pred.values) {
        auto c = meta.code_of(v);
        if (c) region.codes.push_back(*c);
      }
    } else {
      for (const auto& v : pred.values) {
        double x;
        if (parse_number(v, x) && x >= meta.edges.front() && x <= meta.edges.back())
          region.codes.push_back(meta.bin_of(x));
      }
    }
  } else {
    const double lo = std::min(pred.lo, pred.hi);
    const double hi = std::max(pred.lo, pred.hi);
    if (meta.kind == AttrKind::BinnedContinuous) {
      const int bins = meta.base_domain_size();
      for (int b = 0; b < bins; ++b) {
        const double left = meta.edges[b];
        const double right = meta.edges[b + 1];
        // Bin b is [left, right) except the last, which is closed.
        const bool closed = (b == bins - 1);
        const bool overlaps = closed ? (left <= hi && right >= lo)
                                     : (left <= hi && right > lo);
        if (overlaps) region.codes.push_back(b);
      }
    } else {
      // Range over a categorical domain: numeric comparison when the whole
      // domain is numeric, lexicographic otherwise.
      const bool numeric = meta.numeric_domain();
      for (Code c = 0; c < meta.base_domain_size(); ++c) {
        const std::string& raw = meta.values[static_cast<std::size_t>(c)];
        bool inside;
        if (numeric) {
          double x;
          parse_number(raw, x);
          inside = x >= lo && x <= hi;
        } else {
          inside = !(raw < std::to_string(lo)) && !(std::to_string(hi) < raw);
        }
        if (inside) region.codes.push_back(c);
      }
    }
  }
  std::sort(region.codes.begin(), region.codes.end());
  region.codes.erase(std::unique(region.codes.begin(), region.codes.end()),
                     region.codes.end());
  return region;
}

}  // namespace cardest
