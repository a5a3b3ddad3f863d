#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cardest/table.hpp"

namespace cardest {

enum class PredOp { In, Range };

struct Predicate {
  std::string attr;
  PredOp op = PredOp::In;
  std::vector<std::string> values;  // In
  double lo = 0.0, hi = 0.0;        // Range, closed interval
};

/// Canonical-form query: per-attribute regions over one or more tables.
/// An attribute without a predicate is unconstrained.
struct Query {
  std::vector<std::string> tables;
  std::vector<Predicate> predicates;
  std::optional<double> true_card;
};

/// Region of a predicate resolved against an attribute domain: a sorted code
/// set. May be explicitly empty (probability 0 downstream).
struct QueryRegion {
  std::string attr;
  std::vector<Code> codes;
};

/// Resolve a raw predicate to a code set. IN values outside the domain are
/// dropped silently; range predicates over binned attributes include every
/// bin overlapping [lo, hi]. The reserved absent code is never included.
QueryRegion encode_region(const AttributeMeta& meta, const Predicate& pred);

}  // namespace cardest
