#pragma once

#include <string>
#include <vector>

#include "cardest/ensemble.hpp"
#include "cardest/query.hpp"

namespace cardest {

/// max(est/true, true/est) with both sides clamped below at 1.
double qerror(double estimate, double truth);

struct QuantileSummary {
  double q50 = 0.0, q90 = 0.0, q95 = 0.0, qmax = 0.0;
};

/// Nearest-rank quantiles of an unsorted sample.
QuantileSummary summarize(std::vector<double> values);

struct EvalResult {
  std::vector<double> estimates;
  std::vector<double> truths;
  std::vector<double> qerrors;
  std::vector<double> latency_ms;  // reported separately, never serialized
  QuantileSummary summary;
};

/// Estimate every labeled query of the workload and aggregate q-errors.
EvalResult eval_workload(const EnsembleModel& em, const std::vector<Query>& queries,
                         const EstimateOptions& opts, PlanCache* cache = nullptr);

/// Deterministic JSON payload (no timings).
std::string eval_to_json(const EvalResult& r);
/// Aligned human-readable table.
std::string eval_to_text(const EvalResult& r);

}  // namespace cardest
