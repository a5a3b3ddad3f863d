#include "cardest/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace cardest {

double qerror(double estimate, double truth) {
  const double e = std::max(estimate, 1.0);
  const double t = std::max(truth, 1.0);
  return std::max(e / t, t / e);
}

QuantileSummary summarize(std::vector<double> values) {
  if (values.empty()) throw Error("cannot summarize an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return values[std::min(n - 1, idx == 0 ? 0 : idx - 1)];
  };
  QuantileSummary s;
  s.q50 = rank(0.50);
  s.q90 = rank(0.90);
  s.q95 = rank(0.95);
  s.qmax = values.back();
  return s;
}

EvalResult eval_workload(const EnsembleModel& em, const std::vector<Query>& queries,
                         const EstimateOptions& opts, PlanCache* cache) {
  EvalResult r;
  for (const auto& q : queries) {
    if (!q.true_card.has_value())
      throw Error("workload query is missing its true cardinality");
    const auto t0 = std::chrono::steady_clock::now();
    const double est = estimate_cardinality(em, q, opts, cache);
    const auto t1 = std::chrono::steady_clock::now();
    r.estimates.push_back(est);
    r.truths.push_back(*q.true_card);
    r.qerrors.push_back(qerror(est, *q.true_card));
    r.latency_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  r.summary = summarize(r.qerrors);
  return r;
}

std::string eval_to_json(const EvalResult& r) {
  nlohmann::json j;
  j["count"] = r.qerrors.size();
  j["estimates"] = r.estimates;
  j["truths"] = r.truths;
  j["qerrors"] = r.qerrors;
  j["summary"] = {{"q50", r.summary.q50},
                  {"q90", r.summary.q90},
                  {"q95", r.summary.q95},
                  {"qmax", r.summary.qmax}};
  return j.dump(2) + "\n";
}

std::string eval_to_text(const EvalResult& r) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "query" << std::right << std::setw(16)
     << "estimate" << std::setw(16) << "true" << std::setw(12) << "q-error"
     << "\n";
  for (std::size_t i = 0; i < r.qerrors.size(); ++i) {
    os << std::left << std::setw(8) << i << std::right << std::fixed
       << std::setprecision(2) << std::setw(16) << r.estimates[i] << std::setw(16)
       << r.truths[i] << std::setw(12) << std::setprecision(3) << r.qerrors[i]
       << "\n";
    os.unsetf(std::ios::fixed);
  }
  os << "\n"
     << "q-error quantiles  p50=" << r.summary.q50 << "  p90=" << r.summary.q90
     << "  p95=" << r.summary.q95 << "  max=" << r.summary.qmax << "\n";
  return os.str();
}

}  // namespace cardest
