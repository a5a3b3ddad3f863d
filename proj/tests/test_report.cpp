#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "cardest/report.hpp"
#include "cardest/rng.hpp"
#include "cardest/workload.hpp"
#include "fixtures.hpp"

using namespace cardest;
using cardest::testing::ChainFixture;

TEST_CASE("q-error clamps both sides at one") {
  CHECK(qerror(10, 10) == 1.0);
  CHECK(qerror(20, 10) == 2.0);
  CHECK(qerror(5, 10) == 2.0);
  CHECK(qerror(0.0, 0.0) == 1.0);   // both clamp to 1
  CHECK(qerror(0.5, 4.0) == 4.0);   // estimate clamps to 1
  CHECK(qerror(3.0, 0.0) == 3.0);   // truth clamps to 1
}

TEST_CASE("nearest-rank quantiles against a hand-sorted sample") {
  // Sorted: 1..10.  p50 -> 5th value, p90 -> 9th, p95 -> ceil(9.5)=10th.
  std::vector<double> v{10, 3, 7, 1, 9, 5, 2, 8, 6, 4};
  auto s = summarize(v);
  CHECK(s.q50 == 5.0);
  CHECK(s.q90 == 9.0);
  CHECK(s.q95 == 10.0);
  CHECK(s.qmax == 10.0);

  auto one = summarize({42.0});
  CHECK(one.q50 == 42.0);
  CHECK(one.qmax == 42.0);
}

TEST_CASE("quantiles match an independent sort-based computation") {
  std::vector<double> v;
  Rng rng(5);
  for (int i = 0; i < 997; ++i) v.push_back(1.0 + rng.next_double() * 50.0);
  auto s = summarize(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  auto nearest = [&](double q) {
    const auto n = sorted.size();
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (idx > 0) --idx;
    return sorted[std::min(idx, n - 1)];
  };
  CHECK(s.q50 == nearest(0.50));
  CHECK(s.q90 == nearest(0.90));
  CHECK(s.q95 == nearest(0.95));
  CHECK(s.qmax == sorted.back());
}

TEST_CASE("workload evaluation produces stable reports") {
  ChainFixture fx("report");
  EnsembleOptions opts;
  opts.budget = 3;
  opts.alpha = 0.0;
  opts.saturated_structure = true;
  auto em = build_ensemble(fx.schema, {{"A", "B", "C"}}, opts);

  WorkloadOptions wo;
  wo.count = 12;
  wo.max_tables = 3;
  wo.seed = 4;
  auto queries = gen_workload(fx.schema, wo);
  for (auto& q : queries) q.true_card = true_cardinality(fx.schema, q);

  EstimateOptions eo;
  eo.backend = Backend::Exact;
  auto r = eval_workload(em, queries, eo);
  REQUIRE(r.qerrors.size() == 12);
  // Lossless model on the toy: every estimate is exact.
  for (double qe : r.qerrors) CHECK(qe == doctest::Approx(1.0).epsilon(1e-6));

  const auto j1 = eval_to_json(r);
  const auto j2 = eval_to_json(eval_workload(em, queries, eo));
  CHECK(j1 == j2);  // latency never leaks into the payload
  CHECK(eval_to_text(r).find("q-error quantiles") != std::string::npos);
}
