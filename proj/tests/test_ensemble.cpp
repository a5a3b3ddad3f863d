#include <cmath>

#include <doctest.h>

#include "cardest/ensemble.hpp"
#include "cardest/infer.hpp"
#include "cardest/workload.hpp"
#include "fixtures.hpp"

using namespace cardest;
using cardest::testing::ChainFixture;

namespace {

Query make_query(std::vector<std::string> tables, std::vector<Predicate> preds = {}) {
  Query q;
  q.tables = std::move(tables);
  q.predicates = std::move(preds);
  return q;
}

Predicate in_pred(const std::string& attr, std::vector<std::string> values) {
  Predicate p;
  p.attr = attr;
  p.op = PredOp::In;
  p.values = std::move(values);
  return p;
}

DependenceMatrix chain_matrix(double ab, double bc, double ac) {
  DependenceMatrix m;
  m.table_names = {"A", "B", "C"};
  m.attr_counts = {1, 1, 1};
  m.scores = {{0, ab, ac}, {ab, 0, bc}, {ac, bc, 0}};
  return m;
}

}  // namespace

TEST_CASE("budget one keeps every table in its own group") {
  ChainFixture fx("ens1");
  EnsembleOptions opts;
  opts.budget = 1;
  opts.alpha = 0.0;
  auto em = build_ensemble(fx.schema, opts);
  REQUIRE(em.groups.size() == 3);
  CHECK(em.links.size() == 2);
  CHECK(em.group_of("A") != em.group_of("B"));
  CHECK(em.groups[static_cast<std::size_t>(em.group_of("A"))].join_size == 2.0);
}

TEST_CASE("grouping contracts the strongest adjacent pair first") {
  ChainFixture fx("ens2");
  auto g2 = plan_groups(fx.schema, chain_matrix(0.9, 0.5, 0.3), 2);
  REQUIRE(g2.size() == 2);
  CHECK(g2[0] == std::vector<std::string>{"A", "B"});
  CHECK(g2[1] == std::vector<std::string>{"C"});

  // The strongest pair overall is not adjacent in the join tree, so it can
  // never merge; the best adjacent pair wins instead.
  auto g3 = plan_groups(fx.schema, chain_matrix(0.2, 0.1, 0.99), 2);
  REQUIRE(g3.size() == 2);
  CHECK(g3[0] == std::vector<std::string>{"A", "B"});

  auto g4 = plan_groups(fx.schema, chain_matrix(0.9, 0.5, 0.3), 3);
  REQUIRE(g4.size() == 1);
  CHECK(g4[0] == std::vector<std::string>{"A", "B", "C"});

  auto g5 = plan_groups(fx.schema, chain_matrix(0.9, 0.5, 0.3), 1);
  CHECK(g5.size() == 3);
}

TEST_CASE("a lossless single-group model reproduces exact join counts") {
  ChainFixture fx("ens3");
  EnsembleOptions opts;
  opts.alpha = 0.0;
  opts.saturated_structure = true;
  auto em = build_ensemble(fx.schema, {{"A", "B", "C"}}, opts);
  REQUIRE(em.groups.size() == 1);

  EstimateOptions eo;
  eo.backend = Backend::Exact;
  struct Case {
    Query q;
  };
  std::vector<Query> queries = {
      make_query({"A"}, {in_pred("a_v", {"x"})}),
      make_query({"A"}),
      make_query({"B"}, {in_pred("b_v", {"p", "q"})}),
      make_query({"A", "B"}),
      make_query({"A", "B"}, {in_pred("b_v", {"p"})}),
      make_query({"B", "C"}, {in_pred("c_v", {"m"})}),
      make_query({"A", "B", "C"}),
      make_query({"A", "B", "C"}, {in_pred("a_v", {"x"}), in_pred("c_v", {"n"})}),
      make_query({"C"}),
  };
  for (const auto& q : queries) {
    const double truth = true_cardinality(fx.schema, q);
    const double est = estimate_cardinality(em, q, eo);
    INFO("tables ", q.tables.size(), " truth ", truth);
    CHECK(std::abs(est - truth) <= 1e-6 * std::max(1.0, truth));
  }
}

TEST_CASE("estimates agree with an enumeration of the same program") {
  ChainFixture fx("ens4");
  for (int budget : {1, 2, 3}) {
    EnsembleOptions opts;
    opts.budget = budget;
    opts.alpha = 1.0;
    opts.sample_rows = 100;
    auto em = build_ensemble(fx.schema, opts);

    std::vector<Query> queries = {
        make_query({"A", "B"}, {in_pred("b_v", {"p"})}),
        make_query({"B", "C"}),
        make_query({"A", "B", "C"}, {in_pred("a_v", {"x"})}),
    };
    for (const auto& q : queries) {
      auto info = analyze_query(em, q);
      double oracle = info.scope;
      for (std::size_t i = 0; i < info.groups.size(); ++i) {
        const auto& gm = em.groups[static_cast<std::size_t>(info.groups[i])];
        oracle *= (gm.join_size / info.scope) *
                  brute_force_expectation(gm.model, info.queries[i], info.weights[i]);
      }
      EstimateOptions eo;
      eo.backend = Backend::Exact;
      const double est = estimate_cardinality(em, q, eo);
      CHECK(std::abs(est - oracle) <= 1e-9 * std::max(1.0, oracle));
    }
  }
}

TEST_CASE("cached and plain exact backends agree bit for bit") {
  ChainFixture fx("ens5");
  EnsembleOptions opts;
  opts.budget = 2;
  auto em = build_ensemble(fx.schema, opts);
  PlanCache cache;
  std::vector<Query> queries = {
      make_query({"A", "B"}, {in_pred("b_v", {"p"})}),
      make_query({"A", "B", "C"}),
      make_query({"A", "B"}, {in_pred("b_v", {"q"})}),
  };
  for (const auto& q : queries) {
    EstimateOptions plain;
    plain.backend = Backend::Exact;
    EstimateOptions cached;
    cached.backend = Backend::CachedExact;
    CHECK(estimate_cardinality(em, q, plain) ==
          estimate_cardinality(em, q, cached, &cache));
  }
  CHECK(cache.hits() > 0);  // repeated shape on the A,B group
}

TEST_CASE("sampled backend approaches the exact backend") {
  ChainFixture fx("ens6");
  EnsembleOptions opts;
  opts.budget = 3;
  opts.alpha = 0.0;
  opts.saturated_structure = true;
  auto em = build_ensemble(fx.schema, {{"A", "B", "C"}}, opts);
  auto q = make_query({"A", "B"}, {in_pred("b_v", {"p", "q"})});
  EstimateOptions exact;
  exact.backend = Backend::Exact;
  EstimateOptions sampled;
  sampled.backend = Backend::Sampled;
  sampled.sample_count = 20000;
  const double e = estimate_cardinality(em, q, exact);
  const double s = estimate_cardinality(em, q, sampled);
  CHECK(s == doctest::Approx(e).epsilon(0.2));
  CHECK(estimate_cardinality(em, q, sampled) == s);  // deterministic per seed
}

TEST_CASE("queries over unrelated tables are rejected") {
  ChainFixture fx("ens7");
  EnsembleOptions opts;
  opts.budget = 1;
  auto em = build_ensemble(fx.schema, opts);
  CHECK_THROWS_AS(estimate_cardinality(em, make_query({"A", "C"}), {}), Error);
  CHECK_THROWS_AS(estimate_cardinality(em, make_query({"Z"}), {}), Error);
  CHECK_THROWS_AS(estimate_cardinality(em, make_query({}), {}), Error);
}

TEST_CASE("dependence matrix covers every table pair") {
  ChainFixture fx("ens8");
  EnsembleOptions opts;
  opts.sample_rows = 50;
  auto m = build_dependence_matrix(fx.schema, opts);
  m.check();
  CHECK(m.table_names.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        CHECK(m.scores[i][j] >= 0.0);
        CHECK(m.scores[i][j] <= 1.0);
      }
}
