#include <cmath>

#include <doctest.h>

#include "cardest/infer.hpp"
#include "cardest/plan.hpp"
#include "cardest/rng.hpp"
#include "cardest/structure.hpp"
#include "cardest/synthetic.hpp"
#include "helpers.hpp"

using namespace cardest;
using cardest::testing::make_table;

namespace {

BnQuery query_on(const BayesNet& bn,
                 const std::vector<std::pair<int, std::vector<Code>>>& regions) {
  BnQuery q;
  q.regions.assign(bn.attrs.size(), std::nullopt);
  for (const auto& [node, codes] : regions)
    q.regions[static_cast<std::size_t>(node)] = codes;
  return q;
}

BayesNet random_model(std::uint64_t seed, int scale = 6, int domain = 5,
                      std::size_t rows = 2000) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.scale = scale;
  spec.domain = domain;
  spec.rows = rows;
  spec.correlation = 0.6;
  auto t = gen_synthetic(spec);
  return fit_bayesnet(t, chow_liu(t), 1.0);
}

/// Random query over `filters` distinct nodes, each with a random non-empty
/// code subset.
BnQuery random_query(const BayesNet& bn, Rng& rng, int filters) {
  BnQuery q;
  q.regions.assign(bn.attrs.size(), std::nullopt);
  for (int f = 0; f < filters; ++f) {
    const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(bn.dag.node_count)));
    const int d = bn.attrs[static_cast<std::size_t>(v)].domain_size();
    std::vector<Code> codes;
    for (Code c = 0; c < d; ++c)
      if (rng.next_double() < 0.4) codes.push_back(c);
    if (codes.empty()) codes.push_back(static_cast<Code>(rng.next_below(static_cast<std::uint64_t>(d))));
    q.regions[static_cast<std::size_t>(v)] = codes;
  }
  return q;
}

}  // namespace

TEST_CASE("graph reduction keeps the ancestor closure of constrained nodes") {
  // Diamond: 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3.
  auto t = make_table({"a", "b", "c", "d"}, {2, 2, 2, 2},
                      {{0, 0, 0, 0}, {1, 1, 1, 1}, {0, 1, 0, 1}, {1, 0, 1, 0}});
  Dag dag;
  dag.node_count = 4;
  dag.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  dag.refresh_topo_order();
  auto bn = fit_bayesnet(t, dag);

  auto none = NodeWeights::none(4);
  CHECK(reduce_graph(bn, query_on(bn, {{1, {0}}}), none) == std::vector<int>{0, 1});
  CHECK(reduce_graph(bn, query_on(bn, {{2, {0}}}), none) == std::vector<int>{0, 2});
  CHECK(reduce_graph(bn, query_on(bn, {{3, {0}}}), none) ==
        std::vector<int>{0, 1, 2, 3});
  CHECK(reduce_graph(bn, query_on(bn, {}), none).empty());
}

TEST_CASE("two independent fair coins give probability 1/4") {
  auto t = make_table({"a", "b"}, {2, 2}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  Dag dag;
  dag.node_count = 2;
  dag.refresh_topo_order();
  auto bn = fit_bayesnet(t, dag, 0.0);
  auto q = query_on(bn, {{0, {0}}, {1, {0}}});
  CHECK(exact_prob(bn, q) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(brute_force_prob(bn, q) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("variable elimination matches brute force on random queries") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto bn = random_model(seed);
    Rng rng(seed * 31 + 7);
    for (int i = 0; i < 30; ++i) {
      auto q = random_query(bn, rng, 1 + static_cast<int>(rng.next_below(4)));
      const double exact = exact_prob(bn, q);
      const double oracle = brute_force_prob(bn, q);
      CHECK(std::abs(exact - oracle) <= 1e-9);
    }
  }
}

TEST_CASE("reduction does not change the answer") {
  // Constraining every node with its full domain forces elimination over the
  // whole graph; the reduced run must agree to 1e-12.
  auto bn = random_model(11, 8, 4, 3000);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto q = random_query(bn, rng, 2);
    BnQuery full = q;
    for (int v = 0; v < bn.dag.node_count; ++v) {
      if (full.regions[static_cast<std::size_t>(v)].has_value()) continue;
      std::vector<Code> all;
      for (Code c = 0; c < bn.attrs[static_cast<std::size_t>(v)].domain_size(); ++c)
        all.push_back(c);
      full.regions[static_cast<std::size_t>(v)] = all;
    }
    CHECK(std::abs(exact_prob(bn, q) - exact_prob(bn, full)) <= 1e-12);
  }
}

TEST_CASE("chain tops collapse into stored marginals without changing answers") {
  // Chain 0 -> 1 -> 2 -> 3: a filter on node 3 alone needs only node 3's
  // stored marginal; the chain above it is dropped from the kept set.
  auto t = make_table({"a", "b", "c", "d"}, {2, 2, 2, 2},
                      {{0, 0, 0, 0}, {1, 1, 1, 1}, {0, 1, 0, 1}, {1, 0, 1, 0},
                       {0, 0, 1, 1}, {1, 1, 0, 0}});
  Dag dag;
  dag.node_count = 4;
  dag.edges = {{0, 1}, {1, 2}, {2, 3}};
  dag.refresh_topo_order();
  auto bn = fit_bayesnet(t, dag);
  for (const auto& m : bn.marginals) REQUIRE(m != nullptr);

  auto none = NodeWeights::none(4);
  auto q = query_on(bn, {{3, {0}}});
  auto reduced = reduce_and_prune(bn, q, none);
  CHECK(reduced.kept == std::vector<int>{3});
  CHECK(reduced.use_marginal[3] == 1);
  CHECK(std::abs(exact_prob(bn, q) - brute_force_prob(bn, q)) <= 1e-12);

  // Filters on two chain nodes keep the span between them plus marginals.
  auto q2 = query_on(bn, {{1, {0}}, {3, {1}}});
  auto r2 = reduce_and_prune(bn, q2, none);
  CHECK(r2.kept == std::vector<int>{1, 2, 3});
  CHECK(r2.use_marginal[1] == 1);
  CHECK(std::abs(exact_prob(bn, q2) - brute_force_prob(bn, q2)) <= 1e-12);

  // Pruned interpreted and compiled paths agree bit for bit.
  CHECK(exact_prob(bn, q2) == execute_plan(*compile_plan(bn, q2, none), bn, q2, none));
}

TEST_CASE("empty regions short-circuit to zero") {
  auto bn = random_model(4);
  BnQuery q;
  q.regions.assign(bn.attrs.size(), std::nullopt);
  q.regions[2] = std::vector<Code>{};
  CHECK(exact_prob(bn, q) == 0.0);
  CHECK(sampled_prob(bn, q, 100, 0) == 0.0);
}

TEST_CASE("compiled plans return bit-identical values") {
  auto bn = random_model(21);
  PlanCache cache;
  Rng rng(9);
  for (int i = 0; i < 40; ++i) {
    auto q = random_query(bn, rng, 1 + static_cast<int>(rng.next_below(3)));
    const double interpreted = exact_prob(bn, q);
    const double compiled = cached_prob(cache, bn, q);
    CHECK(interpreted == compiled);  // exact equality, not approximate
  }
  CHECK(cache.hits() + cache.misses() == 40);
  CHECK(cache.hits() > 0);
}

TEST_CASE("plan cache evicts least recently used entries") {
  auto bn = random_model(31, 5, 3, 500);
  PlanCache cache(2);
  auto w = NodeWeights::none(bn.dag.node_count);
  auto q1 = query_on(bn, {{0, {0}}});
  auto q2 = query_on(bn, {{1, {0}}});
  auto q3 = query_on(bn, {{2, {0}}});
  cache.get_or_compile(bn, q1, w);
  cache.get_or_compile(bn, q2, w);
  cache.get_or_compile(bn, q3, w);  // evicts q1's shape
  CHECK(cache.size() == 2);
  cache.get_or_compile(bn, q1, w);
  CHECK(cache.misses() == 4);
  cache.get_or_compile(bn, q3, w);
  CHECK(cache.hits() == 1);
}

TEST_CASE("progressive sampling is deterministic and converges") {
  auto bn = random_model(41, 8, 10, 5000);
  Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    auto q = random_query(bn, rng, 2);
    const double exact = exact_prob(bn, q);
    if (exact < 1e-3) continue;
    const double s1 = sampled_prob(bn, q, 5000, 77);
    const double s2 = sampled_prob(bn, q, 5000, 77);
    CHECK(s1 == s2);
    const double ratio = std::max(s1, exact) / std::max(1e-300, std::min(s1, exact));
    CHECK(ratio < 1.3);
  }
}

TEST_CASE("unconstrained queries sample to exactly one") {
  auto bn = random_model(3);
  BnQuery q;
  q.regions.assign(bn.attrs.size(), std::nullopt);
  CHECK(sampled_prob(bn, q, 10, 0) == 1.0);
  CHECK(exact_prob(bn, q) == 1.0);
}

TEST_CASE("weighted expectation scales a uniform two-value node by 1.5") {
  auto t = make_table({"f"}, {2}, {{0}, {1}});
  Dag dag;
  dag.node_count = 1;
  dag.refresh_topo_order();
  auto bn = fit_bayesnet(t, dag, 0.0);
  // Value 0 carries weight 1, value 1 carries weight 2.
  NodeWeights w = NodeWeights::none(1);
  w.weights[0] = std::vector<double>{1.0, 2.0};
  BnQuery q;
  q.regions.assign(1, std::nullopt);
  CHECK(exact_expectation(bn, q, w) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(brute_force_expectation(bn, q, w) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sampled_expectation(bn, q, w, 100, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("weighted expectation matches the enumeration oracle") {
  auto bn = random_model(51, 5, 4, 1500);
  Rng rng(17);
  for (int i = 0; i < 15; ++i) {
    auto q = random_query(bn, rng, 2);
    NodeWeights w = NodeWeights::none(bn.dag.node_count);
    const int v = static_cast<int>(rng.next_below(5));
    std::vector<double> wv;
    for (int c = 0; c < bn.attrs[static_cast<std::size_t>(v)].domain_size(); ++c)
      wv.push_back(1.0 + rng.next_double() * 3.0);
    w.weights[static_cast<std::size_t>(v)] = wv;
    const double exact = exact_expectation(bn, q, w);
    const double oracle = brute_force_expectation(bn, q, w);
    CHECK(std::abs(exact - oracle) <= 1e-9 * std::max(1.0, oracle));
  }
}

TEST_CASE("plan descriptions name the touched attributes") {
  auto bn = random_model(61, 4, 3, 300);
  auto q = query_on(bn, {{1, {0}}});
  auto w = NodeWeights::none(bn.dag.node_count);
  auto plan = compile_plan(bn, q, w);
  auto lines = plan->describe(bn);
  REQUIRE(!lines.empty());
  CHECK(lines[0].rfind("keep:", 0) == 0);
}
