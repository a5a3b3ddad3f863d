#include <cmath>

#include <doctest.h>

#include "cardest/rdc.hpp"
#include "cardest/rng.hpp"
#include "helpers.hpp"

using namespace cardest;

namespace {

std::vector<double> uniform_draws(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.next_double();
  return v;
}

}  // namespace

TEST_CASE("dependence of a column with itself is near one") {
  auto x = uniform_draws(500, 1);
  const double s = rdc(x, x);
  CHECK(s > 0.95);
  CHECK(s <= 1.0);
}

TEST_CASE("monotone transforms preserve dependence") {
  auto x = uniform_draws(500, 2);
  std::vector<double> y;
  for (double v : x) y.push_back(std::exp(3.0 * v));
  CHECK(rdc(x, y) > 0.95);
}

TEST_CASE("nonlinear dependence is detected") {
  auto x = uniform_draws(800, 3);
  std::vector<double> y;
  for (double v : x) y.push_back((v - 0.5) * (v - 0.5));  // non-monotone
  CHECK(rdc(x, y) > 0.5);
}

TEST_CASE("independent columns score low") {
  auto x = uniform_draws(1000, 4);
  auto y = uniform_draws(1000, 5);
  CHECK(rdc(x, y) < 0.35);
}

TEST_CASE("constant columns score zero") {
  auto x = uniform_draws(100, 6);
  std::vector<double> c(100, 7.0);
  CHECK(rdc(x, c) == 0.0);
  CHECK(rdc(c, x) == 0.0);
}

TEST_CASE("scores are deterministic for a fixed seed") {
  auto x = uniform_draws(300, 7);
  auto y = uniform_draws(300, 8);
  CHECK(rdc(x, y) == rdc(x, y));
  RdcParams p;
  p.seed = 99;
  CHECK(rdc(x, y, p) == rdc(x, y, p));
}

TEST_CASE("short columns are rejected") {
  std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(rdc(x, x), Error);
}

TEST_CASE("table-pair score averages all cross pairs") {
  // Table with columns u, v, w where w == u: pairing {u} x {w} maxes out
  // while {v} x {w} is low; {u,v} x {w} sits in between.
  Rng rng(11);
  std::vector<std::vector<Code>> rows;
  for (int i = 0; i < 400; ++i) {
    const Code u = static_cast<Code>(rng.next_below(8));
    const Code v = static_cast<Code>(rng.next_below(8));
    rows.push_back({u, v, u});
  }
  auto t = cardest::testing::make_table({"u", "v", "w"}, {8, 8, 8}, rows);
  const double uw = table_pair_rdc(t, {"u"}, {"w"});
  const double vw = table_pair_rdc(t, {"v"}, {"w"});
  const double both = table_pair_rdc(t, {"u", "v"}, {"w"});
  CHECK(uw > 0.9);
  CHECK(vw < 0.4);
  CHECK(both == doctest::Approx((uw + vw) / 2.0).epsilon(1e-12));
}

TEST_CASE("merged-group scores are attribute-count weighted averages") {
  DependenceMatrix m;
  m.table_names = {"A", "B", "C"};
  m.attr_counts = {2, 1, 3};
  m.scores = {{0, 0.8, 0.2}, {0.8, 0, 0.6}, {0.2, 0.6, 0}};
  // Singleton pair: the matrix entry itself.
  CHECK(merged_group_rdc(m, {"A"}, {"B"}) == 0.8);
  // {A,B} vs {C}: weights are cross attr-count products 2*3 and 1*3.
  const double expect = (0.2 * 6.0 + 0.6 * 3.0) / 9.0;
  CHECK(merged_group_rdc(m, {"A", "B"}, {"C"}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(merged_group_rdc(m, {"A"}, {"A", "B"}), Error);
}
