#include <cmath>
#include <map>

#include <doctest.h>

#include "cardest/synthetic.hpp"

using namespace cardest;

namespace {

std::string meta_value(const EncodedTable& t, const std::string& key) {
  for (const auto& [k, v] : t.metadata)
    if (k == key) return v;
  throw Error("missing metadata key " + key);
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.skew = 1.0;
  s.correlation = 0.5;
  s.domain = 20;
  s.scale = 5;
  s.rows = 5000;
  s.seed = 42;
  return s;
}

}  // namespace

TEST_CASE("generator output matches its spec") {
  auto s = small_spec();
  auto t = gen_synthetic(s);
  CHECK(t.row_count == s.rows);
  CHECK(t.attrs.size() == static_cast<std::size_t>(s.scale));
  CHECK(t.name == s.table_name);
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    CHECK(t.attrs[c].domain_size() == s.domain);
    for (Code v : t.columns[c]) {
      CHECK(v >= 0);
      CHECK(v < s.domain);
    }
  }
  t.check();
}

TEST_CASE("same seed reproduces the table, different seed does not") {
  auto s = small_spec();
  auto a = gen_synthetic(s);
  auto b = gen_synthetic(s);
  CHECK(a.columns == b.columns);
  s.seed = 43;
  auto c = gen_synthetic(s);
  CHECK(a.columns != c.columns);
}

TEST_CASE("zero skew draws codes roughly uniformly") {
  auto s = small_spec();
  s.skew = 0.0;
  s.correlation = 0.0;
  s.rows = 20000;
  auto t = gen_synthetic(s);
  std::map<Code, std::size_t> counts;
  for (Code v : t.columns[0]) counts[v]++;
  const double expect = static_cast<double>(s.rows) / s.domain;
  CHECK(counts.size() == static_cast<std::size_t>(s.domain));
  for (const auto& [code, n] : counts) {
    CHECK(n > expect * 0.8);
    CHECK(n < expect * 1.2);
  }
}

TEST_CASE("positive skew concentrates mass on low codes") {
  auto s = small_spec();
  s.skew = 2.0;
  s.correlation = 0.0;
  s.rows = 20000;
  auto t = gen_synthetic(s);
  std::size_t low = 0;
  for (Code v : t.columns[0])
    if (v < s.domain / 4) low++;
  CHECK(static_cast<double>(low) / s.rows > 0.6);
}

TEST_CASE("full correlation copies the source column exactly") {
  auto s = small_spec();
  s.correlation = 1.0;
  auto t = gen_synthetic(s);
  for (int c = 1; c < s.scale; ++c) {
    const int src = std::stoi(meta_value(t, "source_of_" + std::to_string(c)));
    REQUIRE(src >= 0);
    REQUIRE(src < c);
    CHECK(t.columns[c] == t.columns[src]);
  }
}

TEST_CASE("zero correlation leaves columns unlinked") {
  auto s = small_spec();
  s.correlation = 0.0;
  s.rows = 10000;
  auto t = gen_synthetic(s);
  // Column 1 should agree with its source about as often as chance predicts
  // under the shared marginal, far less than always.
  const int src = std::stoi(meta_value(t, "source_of_1"));
  std::size_t agree = 0;
  for (std::size_t r = 0; r < t.row_count; ++r)
    if (t.columns[1][r] == t.columns[static_cast<std::size_t>(src)][r]) agree++;
  CHECK(static_cast<double>(agree) / t.row_count < 0.5);
}

TEST_CASE("invalid specs are rejected") {
  auto s = small_spec();
  s.domain = 0;
  CHECK_THROWS_AS(gen_synthetic(s), Error);
  s = small_spec();
  s.scale = 0;
  CHECK_THROWS_AS(gen_synthetic(s), Error);
  s = small_spec();
  s.correlation = 1.5;
  CHECK_THROWS_AS(gen_synthetic(s), Error);
}
