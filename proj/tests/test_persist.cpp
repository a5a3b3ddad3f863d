#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "cardest/ensemble.hpp"
#include "cardest/persist.hpp"
#include "cardest/structure.hpp"
#include "cardest/synthetic.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"

using namespace cardest;
using cardest::testing::ChainFixture;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
  std::filesystem::path dir;
  explicit TempDir(const std::string& tag) {
    dir = std::filesystem::temp_directory_path() / ("cardest_persist_" + tag);
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("model files round-trip byte for byte") {
  TempDir td("bn");
  SyntheticSpec spec;
  spec.rows = 600;
  spec.domain = 6;
  spec.scale = 5;
  auto t = gen_synthetic(spec);
  auto bn = fit_bayesnet(t, chow_liu(t), 1.0, "m1");

  save_bayesnet(bn, td.path("m.json"));
  auto loaded = load_bayesnet(td.path("m.json"));
  save_bayesnet(loaded, td.path("m2.json"));
  CHECK(slurp(td.path("m.json")) == slurp(td.path("m2.json")));

  CHECK(loaded.model_id == "m1");
  CHECK(loaded.row_count == bn.row_count);
  for (std::size_t v = 0; v < bn.cpts.size(); ++v) {
    CHECK(loaded.cpts[v]->counts == bn.cpts[v]->counts);
    CHECK(loaded.cpts[v]->prob == bn.cpts[v]->prob);  // re-derived, identical
  }
}

TEST_CASE("ensemble files round-trip byte for byte") {
  TempDir td("ens");
  ChainFixture fx("persist");
  EnsembleOptions opts;
  opts.budget = 2;
  auto em = build_ensemble(fx.schema, opts);
  save_ensemble(em, td.path("e.json"));
  auto loaded = load_ensemble(td.path("e.json"));
  save_ensemble(loaded, td.path("e2.json"));
  CHECK(slurp(td.path("e.json")) == slurp(td.path("e2.json")));
  CHECK(loaded.groups.size() == em.groups.size());
  CHECK(loaded.links.size() == em.links.size());

  // Loaded models answer identically.
  Query q;
  q.tables = {"A", "B"};
  EstimateOptions eo;
  eo.backend = Backend::Exact;
  CHECK(estimate_cardinality(em, q, eo) == estimate_cardinality(loaded, q, eo));
}

TEST_CASE("workload files round-trip") {
  TempDir td("wl");
  Query q1;
  q1.tables = {"t"};
  Predicate p;
  p.attr = "x";
  p.op = PredOp::In;
  p.values = {"3", "5"};
  q1.predicates = {p};
  q1.true_card = 17.0;
  Query q2;
  q2.tables = {"a", "b"};
  Predicate r;
  r.attr = "y";
  r.op = PredOp::Range;
  r.lo = 1.5;
  r.hi = 9.25;
  q2.predicates = {r};

  save_workload({q1, q2}, td.path("w.jsonl"));
  auto back = read_workload(td.path("w.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].tables == q1.tables);
  CHECK(back[0].predicates[0].values == p.values);
  CHECK(back[0].true_card == 17.0);
  CHECK_FALSE(back[1].true_card.has_value());
  CHECK(back[1].predicates[0].lo == 1.5);
  CHECK(back[1].predicates[0].hi == 9.25);

  save_workload(back, td.path("w2.jsonl"));
  CHECK(slurp(td.path("w.jsonl")) == slurp(td.path("w2.jsonl")));
}

TEST_CASE("constraint files round-trip") {
  TempDir td("cons");
  StructureConstraints c;
  c.forced_edges = {{0, 1}, {2, 3}};
  c.forbidden_edges = {{1, 0}};
  c.forced_roots = {0};
  save_constraints(c, td.path("c.json"));
  auto back = load_constraints(td.path("c.json"));
  CHECK(back.forced_edges == c.forced_edges);
  CHECK(back.forbidden_edges == c.forbidden_edges);
  CHECK(back.forced_roots == c.forced_roots);
}

TEST_CASE("corrupt model files are rejected") {
  TempDir td("bad");
  {
    std::ofstream out(td.path("bad.json"));
    out << "{\"format_version\": 99}";
  }
  CHECK_THROWS_AS(load_bayesnet(td.path("bad.json")), Error);
  CHECK_THROWS_AS(load_bayesnet(td.path("missing.json")), Error);
}
