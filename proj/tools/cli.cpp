// cardest: command-line front-end for the cardinality estimation library.
//
// Payload goes to standard output or the file named by --out/--report;
// diagnostics (timings, sizes, progress) go to standard error. Every
// stochastic command takes --seed and is bit-reproducible for a fixed seed.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cardest/ensemble.hpp"
#include "cardest/persist.hpp"
#include "cardest/plan.hpp"
#include "cardest/report.hpp"
#include "cardest/schema.hpp"
#include "cardest/synthetic.hpp"
#include "cardest/table.hpp"
#include "cardest/workload.hpp"

namespace {

using namespace cardest;
using nlohmann::json;

double file_size_bytes(const std::string& path) {
  return static_cast<double>(std::filesystem::file_size(path));
}

Backend parse_backend(const std::string& name) {
  if (name == "cve") return Backend::CachedExact;
  if (name == "exact") return Backend::Exact;
  if (name == "ps") return Backend::Sampled;
  throw Error("unknown backend: " + name + " (expected cve, exact, or ps)");
}

// Constraint files pair attribute names:
//   {"forced": [["a","b"]], "forbidden": [["c","d"]], "roots": ["e"]}
void load_named_constraints(const std::string& path, EnsembleOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  const json j = json::parse(in);
  if (j.contains("forced"))
    for (const auto& e : j.at("forced"))
      opts.forced_edges.emplace_back(e.at(0).get<std::string>(),
                                     e.at(1).get<std::string>());
  if (j.contains("forbidden"))
    for (const auto& e : j.at("forbidden"))
      opts.forbidden_edges.emplace_back(e.at(0).get<std::string>(),
                                        e.at(1).get<std::string>());
  if (j.contains("roots"))
    for (const auto& r : j.at("roots"))
      opts.forced_roots.push_back(r.get<std::string>());
}

int cmd_train(const std::string& schema_path, const std::string& out,
              int budget, const std::string& structure, double alpha,
              std::size_t sample_size, std::uint64_t seed,
              const std::string& constraints_path, int max_parents) {
  EnsembleOptions opts;
  opts.budget = budget;
  opts.alpha = alpha;
  opts.fit_sample_rows = sample_size;
  opts.seed = seed;
  opts.max_parents = max_parents;
  if (structure == "greedy")
    opts.greedy_structure = true;
  else if (structure == "saturated")
    opts.saturated_structure = true;
  else if (structure != "chow-liu")
    throw Error("unknown structure: " + structure +
                " (expected chow-liu, greedy, or saturated)");
  if (!constraints_path.empty()) load_named_constraints(constraints_path, opts);

  const auto t0 = std::chrono::steady_clock::now();
  const JoinSchema schema = load_schema(schema_path);
  const EnsembleModel em = build_ensemble(schema, opts);
  save_ensemble(em, out);
  const auto t1 = std::chrono::steady_clock::now();

  std::cerr << "trained " << em.groups.size() << " group model(s) in "
            << std::chrono::duration<double>(t1 - t0).count() << " s, "
            << file_size_bytes(out) << " bytes -> " << out << "\n";
  return 0;
}

int cmd_estimate(const std::string& model_path, const std::string& query_path,
                 const std::string& backend, std::size_t k, std::uint64_t seed) {
  const EnsembleModel em = load_ensemble(model_path);
  const Query q = load_query(query_path);
  EstimateOptions opts;
  opts.backend = parse_backend(backend);
  opts.sample_count = k;
  opts.seed = seed;
  PlanCache cache;

  const auto t0 = std::chrono::steady_clock::now();
  const double est = estimate_cardinality(em, q, opts, &cache);
  const auto t1 = std::chrono::steady_clock::now();

  std::cout << est << "\n";
  std::cerr << "latency "
            << std::chrono::duration<double, std::milli>(t1 - t0).count()
            << " ms\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& workload_path,
             const std::string& report_path, const std::string& backend,
             std::size_t k, std::uint64_t seed) {
  const EnsembleModel em = load_ensemble(model_path);
  const auto workload = read_workload(workload_path);
  EstimateOptions opts;
  opts.backend = parse_backend(backend);
  opts.sample_count = k;
  opts.seed = seed;
  PlanCache cache;

  const EvalResult r = eval_workload(em, workload, opts, &cache);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + report_path);
    out << eval_to_json(r);
  }
  std::cout << eval_to_text(r);
  double total_ms = 0.0;
  for (double ms : r.latency_ms) total_ms += ms;
  std::cerr << "mean latency "
            << total_ms / static_cast<double>(r.latency_ms.size())
            << " ms over " << r.latency_ms.size() << " queries, model "
            << file_size_bytes(model_path) << " bytes\n";
  return 0;
}

int cmd_update(const std::string& model_path, const std::string& insert_path,
               const std::string& delete_path, const std::string& out) {
  EnsembleModel em = load_ensemble(model_path);
  const bool inserting = !insert_path.empty();

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n =
      update_from_csv(em, inserting ? insert_path : delete_path, inserting);
  const auto t1 = std::chrono::steady_clock::now();

  save_ensemble(em, out);
  std::cerr << (inserting ? "inserted " : "deleted ") << n << " row(s) in "
            << std::chrono::duration<double>(t1 - t0).count() << " s\n";
  return 0;
}

int cmd_gen_data(const std::string& spec_path, const std::string& out) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + spec_path);
  const json j = json::parse(in);
  SyntheticSpec spec;
  if (j.contains("skew")) spec.skew = j.at("skew");
  if (j.contains("correlation")) spec.correlation = j.at("correlation");
  if (j.contains("domain")) spec.domain = j.at("domain");
  if (j.contains("scale")) spec.scale = j.at("scale");
  if (j.contains("rows")) spec.rows = j.at("rows");
  if (j.contains("seed")) spec.seed = j.at("seed");
  if (j.contains("table_name")) spec.table_name = j.at("table_name");

  const EncodedTable t = gen_synthetic(spec);
  std::ofstream csv(out, std::ios::binary);
  if (!csv) throw Error("cannot write file: " + out);
  for (std::size_t a = 0; a < t.attrs.size(); ++a)
    csv << (a ? "," : "") << t.attrs[a].name;
  csv << "\n";
  for (std::size_t r = 0; r < t.row_count; ++r) {
    for (std::size_t a = 0; a < t.attrs.size(); ++a)
      csv << (a ? "," : "") << t.attrs[a].value_of(t.columns[a][r]);
    csv << "\n";
  }
  std::cerr << "wrote " << t.row_count << " rows x " << t.attrs.size()
            << " columns -> " << out << "\n";
  return 0;
}

int cmd_gen_workload(const std::string& schema_path, const std::string& out,
                     const WorkloadOptions& opts, bool label) {
  const JoinSchema schema = load_schema(schema_path);
  auto queries = gen_workload(schema, opts);
  if (label)
    for (auto& q : queries) q.true_card = true_cardinality(schema, q);
  save_workload(queries, out);
  std::cerr << "wrote " << queries.size() << (label ? " labeled" : "")
            << " queries -> " << out << "\n";
  return 0;
}

int cmd_explain(const std::string& model_path, const std::string& query_path) {
  const EnsembleModel em = load_ensemble(model_path);
  const Query q = load_query(query_path);
  const QueryPlanInfo info = analyze_query(em, q);

  std::cout << "touched groups: " << info.groups.size()
            << ", scope size: " << info.scope << "\n";
  for (std::size_t i = 0; i < info.groups.size(); ++i) {
    const auto& gm = em.groups[static_cast<std::size_t>(info.groups[i])];
    std::cout << "\ngroup " << gm.name() << " (join size " << gm.join_size
              << ")\n";
    const auto plan = compile_plan(gm.model, info.queries[i], info.weights[i]);
    for (const auto& line : plan->describe(gm.model))
      std::cout << "  " << line << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cardinality estimation over relational join schemas"};
  app.require_subcommand(1);

  // train
  std::string schema_path, out_path, constraints_path;
  std::string structure = "chow-liu";
  int budget = 1, max_parents = 3;
  double alpha = 1.0;
  std::size_t sample_size = 500000;
  std::uint64_t seed = 0;
  auto* train = app.add_subcommand("train", "build and persist an ensemble model");
  train->add_option("--schema", schema_path)->required();
  train->add_option("--out", out_path)->required();
  train->add_option("--budget", budget, "max tables modeled jointly");
  train->add_option("--structure", structure, "chow-liu | greedy | saturated");
  train->add_option("--alpha", alpha, "smoothing pseudo-count");
  train->add_option("--sample-size", sample_size, "fit sample row cap");
  train->add_option("--seed", seed);
  train->add_option("--constraints", constraints_path, "expert edge constraints");
  train->add_option("--max-parents", max_parents);

  // estimate / explain
  std::string model_path, query_path, backend = "cve";
  std::size_t k = 10000;
  auto* estimate = app.add_subcommand("estimate", "estimate one query's cardinality");
  estimate->add_option("--model", model_path)->required();
  estimate->add_option("--query", query_path)->required();
  estimate->add_option("--backend", backend, "cve | exact | ps");
  estimate->add_option("--k", k, "sample count for the ps backend");
  estimate->add_option("--seed", seed);

  // eval
  std::string workload_path, report_path;
  auto* eval = app.add_subcommand("eval", "run a labeled workload and report q-errors");
  eval->add_option("--model", model_path)->required();
  eval->add_option("--workload", workload_path)->required();
  eval->add_option("--report", report_path, "JSON report destination");
  eval->add_option("--backend", backend, "cve | exact | ps");
  eval->add_option("--k", k, "sample count for the ps backend");
  eval->add_option("--seed", seed);

  // update
  std::string insert_path, delete_path;
  auto* update = app.add_subcommand("update", "incrementally add or remove rows");
  update->add_option("--model", model_path)->required();
  auto* ins_opt = update->add_option("--insert", insert_path, "rows to add (CSV)");
  auto* del_opt = update->add_option("--delete", delete_path, "rows to remove (CSV)");
  update->add_option("--out", out_path)->required();
  ins_opt->excludes(del_opt);

  // gen-data
  std::string spec_path;
  auto* gen_data = app.add_subcommand("gen-data", "generate a synthetic table");
  gen_data->add_option("--spec", spec_path)->required();
  gen_data->add_option("--out", out_path)->required();

  // gen-workload
  WorkloadOptions wl;
  bool no_label = false;
  auto* gen_wl = app.add_subcommand("gen-workload", "generate a query workload");
  gen_wl->add_option("--schema", schema_path)->required();
  gen_wl->add_option("--out", out_path)->required();
  gen_wl->add_option("--count", wl.count);
  gen_wl->add_option("--min-filters", wl.min_filters);
  gen_wl->add_option("--max-filters", wl.max_filters);
  gen_wl->add_option("--min-tables", wl.min_tables);
  gen_wl->add_option("--max-tables", wl.max_tables);
  gen_wl->add_option("--max-in-values", wl.max_in_values);
  gen_wl->add_option("--seed", wl.seed);
  gen_wl->add_flag("--no-label", no_label, "skip exact ground-truth labeling");

  // explain
  auto* explain = app.add_subcommand("explain", "show the inference plan for a query");
  explain->add_option("--model", model_path)->required();
  explain->add_option("--query", query_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train))
      return cmd_train(schema_path, out_path, budget, structure, alpha,
                       sample_size, seed, constraints_path, max_parents);
    if (app.got_subcommand(estimate))
      return cmd_estimate(model_path, query_path, backend, k, seed);
    if (app.got_subcommand(eval))
      return cmd_eval(model_path, workload_path, report_path, backend, k, seed);
    if (app.got_subcommand(update)) {
      if (insert_path.empty() == delete_path.empty())
        throw cardest::Error("update needs exactly one of --insert or --delete");
      return cmd_update(model_path, insert_path, delete_path, out_path);
    }
    if (app.got_subcommand(gen_data)) return cmd_gen_data(spec_path, out_path);
    if (app.got_subcommand(gen_wl))
      return cmd_gen_workload(schema_path, out_path, wl, !no_label);
    if (app.got_subcommand(explain)) return cmd_explain(model_path, query_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
