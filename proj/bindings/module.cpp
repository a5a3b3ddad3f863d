// Python bindings. Queries and reports cross the boundary as JSON strings;
// the pure-Python package wraps them with dict-based conveniences.

#include <fstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cardest/ensemble.hpp"
#include "cardest/persist.hpp"
#include "cardest/plan.hpp"
#include "cardest/report.hpp"
#include "cardest/schema.hpp"
#include "cardest/synthetic.hpp"
#include "cardest/workload.hpp"

namespace py = pybind11;
using namespace cardest;

namespace {

EstimateOptions make_estimate_options(const std::string& backend, std::size_t k,
                                      std::uint64_t seed) {
  EstimateOptions o;
  if (backend == "cve")
    o.backend = Backend::CachedExact;
  else if (backend == "exact")
    o.backend = Backend::Exact;
  else if (backend == "ps")
    o.backend = Backend::Sampled;
  else
    throw Error("unknown backend: " + backend + " (expected cve, exact, or ps)");
  o.sample_count = k;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cardinality estimation over relational join schemas";

  py::register_exception<Error>(m, "CardestError");

  py::class_<EnsembleModel>(m, "Model")
      .def_property_readonly("group_count",
                             [](const EnsembleModel& em) { return em.groups.size(); })
      .def_property_readonly("groups",
                             [](const EnsembleModel& em) {
                               std::vector<std::vector<std::string>> out;
                               for (const auto& g : em.groups)
                                 out.push_back(g.members);
                               return out;
                             })
      .def("save", [](const EnsembleModel& em,
                      const std::string& path) { save_ensemble(em, path); })
      .def(
          "estimate",
          [](const EnsembleModel& em, const std::string& query_json,
             const std::string& backend, std::size_t k, std::uint64_t seed) {
            return estimate_cardinality(em, parse_query(query_json),
                                        make_estimate_options(backend, k, seed));
          },
          py::arg("query_json"), py::arg("backend") = "cve",
          py::arg("k") = 10000, py::arg("seed") = 0)
      .def(
          "explain",
          [](const EnsembleModel& em, const std::string& query_json) {
            const QueryPlanInfo info = analyze_query(em, parse_query(query_json));
            std::vector<std::string> lines;
            lines.push_back("touched groups: " + std::to_string(info.groups.size()) +
                            ", scope size: " + std::to_string(info.scope));
            for (std::size_t i = 0; i < info.groups.size(); ++i) {
              const auto& gm = em.groups[static_cast<std::size_t>(info.groups[i])];
              lines.push_back("group " + gm.name());
              const auto plan =
                  compile_plan(gm.model, info.queries[i], info.weights[i]);
              for (const auto& step : plan->describe(gm.model))
                lines.push_back("  " + step);
            }
            return lines;
          },
          py::arg("query_json"))
      .def(
          "insert_csv",
          [](EnsembleModel& em, const std::string& path) {
            return update_from_csv(em, path, true);
          },
          py::arg("path"))
      .def(
          "delete_csv",
          [](EnsembleModel& em, const std::string& path) {
            return update_from_csv(em, path, false);
          },
          py::arg("path"));

  m.def(
      "train",
      [](const std::string& schema_path, int budget, const std::string& structure,
         double alpha, std::size_t sample_size, std::uint64_t seed,
         int max_parents) {
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
          throw Error("unknown structure: " + structure);
        return build_ensemble(load_schema(schema_path), opts);
      },
      py::arg("schema_path"), py::arg("budget") = 1,
      py::arg("structure") = "chow-liu", py::arg("alpha") = 1.0,
      py::arg("sample_size") = 500000, py::arg("seed") = 0,
      py::arg("max_parents") = 3);

  m.def("load_model", &load_ensemble, py::arg("path"));

  m.def(
      "gen_workload",
      [](const std::string& schema_path, std::size_t count, int min_filters,
         int max_filters, int min_tables, int max_tables, int max_in_values,
         std::uint64_t seed, bool label) {
        const JoinSchema schema = load_schema(schema_path);
        WorkloadOptions opts;
        opts.count = count;
        opts.min_filters = min_filters;
        opts.max_filters = max_filters;
        opts.min_tables = min_tables;
        opts.max_tables = max_tables;
        opts.max_in_values = max_in_values;
        opts.seed = seed;
        auto queries = gen_workload(schema, opts);
        std::vector<std::string> out;
        for (auto& q : queries) {
          if (label) q.true_card = true_cardinality(schema, q);
          out.push_back(query_json(q));
        }
        return out;
      },
      py::arg("schema_path"), py::arg("count") = 100, py::arg("min_filters") = 1,
      py::arg("max_filters") = 4, py::arg("min_tables") = 1,
      py::arg("max_tables") = 1, py::arg("max_in_values") = 5,
      py::arg("seed") = 0, py::arg("label") = true);

  m.def(
      "eval_workload",
      [](const EnsembleModel& em, const std::vector<std::string>& queries,
         const std::string& backend, std::size_t k, std::uint64_t seed) {
        std::vector<Query> parsed;
        for (const auto& q : queries) parsed.push_back(parse_query(q));
        PlanCache cache;
        const EvalResult r = eval_workload(
            em, parsed, make_estimate_options(backend, k, seed), &cache);
        return eval_to_json(r);
      },
      py::arg("model"), py::arg("queries"), py::arg("backend") = "cve",
      py::arg("k") = 10000, py::arg("seed") = 0);

  m.def(
      "gen_data_csv",
      [](double skew, double correlation, int domain, int scale, std::size_t rows,
         std::uint64_t seed, const std::string& table_name,
         const std::string& out_path) {
        SyntheticSpec spec;
        spec.skew = skew;
        spec.correlation = correlation;
        spec.domain = domain;
        spec.scale = scale;
        spec.rows = rows;
        spec.seed = seed;
        spec.table_name = table_name;
        const EncodedTable t = gen_synthetic(spec);
        std::string body;
        for (std::size_t a = 0; a < t.attrs.size(); ++a)
          body += (a ? "," : "") + t.attrs[a].name;
        body += "\n";
        for (std::size_t r = 0; r < t.row_count; ++r) {
          for (std::size_t a = 0; a < t.attrs.size(); ++a) {
            if (a) body += ",";
            body += t.attrs[a].value_of(t.columns[a][r]);
          }
          body += "\n";
        }
        std::ofstream outf(out_path, std::ios::binary);
        if (!outf) throw Error("cannot write file: " + out_path);
        outf << body;
      },
      py::arg("skew") = 1.0, py::arg("correlation") = 0.5, py::arg("domain") = 100,
      py::arg("scale") = 10, py::arg("rows") = 100000, py::arg("seed") = 0,
      py::arg("table_name") = "synthetic", py::arg("out_path") = "table.csv");
}
