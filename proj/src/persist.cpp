#include "cardest/persist.hpp"

#include <fstream>

#include <json.hpp>

namespace cardest {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json attr_to_json(const AttributeMeta& a) {
  json j;
  j["name"] = a.name;
  j["kind"] = a.kind == AttrKind::Categorical ? "categorical" : "binned";
  if (a.kind == AttrKind::Categorical)
    j["values"] = a.values;
  else
    j["edges"] = a.edges;
  j["has_absent"] = a.has_absent;
  return j;
}

AttributeMeta attr_from_json(const json& j) {
  AttributeMeta a;
  a.name = j.at("name");
  const std::string kind = j.at("kind");
  if (kind == "categorical") {
    a.kind = AttrKind::Categorical;
    a.values = j.at("values").get<std::vector<std::string>>();
  } else if (kind == "binned") {
    a.kind = AttrKind::BinnedContinuous;
    a.edges = j.at("edges").get<std::vector<double>>();
  } else {
    throw Error("unknown attribute kind in model file: " + kind);
  }
  a.has_absent = j.at("has_absent");
  a.check();
  return a;
}

json bn_to_json(const BayesNet& bn) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model_id"] = bn.model_id;
  j["alpha"] = bn.alpha;
  j["row_count"] = bn.row_count;
  j["attrs"] = json::array();
  for (const auto& a : bn.attrs) j["attrs"].push_back(attr_to_json(a));
  j["edges"] = json::array();
  for (auto [p, c] : bn.dag.edges) j["edges"].push_back(json::array({p, c}));
  j["counts"] = json::array();
  for (const auto& cpt : bn.cpts) j["counts"].push_back(cpt->counts);
  return j;
}

BayesNet bn_from_json(const json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw Error("unsupported model format version");
  BayesNet bn;
  bn.model_id = j.at("model_id");
  bn.alpha = j.at("alpha");
  bn.row_count = j.at("row_count");
  for (const auto& aj : j.at("attrs")) bn.attrs.push_back(attr_from_json(aj));
  bn.dag.node_count = static_cast<int>(bn.attrs.size());
  for (const auto& ej : j.at("edges"))
    bn.dag.edges.emplace_back(ej.at(0).get<int>(), ej.at(1).get<int>());
  bn.dag.refresh_topo_order();
  auto parents = bn.dag.parents();
  const auto& counts = j.at("counts");
  if (counts.size() != bn.attrs.size()) throw Error("model file table count mismatch");
  for (int v = 0; v < bn.dag.node_count; ++v) {
    auto cpt = std::make_shared<Cpt>();
    cpt->node = v;
    cpt->parent_ids = parents[static_cast<std::size_t>(v)];
    cpt->child_domain = bn.attrs[static_cast<std::size_t>(v)].domain_size();
    for (int p : cpt->parent_ids)
      cpt->config_count *= static_cast<std::size_t>(
          bn.attrs[static_cast<std::size_t>(p)].domain_size());
    cpt->counts = counts.at(static_cast<std::size_t>(v)).get<std::vector<double>>();
    cpt->renormalize(bn.alpha);
    bn.cpts.push_back(std::move(cpt));
  }
  bn.check();
  bn.refresh_marginals();
  return bn;
}

json ensemble_to_json(const EnsembleModel& em) {
  json j;
  j["format_version"] = kFormatVersion;
  j["groups"] = json::array();
  for (const auto& g : em.groups) {
    json gj;
    gj["members"] = g.members;
    gj["edges"] = json::array();
    for (const auto& [a, b] : g.edges) gj["edges"].push_back(json::array({a, b}));
    gj["attr_tables"] = json::array();
    for (const auto& [a, t] : g.attr_tables)
      gj["attr_tables"].push_back(json::array({a, t}));
    gj["join_size"] = g.join_size;
    gj["model"] = bn_to_json(g.model);
    j["groups"].push_back(std::move(gj));
  }
  j["links"] = json::array();
  for (const auto& l : em.links) {
    json lj;
    lj["group_a"] = l.group_a;
    lj["group_b"] = l.group_b;
    lj["table_a"] = l.table_a;
    lj["table_b"] = l.table_b;
    lj["fanout_attr_a"] = l.fanout_attr_a;
    lj["fanout_attr_b"] = l.fanout_attr_b;
    lj["expand_a_to_b"] = l.expand_a_to_b;
    lj["expand_b_to_a"] = l.expand_b_to_a;
    j["links"].push_back(std::move(lj));
  }
  return j;
}

EnsembleModel ensemble_from_json(const json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw Error("unsupported model format version");
  EnsembleModel em;
  for (const auto& gj : j.at("groups")) {
    GroupModel g;
    g.members = gj.at("members").get<std::vector<std::string>>();
    for (const auto& ej : gj.at("edges"))
      g.edges.emplace_back(ej.at(0).get<std::string>(), ej.at(1).get<std::string>());
    for (const auto& aj : gj.at("attr_tables"))
      g.attr_tables.emplace_back(aj.at(0).get<std::string>(),
                                 aj.at(1).get<std::string>());
    g.join_size = gj.at("join_size");
    g.model = bn_from_json(gj.at("model"));
    em.groups.push_back(std::move(g));
  }
  for (const auto& lj : j.at("links")) {
    GroupLink l;
    l.group_a = lj.at("group_a");
    l.group_b = lj.at("group_b");
    l.table_a = lj.at("table_a");
    l.table_b = lj.at("table_b");
    l.fanout_attr_a = lj.at("fanout_attr_a");
    l.fanout_attr_b = lj.at("fanout_attr_b");
    l.expand_a_to_b = lj.at("expand_a_to_b");
    l.expand_b_to_a = lj.at("expand_b_to_a");
    em.links.push_back(std::move(l));
  }
  em.check();
  return em;
}

json query_to_json(const Query& q) {
  json j;
  j["tables"] = q.tables;
  j["predicates"] = json::array();
  for (const auto& p : q.predicates) {
    json pj;
    pj["attr"] = p.attr;
    if (p.op == PredOp::In) {
      pj["op"] = "in";
      pj["values"] = p.values;
    } else {
      pj["op"] = "range";
      pj["lo"] = p.lo;
      pj["hi"] = p.hi;
    }
    j["predicates"].push_back(std::move(pj));
  }
  if (q.true_card.has_value()) j["true_card"] = *q.true_card;
  return j;
}

Query query_from_json(const json& j) {
  Query q;
  q.tables = j.at("tables").get<std::vector<std::string>>();
  for (const auto& pj : j.at("predicates")) {
    Predicate p;
    p.attr = pj.at("attr");
    const std::string op = pj.at("op");
    if (op == "in") {
      p.op = PredOp::In;
      p.values = pj.at("values").get<std::vector<std::string>>();
    } else if (op == "range") {
      p.op = PredOp::Range;
      p.lo = pj.at("lo");
      p.hi = pj.at("hi");
    } else {
      throw Error("unknown predicate op: " + op);
    }
    q.predicates.push_back(std::move(p));
  }
  if (j.contains("true_card")) q.true_card = j.at("true_card").get<double>();
  return q;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << body;
}

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  return json::parse(in);
}

}  // namespace

void save_bayesnet(const BayesNet& bn, const std::string& path) {
  write_text(path, bn_to_json(bn).dump(2) + "\n");
}

BayesNet load_bayesnet(const std::string& path) {
  return bn_from_json(parse_file(path));
}

void save_ensemble(const EnsembleModel& em, const std::string& path) {
  write_text(path, ensemble_to_json(em).dump(2) + "\n");
}

EnsembleModel load_ensemble(const std::string& path) {
  return ensemble_from_json(parse_file(path));
}

void save_query(const Query& q, const std::string& path) {
  write_text(path, query_to_json(q).dump(2) + "\n");
}

Query load_query(const std::string& path) {
  return query_from_json(parse_file(path));
}

Query parse_query(const std::string& json_text) {
  return query_from_json(json::parse(json_text));
}

std::string query_json(const Query& q) { return query_to_json(q).dump(); }

void save_workload(const std::vector<Query>& queries, const std::string& path) {
  std::string body;
  for (const auto& q : queries) body += query_to_json(q).dump() + "\n";
  write_text(path, body);
}

std::vector<Query> read_workload(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<Query> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(query_from_json(json::parse(line)));
  }
  return out;
}

void save_constraints(const StructureConstraints& c, const std::string& path) {
  json j;
  j["forced"] = json::array();
  for (auto [p, q] : c.forced_edges) j["forced"].push_back(json::array({p, q}));
  j["forbidden"] = json::array();
  for (auto [p, q] : c.forbidden_edges) j["forbidden"].push_back(json::array({p, q}));
  j["roots"] = c.forced_roots;
  write_text(path, j.dump(2) + "\n");
}

StructureConstraints load_constraints(const std::string& path) {
  const json j = parse_file(path);
  StructureConstraints c;
  for (const auto& e : j.at("forced"))
    c.forced_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  for (const auto& e : j.at("forbidden"))
    c.forbidden_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  c.forced_roots = j.at("roots").get<std::vector<int>>();
  return c;
}

}  // namespace cardest
