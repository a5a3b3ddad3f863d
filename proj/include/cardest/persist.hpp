#pragma once

#include <string>
#include <vector>

#include "cardest/bayesnet.hpp"
#include "cardest/ensemble.hpp"
#include "cardest/query.hpp"
#include "cardest/structure.hpp"

namespace cardest {

/// Model files carry counts, not probabilities; probabilities are re-derived
/// and validated on load, so save -> load -> save is byte-identical.
void save_bayesnet(const BayesNet& bn, const std::string& path);
BayesNet load_bayesnet(const std::string& path);

void save_ensemble(const EnsembleModel& em, const std::string& path);
EnsembleModel load_ensemble(const std::string& path);

void save_query(const Query& q, const std::string& path);
Query load_query(const std::string& path);

/// In-memory JSON codec for queries (same schema as the files).
Query parse_query(const std::string& json_text);
std::string query_json(const Query& q);

/// Workloads are JSON lines: one query object per line.
void save_workload(const std::vector<Query>& queries, const std::string& path);
std::vector<Query> read_workload(const std::string& path);

void save_constraints(const StructureConstraints& c, const std::string& path);
StructureConstraints load_constraints(const std::string& path);

}  // namespace cardest
