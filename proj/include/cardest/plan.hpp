#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cardest/infer.hpp"

namespace cardest {

/// Reusable elimination schedule for one (model, constrained-node set,
/// weighted-node set) shape.  Execution slices the tables down to the query
/// regions and runs the shared elimination core, so a compiled run produces
/// bit-identical results to the per-query path; the saving is the skipped
/// analysis and the reduced factor extents.
struct CompiledPlan {
  std::string model_id;
  std::vector<int> constrained;  // ascending node ids
  std::vector<int> weighted;     // ascending node ids
  std::vector<int> kept;
  std::vector<int> order;
  /// Indexed by node id; 1 means the node's factor is its stored marginal.
  std::vector<char> use_marginal;

  /// Human-readable step list (for the explain command).
  std::vector<std::string> describe(const BayesNet& bn) const;
};

std::shared_ptr<const CompiledPlan> compile_plan(const BayesNet& bn,
                                                 const BnQuery& q,
                                                 const NodeWeights& w);

double execute_plan(const CompiledPlan& plan, const BayesNet& bn,
                    const BnQuery& q, const NodeWeights& w);

/// Thread-safe LRU cache of compiled plans keyed by query shape.
class PlanCache {
 public:
  explicit PlanCache(std::size_t capacity = 1024) : capacity_(capacity) {}

  std::shared_ptr<const CompiledPlan> get_or_compile(const BayesNet& bn,
                                                     const BnQuery& q,
                                                     const NodeWeights& w);
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t size() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::string> lru_;  // most recent first
  std::unordered_map<std::string,
                     std::pair<std::shared_ptr<const CompiledPlan>,
                               std::list<std::string>::iterator>>
      map_;
  std::size_t hits_ = 0, misses_ = 0;
};

/// Convenience: cached-plan probability / expectation.
double cached_prob(PlanCache& cache, const BayesNet& bn, const BnQuery& q);
double cached_expectation(PlanCache& cache, const BayesNet& bn, const BnQuery& q,
                          const NodeWeights& w);

}  // namespace cardest
