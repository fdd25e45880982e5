#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblikit/fusion.hpp"
#include "oblikit/graph.hpp"
#include "oblikit/hierarchy.hpp"

namespace oblikit {

struct OracleBudget {
  std::size_t max_nodes = 12;
  std::size_t max_demands = 4;
  std::size_t max_paths = 10000;  // simple paths per demand
};

// Thrown whenever a budget would be exceeded; the search is never truncated.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All simple u-v paths ordered by (weighted length, node sequence).
std::vector<Path> enumerate_simple_paths(const WeightedPlanarGraph& g, NodeId u, NodeId v,
                                         std::size_t max_paths = OracleBudget{}.max_paths);

struct OracleResult {
  double cost = 0.0;
  std::optional<Rational> exact_cost;
  std::vector<Path> witness;  // one per demand, lexicographically first optimum
};

// Exhaustive minimum of total_cost over every assignment of simple paths.
// Rejects f that fail validate_canonical (std::invalid_argument).
OracleResult optimal_cost(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f,
                          const OracleBudget& budget = {});

// Minimum weight of a connected subgraph spanning the terminals.
Weight steiner_brute(const WeightedPlanarGraph& g, std::span<const NodeId> terminals,
                     const OracleBudget& budget = {});

// Every demand on its deterministic shortest path.
CostReport baseline_independent_shortest(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f);

struct RatioReport {
  double cost = 0.0;       // C(A) of the oblivious paths
  double optimum = 0.0;    // C*(A)
  double ratio = 1.0;      // C / C*, defined as 1 when both are 0
  std::optional<Rational> exact_cost;
  std::optional<Rational> exact_optimum;
};

RatioReport approximation_ratio(const CoverHierarchy& h, const AuxiliaryPathSet& q, const DemandSet& a,
                                const FusionFunction& f, const OracleBudget& budget = {});

// Text sidecar of oracle results: "<fingerprint> <f> <demands> <cost> <exact|-> <witness>".
// Demands are written as s-t joined by commas; witness paths as dot-joined
// node lists separated by '|'.
class OracleCache {
 public:
  explicit OracleCache(std::string path);
  // Path from OBLIKIT_CACHE, if set and non-empty.
  static std::optional<OracleCache> from_environment();

  const std::string& path() const noexcept { return path_; }
  std::optional<OracleResult> lookup(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f) const;
  void store(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f, const OracleResult& r) const;

 private:
  std::string path_;
};

// optimal_cost through an optional cache.
OracleResult cached_optimal_cost(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f,
                                 const OracleBudget& budget, const OracleCache* cache);

}  // namespace oblikit
