#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "oblikit/graph.hpp"
#include "oblikit/hierarchy.hpp"

namespace oblikit {

using Rational = boost::rational<std::int64_t>;

// f: load -> cost multiplier. Functions whose values are rational at every
// integer load also carry an exact evaluator.
class FusionFunction {
 public:
  using Eval = std::function<double(std::int64_t)>;
  using ExactEval = std::function<Rational(std::int64_t)>;

  FusionFunction(std::string name, Eval eval, ExactEval exact = {});

  const std::string& name() const noexcept { return name_; }
  double operator()(std::int64_t load) const;
  bool has_exact() const noexcept { return static_cast<bool>(exact_); }
  Rational exact(std::int64_t load) const;

 private:
  std::string name_;
  Eval eval_;
  ExactEval exact_;
};

FusionFunction identity_fusion();
FusionFunction power_fusion(double alpha);  // x^alpha, alpha in (0, 1]
FusionFunction unit_step_fusion();          // 0 at 0, 1 afterwards
FusionFunction saturating_fusion(double c); // min(x, c), c >= 1
FusionFunction log2p1_fusion();             // log2(1 + x)

// "identity", "power:<alpha>", "unit-step", "saturating:<c>", "log2p1".
// Throws std::invalid_argument on unknown names or bad parameters.
FusionFunction builtin_fusion(std::string_view spec);
// One representative spec per builtin family.
std::vector<std::string> builtin_fusion_specs();

struct CanonicalReport {
  bool ok = true;
  std::string property;  // "f0", "monotone", "concave", "subadditive"
  std::int64_t x = 0;    // load where the check failed
  std::int64_t y = 0;    // second summand for subadditivity
  std::string message;
};

// Checks f(0) = 0, monotonicity and concavity on [0, n], and subadditivity
// for all x + y <= n; reports the first failure in that order.
CanonicalReport validate_canonical(const FusionFunction& f, std::int64_t n);

struct Demand {
  NodeId s = -1;
  NodeId t = -1;
  bool operator==(const Demand&) const = default;
};

using DemandSet = std::vector<Demand>;  // duplicates allowed

// Lines "s t [count]"; '#' starts a comment. Node ids are checked against g.
DemandSet parse_demands(std::string_view text, const WeightedPlanarGraph& g);
std::string format_demands(const DemandSet& a);
// Uniform over ordered pairs with s != t.
DemandSet random_demands(const WeightedPlanarGraph& g, std::size_t count, std::uint64_t seed);

// Per-edge demand counts, indexed by edge id. A demand counts once on an edge
// even if its path uses that edge twice.
struct LoadMap {
  std::vector<std::int64_t> load;
};

// paths[k] serves a[k]; throws std::invalid_argument on endpoint mismatch.
LoadMap edge_loads(const WeightedPlanarGraph& g, std::span<const Path> paths, const DemandSet& a);

struct CostReport {
  double total = 0.0;
  std::optional<Rational> exact_total;
  std::vector<double> per_edge;
};

CostReport cost_of_loads(const WeightedPlanarGraph& g, const LoadMap& loads, const FusionFunction& f);
CostReport total_cost(const WeightedPlanarGraph& g, std::span<const Path> paths, const DemandSet& a,
                      const FusionFunction& f);

// Fixed paths for each demand, looked up through find_path.
std::vector<RoutedPath> route_demands(const CoverHierarchy& h, const AuxiliaryPathSet& q, const DemandSet& a);
std::vector<Path> plain_paths(std::span<const RoutedPath> routed);

struct LevelCosts {
  std::vector<double> src;  // index i: cost of all level-i source subpaths
  std::vector<double> dst;
  std::optional<std::vector<Rational>> exact_src;
  std::optional<std::vector<Rational>> exact_dst;
  CostReport total;
  double decomposed = 0.0;  // sum of src and dst over all levels
  // C(A) <= sum of the level costs; exact when f has an exact form,
  // otherwise with absolute tolerance 1e-9.
  bool decomposition_holds = false;
};

LevelCosts level_costs(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
                       const FusionFunction& f);

// For level i: demands whose common level exceeds i, grouped by the level-i
// cluster chosen for their source (keyed by cluster index in level(i)).
std::map<std::size_t, std::int64_t> extract_XA(const CoverHierarchy& h, std::span<const RoutedPath> routed,
                                               const DemandSet& a, int i);

// Most distinct next-level leaders reached by the demands of one level-i
// cluster.
std::size_t leader_fan_out(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a, int i);

// Sum over X in Z_i of f(|X(A)|) * beta * sigma * gamma_{i+1}; 0 <= i < kappa.
double bound_Q(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
               const FusionFunction& f, int i);

struct RBound {
  double r = 0.0;
  std::map<int, double> by_color;  // R(i, k)
  double over_chi = 0.0;           // the certified lower bound on C*
};

// Sum over X in Z_i of f(|X(A)|) * gamma_i / 2; only for 2 <= i <= kappa-1,
// throws std::out_of_range otherwise.
RBound bound_R(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
               const FusionFunction& f, int i);

// The unscaled variant for i in {0, 1}: sum over X of f(|X(A)|).
double bound_small_levels(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
                          const FusionFunction& f, int i);

// 16 kappa beta sigma^2 chi.
double ratio_bound(const HierarchyParams& p);

}  // namespace oblikit
