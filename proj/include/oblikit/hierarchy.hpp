#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblikit/cover.hpp"
#include "oblikit/graph.hpp"

namespace oblikit {

struct HierarchyParams {
  int kappa = 1;
  int beta = 18;
  int sigma = 24;
  int chi = 18;
  std::int64_t base = 96;  // gamma(i+1) = base * gamma(i)
  Weight diameter = 1;

  // Locality parameter of level i >= 1: base^(i-1).
  Weight gamma(int i) const;
};

struct ParamOverrides {
  std::optional<std::int64_t> base;
};

// kappa = 1 + ceil(log_base D), computed in integers.
HierarchyParams params_for_diameter(Weight diameter, const ParamOverrides& overrides = {});
HierarchyParams make_params(const WeightedPlanarGraph& g, const ParamOverrides& overrides = {});

// Which level a pair (u, v) meets at.
enum class LevelRule {
  TwiceDistance,  // smallest gamma_i >= 2 dist(u, v)
  HalfDistance,   // smallest gamma_i >= dist(u, v) / 2
};

struct HierarchyOptions {
  CoverOptions cover;
  LevelRule level_rule = LevelRule::TwiceDistance;
  bool validate_levels = true;
};

class HierarchyError : public std::runtime_error {
 public:
  HierarchyError(int level, const std::string& what);
  int level() const noexcept { return level_; }

 private:
  int level_;
};

NodeId elect_leader(const WeightedPlanarGraph& g, const Cluster& x);

// Levels Z_0..Z_kappa with elected leaders and, for every node and level, the
// cluster chosen to satisfy it. Shortest-path trees rooted at leaders are
// cached; the cache is guarded so concurrent readers are safe.
class CoverHierarchy {
 public:
  CoverHierarchy(const WeightedPlanarGraph& g, HierarchyParams params, HierarchyOptions options);
  CoverHierarchy(CoverHierarchy&&) noexcept;
  CoverHierarchy& operator=(CoverHierarchy&&) noexcept;
  ~CoverHierarchy();

  const WeightedPlanarGraph& graph() const noexcept { return *graph_; }
  const HierarchyParams& params() const noexcept { return params_; }
  const HierarchyOptions& options() const noexcept { return options_; }
  int kappa() const noexcept { return params_.kappa; }

  const Cover& level(int i) const { return levels_.at(static_cast<std::size_t>(i)); }
  // Validation reports for levels 1..kappa-1 (empty entries when skipped).
  const std::vector<std::optional<CoverReport>>& reports() const noexcept { return reports_; }

  // Index into level(i).clusters of the cluster that gamma_i-satisfies v:
  // lowest leader id among satisfying clusters, then lowest index.
  std::size_t satisfying_cluster(int i, NodeId v) const;
  // l_i(v); l_0(v) = v.
  NodeId leader(int i, NodeId v) const;
  NodeId global_leader() const { return leader(kappa(), 0); }

  std::shared_ptr<const ShortestPathTree> tree_from(NodeId source) const;

 private:
  struct TreeCache;

  const WeightedPlanarGraph* graph_;
  HierarchyParams params_;
  HierarchyOptions options_;
  std::vector<Cover> levels_;
  std::vector<std::optional<CoverReport>> reports_;
  std::vector<std::vector<std::size_t>> chosen_;  // [level][node]
  std::unique_ptr<TreeCache> cache_;
};

CoverHierarchy build_hierarchy(const WeightedPlanarGraph& g, const HierarchyParams& params,
                               const HierarchyOptions& options = {});

std::string summarize(const CoverHierarchy& h);

// q(v): v -> l_1(v) -> ... -> l_kappa. marks[i] is the position of l_i(v) in
// path.nodes, so segment i runs from marks[i] to marks[i+1].
struct AuxiliaryPath {
  NodeId owner = -1;
  Path path;
  std::vector<std::size_t> marks;
  std::vector<Weight> offsets;  // walk length from v to each position

  Path segment(int i) const;  // q_i(v)
  Path prefix(int i) const;   // q-bar_i(v), from v to l_i(v)
};

using AuxiliaryPathSet = std::vector<AuxiliaryPath>;  // indexed by owner

AuxiliaryPathSet auxiliary_paths(const CoverHierarchy& h);

// A fixed path p(u, v) with its level decomposition. The source segment is
// nodes[source_marks[0] .. source_marks[level]] and its level-j subpath spans
// source_marks[j] .. source_marks[j+1]; the destination side mirrors it with
// dest_marks[j+1] .. dest_marks[j] (dest_marks[0] is the last node).
struct RoutedPath {
  NodeId source = -1;
  NodeId target = -1;
  int level = 0;
  NodeId leader = -1;
  std::size_t cluster = 0;  // index of the common cluster in level(level)
  bool capped = false;      // no level met the rule; fell back to kappa
  Path path;
  std::vector<std::size_t> source_marks;
  std::vector<std::size_t> dest_marks;

  std::span<const NodeId> source_subpath(int j) const;
  std::span<const NodeId> dest_subpath(int j) const;
};

// Level for a pair at distance d under the hierarchy's rule.
int meeting_level(const CoverHierarchy& h, Weight d, bool* capped = nullptr);

RoutedPath find_path(const CoverHierarchy& h, const AuxiliaryPathSet& q, NodeId u, NodeId v);

class PathTable {
 public:
  PathTable(NodeId n, std::vector<RoutedPath> entries);
  NodeId node_count() const noexcept { return n_; }
  const RoutedPath& at(NodeId u, NodeId v) const;

 private:
  NodeId n_;
  std::vector<RoutedPath> entries_;
};

inline constexpr std::size_t kDefaultAllPairsCap = 2000;

// All ordered pairs; throws std::length_error when n exceeds `max_nodes`.
PathTable find_all_paths(const CoverHierarchy& h, const AuxiliaryPathSet& q,
                         std::size_t max_nodes = kDefaultAllPairsCap);

// "path <u> <v> level <i> leader <l> nodes v0 v1 ..."
std::string format_path_line(const RoutedPath& p);

}  // namespace oblikit
