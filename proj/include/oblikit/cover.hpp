#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oblikit/graph.hpp"

namespace oblikit {

// Where a cluster came from: planar-cover zone, level in the depth-cover
// recursion tree, the clustering path it grew around, and the subpath index
// along that path.
struct Provenance {
  int zone = 0;
  int tree_level = 0;
  int path_id = 0;
  int subpath = 0;
};

struct Cluster {
  std::vector<NodeId> members;  // sorted
  std::optional<NodeId> leader;
  int color = 1;
  Provenance provenance;

  bool contains(NodeId v) const;
};

struct Cover {
  Weight gamma = 1;
  std::vector<Cluster> clusters;
};

// How depth_cover picks the path for each child component after removal.
enum class ChildPathRule {
  // Lowest external id to the external node farthest from it.
  LowestFarthest,
  // Farthest pair (double sweep) among the nodes that were external in the
  // parent and border the removed region; falls back to LowestFarthest.
  BoundaryCorners,
  // Among pairs of nodes bordering the removed region, the shortest path that
  // leaves the fewest nodes already clustered by the parent path alive after
  // its own removal step. Ties: most nodes removed, then lowest (a, b).
  MinSurvivors,
};

struct CoverOptions {
  ChildPathRule child_rule = ChildPathRule::MinSurvivors;
};

struct ClusterCenter {
  NodeId center = -1;
  Weight radius = kUnreachable;  // kUnreachable when G(X) is disconnected
};

// Minimum eccentricity over members, measured inside the induced subgraph
// G(X). Ties go to the lowest node id.
ClusterCenter cluster_center(const WeightedPlanarGraph& g, std::span<const NodeId> members);
Weight cluster_radius(const WeightedPlanarGraph& g, const Cluster& x);
bool is_connected_cluster(const WeightedPlanarGraph& g, std::span<const NodeId> members);

// Splits p into consecutive subpaths of weighted length at most 4*gamma and
// returns the 4*gamma-neighborhood (inside the region) of each, colored
// (index mod 3) + 1.
std::vector<Cluster> shortest_path_cluster(const Region& r, const Path& p, Weight gamma);
std::vector<Cluster> shortest_path_cluster(const WeightedPlanarGraph& g, const Path& p, Weight gamma);

// Requires depth(r) <= gamma; throws std::domain_error otherwise. Colors use
// palette [1,3] on odd recursion levels and [4,6] on even ones.
Cover depth_cover(const Region& r, Weight gamma, const CoverOptions& opts = {});
Cover depth_cover(const WeightedPlanarGraph& g, Weight gamma, const CoverOptions& opts = {});

// Band/zone decomposition; each zone is covered by depth_cover(zone, 3*gamma-1)
// and zone j shifts its colors by 6*(j mod 3).
Cover planar_cover(const WeightedPlanarGraph& g, Weight gamma, const CoverOptions& opts = {});

// True iff some u in X and v in Y, each k-satisfied in its own cluster, have
// dist(u, v) <= k.
bool cluster_distance_leq(const WeightedPlanarGraph& g, const Cluster& x, const Cluster& y, Weight k);

struct ColoringViolation {
  std::size_t first = 0;  // cluster indices
  std::size_t second = 0;
  NodeId u = -1;  // satisfied in first
  NodeId v = -1;  // satisfied in second, dist(u, v) <= gamma
};

struct ColoringReport {
  bool valid = true;
  std::optional<ColoringViolation> violation;
  int colors_used = 0;
  int max_color = 0;
};

struct CoverReport {
  std::vector<NodeId> unsatisfied;
  std::vector<std::size_t> disconnected;  // cluster indices
  std::size_t degree = 0;
  Weight radius = 0;
  double stretch = 0.0;
  ColoringReport coloring;
  // Most distinct clustering paths whose clusters contain one node, counted
  // within a single zone.
  int max_paths_per_node = 0;

  bool satisfies(std::size_t max_degree, double max_stretch, int max_colors) const;
};

CoverReport validate_cover(const WeightedPlanarGraph& g, const Cover& z);
std::string describe(const CoverReport& report);

// One line per cluster: "cluster <id> color <c> leader <v> zone <z> members ...".
// An unassigned leader is written as -1.
std::string format_cover(const Cover& z);
Cover parse_cover(std::string_view text, Weight gamma);

}  // namespace oblikit
