#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oblikit {

using NodeId = std::int32_t;
using Weight = std::int64_t;

inline constexpr Weight kUnreachable = std::numeric_limits<Weight>::max();

// Thrown for malformed graph input. line() is 1-based, 0 when not tied to a line.
class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Edge {
  NodeId u;  // u < v
  NodeId v;
  Weight weight;
};

struct Neighbor {
  NodeId node;
  Weight weight;
  std::size_t edge;
};

// Connected, positively weighted graph with a declared external face.
// Immutable after construction; neighbor lists are sorted by node id.
class WeightedPlanarGraph {
 public:
  WeightedPlanarGraph(NodeId node_count, std::vector<Edge> edges, std::vector<NodeId> outer_face);

  NodeId node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_.at(id); }
  std::span<const Neighbor> neighbors(NodeId v) const;
  std::span<const NodeId> outer_face() const noexcept { return outer_face_; }
  bool is_outer(NodeId v) const { return outer_mask_.at(static_cast<std::size_t>(v)) != 0; }
  bool contains(NodeId v) const noexcept { return v >= 0 && v < node_count_; }

  std::optional<std::size_t> edge_between(NodeId a, NodeId b) const;

  // FNV-1a over the canonical text form; used to key cached oracle results.
  std::uint64_t fingerprint() const;

 private:
  NodeId node_count_;
  std::vector<Edge> edges_;
  std::vector<NodeId> outer_face_;
  std::vector<std::uint8_t> outer_mask_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

// Node sequence v0..vk where consecutive nodes are adjacent.
struct Path {
  std::vector<NodeId> nodes;
  Weight length = 0;

  NodeId front() const { return nodes.front(); }
  NodeId back() const { return nodes.back(); }
  std::size_t size() const noexcept { return nodes.size(); }
  bool operator==(const Path&) const = default;
};

// Builds a Path after checking adjacency; throws std::invalid_argument otherwise.
Path make_path(const WeightedPlanarGraph& g, std::vector<NodeId> nodes);

// Edge ids traversed by consecutive node pairs, in order (repeats kept).
std::vector<std::size_t> path_edges(const WeightedPlanarGraph& g, std::span<const NodeId> nodes);

// Appends `tail` to `head`, dropping tail's first node when it repeats head's last.
void append_path(Path& head, const Path& tail);

Path reversed(const Path& p);

WeightedPlanarGraph parse_graph(std::string_view text);
std::string format_graph(const WeightedPlanarGraph& g);

// Induced subgraph of a host graph together with its external node set.
class Region {
 public:
  explicit Region(const WeightedPlanarGraph& g);
  Region(const WeightedPlanarGraph& g, std::vector<NodeId> nodes, std::vector<NodeId> external);

  const WeightedPlanarGraph& graph() const noexcept { return *graph_; }
  bool contains(NodeId v) const { return mask_[static_cast<std::size_t>(v)] != 0; }
  bool is_external(NodeId v) const { return mask_[static_cast<std::size_t>(v)] == 2; }
  std::span<const NodeId> nodes() const noexcept { return nodes_; }
  std::span<const NodeId> external() const noexcept { return external_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

 private:
  const WeightedPlanarGraph* graph_;
  std::vector<NodeId> nodes_;
  std::vector<NodeId> external_;
  std::vector<std::uint8_t> mask_;  // 0 absent, 1 member, 2 external member
};

// Single-source shortest paths. Nodes are settled in (distance, id) order and
// among equal-length alternatives the smallest predecessor id wins, so the
// extracted paths are a pure function of (graph, source, target).
struct ShortestPathTree {
  NodeId source = 0;
  std::vector<Weight> dist;
  std::vector<NodeId> pred;

  bool reaches(NodeId v) const { return dist[static_cast<std::size_t>(v)] != kUnreachable; }
  Path path_to(NodeId target) const;
};

ShortestPathTree shortest_path_tree(const WeightedPlanarGraph& g, NodeId source);
ShortestPathTree shortest_path_tree(const Region& r, NodeId source);

Path shortest_path(const WeightedPlanarGraph& g, NodeId u, NodeId v);
Path shortest_path(const Region& r, NodeId u, NodeId v);

Weight dist(const WeightedPlanarGraph& g, NodeId u, NodeId v);

// Distances from the nearest of `sources`, explored only up to `limit`
// (inclusive). Unexplored or unreachable entries hold kUnreachable.
std::vector<Weight> multi_source_distances(const Region& r, std::span<const NodeId> sources,
                                           Weight limit = kUnreachable);

// Sorted node ids within distance k of some node of S.
std::vector<NodeId> k_neighborhood(const WeightedPlanarGraph& g, std::span<const NodeId> S, Weight k);
std::vector<NodeId> k_neighborhood(const Region& r, std::span<const NodeId> S, Weight k);

Weight node_depth(const WeightedPlanarGraph& g, NodeId v);
Weight depth(const WeightedPlanarGraph& g);
// Distance of every region node to the region's nearest external node.
std::vector<Weight> node_depths(const Region& r);
Weight depth(const Region& r);

Weight diameter(const WeightedPlanarGraph& g);

// Connected components of the region, ordered by lowest member id. Each
// inherits the region's external markings.
std::vector<Region> connected_components(const Region& r);

// Deletes N_k(nodes(p)) from the region and returns what is left, one Region
// per component. A surviving node is external if it was external before or
// had a deleted neighbor.
std::vector<Region> remove_closed_neighborhood(const Region& r, std::span<const NodeId> path_nodes,
                                               Weight k);
std::vector<Region> remove_closed_neighborhood(const WeightedPlanarGraph& g, const Path& p, Weight k);

}  // namespace oblikit
