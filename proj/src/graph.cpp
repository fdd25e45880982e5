#include "oblikit/graph.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <queue>
#include <sstream>
#include <utility>

namespace oblikit {

GraphError::GraphError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }

bool is_connected(NodeId n, std::span<const std::size_t> offsets, std::span<const Neighbor> adj) {
  if (n == 0) return false;
  std::vector<std::uint8_t> seen(idx(n), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  NodeId visited = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t k = offsets[idx(v)]; k < offsets[idx(v) + 1]; ++k) {
      NodeId w = adj[k].node;
      if (!seen[idx(w)]) {
        seen[idx(w)] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

using QueueEntry = std::pair<Weight, NodeId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

// Core Dijkstra over the nodes accepted by `member`.
template <typename Member>
void run_dijkstra(const WeightedPlanarGraph& g, std::span<const NodeId> sources, Weight limit,
                  const Member& member, std::vector<Weight>& dist, std::vector<NodeId>* pred) {
  dist.assign(idx(g.node_count()), kUnreachable);
  if (pred) pred->assign(idx(g.node_count()), -1);
  MinQueue queue;
  for (NodeId s : sources) {
    if (!member(s) || dist[idx(s)] == 0) continue;
    dist[idx(s)] = 0;
    queue.emplace(0, s);
  }
  std::vector<std::uint8_t> settled(idx(g.node_count()), 0);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (settled[idx(v)]) continue;
    settled[idx(v)] = 1;
    for (const Neighbor& nb : g.neighbors(v)) {
      if (!member(nb.node) || settled[idx(nb.node)]) continue;
      Weight nd = d + nb.weight;
      if (nd > limit) continue;
      Weight& cur = dist[idx(nb.node)];
      if (nd < cur) {
        cur = nd;
        if (pred) (*pred)[idx(nb.node)] = v;
        queue.emplace(nd, nb.node);
      } else if (nd == cur && pred && v < (*pred)[idx(nb.node)]) {
        (*pred)[idx(nb.node)] = v;
      }
    }
  }
}

struct WholeGraph {
  bool operator()(NodeId) const { return true; }
};

struct InRegion {
  const Region* region;
  bool operator()(NodeId v) const { return region->contains(v); }
};

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <typename Member>
std::vector<NodeId> neighborhood(const WeightedPlanarGraph& g, std::span<const NodeId> S, Weight k,
                                 const Member& member) {
  std::vector<Weight> d;
  run_dijkstra(g, S, k, member, d, nullptr);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (d[idx(v)] != kUnreachable) out.push_back(v);
  }
  return out;
}

}  // namespace

WeightedPlanarGraph::WeightedPlanarGraph(NodeId node_count, std::vector<Edge> edges,
                                         std::vector<NodeId> outer_face)
    : node_count_(node_count), edges_(std::move(edges)), outer_face_(std::move(outer_face)) {
  if (node_count_ < 1) throw GraphError("graph needs at least one node");
  for (Edge& e : edges_) {
    if (!contains(e.u) || !contains(e.v)) {
      throw GraphError("edge endpoint out of range: " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
    if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u));
    if (e.weight < 1) throw GraphError("edge weight must be >= 1");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  if (node_count_ >= 3 && edges_.size() > 3 * static_cast<std::size_t>(node_count_) - 6) {
    throw GraphError("edge count exceeds planar bound 3n-6");
  }
  if (outer_face_.empty()) throw GraphError("outer face is empty");
  outer_mask_.assign(idx(node_count_), 0);
  for (NodeId v : outer_face_) {
    if (!contains(v)) throw GraphError("unknown outer-face node " + std::to_string(v));
    outer_mask_[idx(v)] = 1;
  }

  std::vector<std::size_t> degree(idx(node_count_), 0);
  for (const Edge& e : edges_) {
    ++degree[idx(e.u)];
    ++degree[idx(e.v)];
  }
  offsets_.assign(idx(node_count_) + 1, 0);
  for (std::size_t v = 0; v < degree.size(); ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    adjacency_[fill[idx(e.u)]++] = {e.v, e.weight, id};
    adjacency_[fill[idx(e.v)]++] = {e.u, e.weight, id};
  }
  for (std::size_t v = 0; v < degree.size(); ++v) {
    auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    if (std::adjacent_find(first, last, [](const Neighbor& a, const Neighbor& b) {
          return a.node == b.node;
        }) != last) {
      throw GraphError("duplicate edge at node " + std::to_string(v));
    }
  }
  if (!is_connected(node_count_, offsets_, adjacency_)) throw GraphError("graph is disconnected");
}

std::span<const Neighbor> WeightedPlanarGraph::neighbors(NodeId v) const {
  std::size_t i = idx(v);
  return std::span<const Neighbor>(adjacency_).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_[i]);
}

std::optional<std::size_t> WeightedPlanarGraph::edge_between(NodeId a, NodeId b) const {
  if (!contains(a) || !contains(b)) return std::nullopt;
  auto nbs = neighbors(a);
  auto it = std::lower_bound(nbs.begin(), nbs.end(), b,
                             [](const Neighbor& n, NodeId x) { return n.node < x; });
  if (it == nbs.end() || it->node != b) return std::nullopt;
  return it->edge;
}

std::uint64_t WeightedPlanarGraph::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : format_graph(*this)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

Path make_path(const WeightedPlanarGraph& g, std::vector<NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("path must be non-empty");
  Path p;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!g.contains(nodes[i])) throw std::invalid_argument("path node out of range");
    if (i == 0) continue;
    auto e = g.edge_between(nodes[i - 1], nodes[i]);
    if (!e) {
      throw std::invalid_argument("nodes " + std::to_string(nodes[i - 1]) + " and " +
                                  std::to_string(nodes[i]) + " are not adjacent");
    }
    p.length += g.edge(*e).weight;
  }
  p.nodes = std::move(nodes);
  return p;
}

std::vector<std::size_t> path_edges(const WeightedPlanarGraph& g, std::span<const NodeId> nodes) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    auto e = g.edge_between(nodes[i - 1], nodes[i]);
    if (!e) throw std::invalid_argument("path uses a non-edge");
    out.push_back(*e);
  }
  return out;
}

void append_path(Path& head, const Path& tail) {
  if (tail.nodes.empty()) return;
  auto first = tail.nodes.begin();
  if (!head.nodes.empty() && head.nodes.back() == *first) ++first;
  head.nodes.insert(head.nodes.end(), first, tail.nodes.end());
  head.length += tail.length;
}

Path reversed(const Path& p) {
  Path r = p;
  std::reverse(r.nodes.begin(), r.nodes.end());
  return r;
}

namespace {

// Reads the next non-blank, non-comment line; strips '#' comments.
bool next_line(std::istringstream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view s, std::size_t line_no) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    if (pos >= s.size()) break;
    T value{};
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), value);
    if (ec != std::errc() ||
        (ptr != s.data() + s.size() && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
      throw GraphError("expected integer in '" + std::string(s) + "'", line_no);
    }
    out.push_back(value);
    pos = static_cast<std::size_t>(ptr - s.data());
  }
  return out;
}

}  // namespace

WeightedPlanarGraph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  if (!next_line(in, line, line_no)) throw GraphError("empty graph file");
  auto header = parse_numbers<std::int64_t>(line, line_no);
  if (header.size() != 2 || header[0] < 1 || header[1] < 0) {
    throw GraphError("header must be 'n m'", line_no);
  }
  const auto n = static_cast<NodeId>(header[0]);
  const auto m = static_cast<std::size_t>(header[1]);
  if (n >= 3 && m > 3 * static_cast<std::size_t>(n) - 6) {
    throw GraphError("edge count exceeds planar bound 3n-6", line_no);
  }

  std::vector<Edge> edges;
  edges.reserve(m);
  std::vector<std::pair<std::int64_t, std::int64_t>> seen;
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_line(in, line, line_no)) throw GraphError("missing edge lines", line_no);
    auto f = parse_numbers<std::int64_t>(line, line_no);
    if (f.size() != 3) throw GraphError("edge line must be 'u v w'", line_no);
    if (f[0] < 0 || f[0] >= n || f[1] < 0 || f[1] >= n) throw GraphError("node id out of range", line_no);
    if (f[0] == f[1]) throw GraphError("self-loop", line_no);
    if (f[2] < 1) throw GraphError("weight must be >= 1", line_no);
    seen.emplace_back(std::min(f[0], f[1]), std::max(f[0], f[1]));
    edges.push_back({static_cast<NodeId>(f[0]), static_cast<NodeId>(f[1]), f[2]});
  }
  {
    auto sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw GraphError("duplicate edge");
    }
  }

  if (!next_line(in, line, line_no)) throw GraphError("missing 'outer:' line", line_no);
  auto colon = line.find(':');
  std::string_view tag = std::string_view(line).substr(0, colon);
  while (!tag.empty() && (tag.front() == ' ' || tag.front() == '\t')) tag.remove_prefix(1);
  if (colon == std::string::npos || tag != "outer") throw GraphError("expected 'outer:' line", line_no);
  auto outer_raw = parse_numbers<std::int64_t>(std::string_view(line).substr(colon + 1), line_no);
  std::vector<NodeId> outer;
  for (auto v : outer_raw) {
    if (v < 0 || v >= n) throw GraphError("unknown outer-face node " + std::to_string(v), line_no);
    outer.push_back(static_cast<NodeId>(v));
  }
  if (outer.empty()) throw GraphError("outer face is empty", line_no);
  if (next_line(in, line, line_no)) throw GraphError("trailing content", line_no);

  try {
    return WeightedPlanarGraph(n, std::move(edges), std::move(outer));
  } catch (const GraphError& e) {
    throw GraphError(e.what(), line_no);
  }
}

std::string format_graph(const WeightedPlanarGraph& g) {
  std::ostringstream out;
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
  out << "outer:";
  for (NodeId v : g.outer_face()) out << ' ' << v;
  out << '\n';
  return out.str();
}

Region::Region(const WeightedPlanarGraph& g) : graph_(&g) {
  nodes_.resize(idx(g.node_count()));
  for (NodeId v = 0; v < g.node_count(); ++v) nodes_[idx(v)] = v;
  external_ = sorted_unique({g.outer_face().begin(), g.outer_face().end()});
  mask_.assign(idx(g.node_count()), 1);
  for (NodeId v : external_) mask_[idx(v)] = 2;
}

Region::Region(const WeightedPlanarGraph& g, std::vector<NodeId> nodes, std::vector<NodeId> external)
    : graph_(&g), nodes_(sorted_unique(std::move(nodes))), external_(sorted_unique(std::move(external))) {
  mask_.assign(idx(g.node_count()), 0);
  for (NodeId v : nodes_) {
    if (!g.contains(v)) throw std::invalid_argument("region node out of range");
    mask_[idx(v)] = 1;
  }
  for (NodeId v : external_) {
    if (!g.contains(v) || !mask_[idx(v)]) throw std::invalid_argument("external node outside region");
    mask_[idx(v)] = 2;
  }
}

Path ShortestPathTree::path_to(NodeId target) const {
  if (!reaches(target)) throw std::invalid_argument("target unreachable from source");
  Path p;
  p.length = dist[idx(target)];
  for (NodeId v = target; v != -1; v = pred[idx(v)]) p.nodes.push_back(v);
  std::reverse(p.nodes.begin(), p.nodes.end());
  return p;
}

ShortestPathTree shortest_path_tree(const WeightedPlanarGraph& g, NodeId source) {
  if (!g.contains(source)) throw std::invalid_argument("source out of range");
  ShortestPathTree t;
  t.source = source;
  NodeId s[] = {source};
  run_dijkstra(g, s, kUnreachable, WholeGraph{}, t.dist, &t.pred);
  return t;
}

ShortestPathTree shortest_path_tree(const Region& r, NodeId source) {
  if (!r.contains(source)) throw std::invalid_argument("source outside region");
  ShortestPathTree t;
  t.source = source;
  NodeId s[] = {source};
  run_dijkstra(r.graph(), s, kUnreachable, InRegion{&r}, t.dist, &t.pred);
  return t;
}

Path shortest_path(const WeightedPlanarGraph& g, NodeId u, NodeId v) {
  if (!g.contains(v)) throw std::invalid_argument("target out of range");
  return shortest_path_tree(g, u).path_to(v);
}

Path shortest_path(const Region& r, NodeId u, NodeId v) { return shortest_path_tree(r, u).path_to(v); }

Weight dist(const WeightedPlanarGraph& g, NodeId u, NodeId v) {
  if (!g.contains(u) || !g.contains(v)) throw std::invalid_argument("node out of range");
  if (u == v) return 0;
  std::vector<Weight> d;
  NodeId s[] = {u};
  run_dijkstra(g, s, kUnreachable, WholeGraph{}, d, nullptr);
  return d[idx(v)];
}

std::vector<Weight> multi_source_distances(const Region& r, std::span<const NodeId> sources, Weight limit) {
  std::vector<Weight> d;
  run_dijkstra(r.graph(), sources, limit, InRegion{&r}, d, nullptr);
  return d;
}

std::vector<NodeId> k_neighborhood(const WeightedPlanarGraph& g, std::span<const NodeId> S, Weight k) {
  return neighborhood(g, S, k, WholeGraph{});
}

std::vector<NodeId> k_neighborhood(const Region& r, std::span<const NodeId> S, Weight k) {
  return neighborhood(r.graph(), S, k, InRegion{&r});
}

Weight node_depth(const WeightedPlanarGraph& g, NodeId v) {
  if (!g.contains(v)) throw std::invalid_argument("node out of range");
  if (g.is_outer(v)) return 0;
  auto t = shortest_path_tree(g, v);
  Weight best = kUnreachable;
  for (NodeId x : g.outer_face()) best = std::min(best, t.dist[idx(x)]);
  return best;
}

std::vector<Weight> node_depths(const Region& r) { return multi_source_distances(r, r.external()); }

Weight depth(const Region& r) {
  auto d = node_depths(r);
  Weight best = 0;
  for (NodeId v : r.nodes()) best = std::max(best, d[idx(v)]);
  return best;
}

Weight depth(const WeightedPlanarGraph& g) { return depth(Region(g)); }

Weight diameter(const WeightedPlanarGraph& g) {
  Weight best = 0;
  std::vector<Weight> d;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    NodeId src[] = {s};
    run_dijkstra(g, src, kUnreachable, WholeGraph{}, d, nullptr);
    best = std::max(best, *std::max_element(d.begin(), d.end()));
  }
  return best;
}

std::vector<Region> connected_components(const Region& r) {
  const auto& g = r.graph();
  std::vector<std::uint8_t> seen(idx(g.node_count()), 0);
  std::vector<Region> out;
  for (NodeId start : r.nodes()) {
    if (seen[idx(start)]) continue;
    std::vector<NodeId> members{start};
    std::vector<NodeId> external;
    seen[idx(start)] = 1;
    for (std::size_t k = 0; k < members.size(); ++k) {
      NodeId v = members[k];
      if (r.is_external(v)) external.push_back(v);
      for (const Neighbor& nb : g.neighbors(v)) {
        if (r.contains(nb.node) && !seen[idx(nb.node)]) {
          seen[idx(nb.node)] = 1;
          members.push_back(nb.node);
        }
      }
    }
    out.emplace_back(g, std::move(members), std::move(external));
  }
  return out;
}

std::vector<Region> remove_closed_neighborhood(const Region& r, std::span<const NodeId> path_nodes, Weight k) {
  const auto& g = r.graph();
  auto removed = multi_source_distances(r, path_nodes, k);
  std::vector<NodeId> rest;
  std::vector<NodeId> external;
  for (NodeId v : r.nodes()) {
    if (removed[idx(v)] != kUnreachable) continue;
    rest.push_back(v);
    bool exposed = r.is_external(v);
    for (const Neighbor& nb : g.neighbors(v)) {
      if (exposed) break;
      exposed = r.contains(nb.node) && removed[idx(nb.node)] != kUnreachable;
    }
    if (exposed) external.push_back(v);
  }
  if (rest.empty()) return {};
  return connected_components(Region(g, std::move(rest), std::move(external)));
}

std::vector<Region> remove_closed_neighborhood(const WeightedPlanarGraph& g, const Path& p, Weight k) {
  return remove_closed_neighborhood(Region(g), p.nodes, k);
}

}  // namespace oblikit
