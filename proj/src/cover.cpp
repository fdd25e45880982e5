#include "oblikit/cover.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace oblikit {

namespace {

std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }

bool sorted_contains(std::span<const NodeId> sorted, NodeId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

bool sorted_contains(std::span<const std::size_t> sorted, std::size_t v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Node of `candidates` farthest from `from` inside the region; lowest id on ties.
NodeId farthest_of(const ShortestPathTree& tree, std::span<const NodeId> candidates) {
  NodeId best = candidates.front();
  for (NodeId c : candidates) {
    if (tree.dist[idx(c)] != kUnreachable && tree.dist[idx(c)] > tree.dist[idx(best)]) best = c;
  }
  return best;
}

Path lowest_farthest_path(const Region& child) {
  NodeId a = child.external().front();
  auto tree = shortest_path_tree(child, a);
  return tree.path_to(farthest_of(tree, child.external()));
}

// Double sweep over `candidates`; the path runs from the lower id of the pair.
Path farthest_pair_path(const Region& child, std::span<const NodeId> candidates) {
  auto first = shortest_path_tree(child, candidates.front());
  NodeId b = farthest_of(first, candidates);
  auto second = shortest_path_tree(child, b);
  NodeId a = farthest_of(second, candidates);
  if (a < b) return shortest_path(child, a, b);
  return second.path_to(a);
}

// `parent_reach` holds distances from the parent path within the parent
// region, explored up to 4*gamma.
Path min_survivors_path(const Region& child, std::span<const NodeId> border,
                        const std::vector<Weight>& parent_reach, Weight gamma) {
  std::vector<NodeId> carried;
  for (NodeId v : child.nodes()) {
    if (parent_reach[idx(v)] != kUnreachable) carried.push_back(v);
  }
  Path best;
  std::size_t best_survivors = 0;
  std::size_t best_removed = 0;
  for (std::size_t i = 0; i < border.size(); ++i) {
    auto tree = shortest_path_tree(child, border[i]);
    for (std::size_t j = i; j < border.size(); ++j) {
      Path candidate = tree.path_to(border[j]);
      auto reach = multi_source_distances(child, candidate.nodes, 2 * gamma);
      std::size_t survivors = 0;
      for (NodeId v : carried) survivors += reach[idx(v)] == kUnreachable;
      std::size_t removed = 0;
      for (NodeId v : child.nodes()) removed += reach[idx(v)] != kUnreachable;
      if (best.nodes.empty() || survivors < best_survivors ||
          (survivors == best_survivors && removed > best_removed)) {
        best = std::move(candidate);
        best_survivors = survivors;
        best_removed = removed;
      }
    }
  }
  return best;
}

Path child_path(const Region& parent, const Region& child, ChildPathRule rule,
                const std::vector<Weight>& parent_reach, Weight gamma) {
  if (rule == ChildPathRule::LowestFarthest) return lowest_farthest_path(child);
  const auto& g = child.graph();
  std::vector<NodeId> corners;
  std::vector<NodeId> border;
  for (NodeId v : child.nodes()) {
    bool touches_removed = false;
    for (const Neighbor& nb : g.neighbors(v)) {
      if (parent.contains(nb.node) && !child.contains(nb.node)) {
        touches_removed = true;
        break;
      }
    }
    if (!touches_removed) continue;
    border.push_back(v);
    if (parent.is_external(v)) corners.push_back(v);
  }
  if (rule == ChildPathRule::MinSurvivors && !border.empty()) {
    return min_survivors_path(child, border, parent_reach, gamma);
  }
  if (corners.size() >= 2) return farthest_pair_path(child, corners);
  if (border.size() >= 2) return farthest_pair_path(child, border);
  return lowest_farthest_path(child);
}

// sat_of[v]: indices of clusters containing N_gamma(v).
std::vector<std::vector<std::size_t>> satisfying_sets(const WeightedPlanarGraph& g, const Cover& z,
                                                     const std::vector<std::vector<std::size_t>>& clusters_of) {
  std::vector<std::vector<std::size_t>> sat_of(clusters_of.size());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    NodeId s[] = {v};
    auto ball = k_neighborhood(g, s, z.gamma);
    for (std::size_t c : clusters_of[idx(v)]) {
      bool all_in = std::all_of(ball.begin(), ball.end(),
                                [&](NodeId w) { return sorted_contains(clusters_of[idx(w)], c); });
      if (all_in) sat_of[idx(v)].push_back(c);
    }
  }
  return sat_of;
}

std::vector<std::vector<std::size_t>> memberships(const WeightedPlanarGraph& g, const Cover& z) {
  std::vector<std::vector<std::size_t>> clusters_of(idx(g.node_count()));
  for (std::size_t c = 0; c < z.clusters.size(); ++c) {
    for (NodeId v : z.clusters[c].members) {
      if (!g.contains(v)) throw std::invalid_argument("cover references unknown node " + std::to_string(v));
      clusters_of[idx(v)].push_back(c);
    }
  }
  return clusters_of;
}

// The parity palettes are valid whenever every node is clustered on at most
// two consecutive recursion levels. Child path choices do not always achieve
// that, so remaining clashes are recolored greedily inside the cluster's own
// six-color zone palette.
void repair_coloring(const WeightedPlanarGraph& g, Cover& z) {
  const auto clusters_of = memberships(g, z);
  const auto sat_of = satisfying_sets(g, z, clusters_of);
  std::vector<std::set<std::size_t>> near(z.clusters.size());
  bool clash = false;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (sat_of[idx(u)].empty()) continue;
    NodeId s[] = {u};
    for (NodeId w : k_neighborhood(g, s, z.gamma)) {
      for (std::size_t a : sat_of[idx(u)]) {
        for (std::size_t b : sat_of[idx(w)]) {
          if (a == b) continue;
          near[a].insert(b);
          clash = clash || z.clusters[a].color == z.clusters[b].color;
        }
      }
    }
  }
  if (!clash) return;
  for (std::size_t c = 0; c < z.clusters.size(); ++c) {
    Cluster& x = z.clusters[c];
    auto same = [&](std::size_t o) { return z.clusters[o].color == x.color; };
    if (std::none_of(near[c].begin(), near[c].end(), same)) continue;
    const int lo = 6 * ((x.color - 1) / 6) + 1;
    for (int color = lo; color < lo + 6; ++color) {
      bool used = std::any_of(near[c].begin(), near[c].end(),
                              [&](std::size_t o) { return z.clusters[o].color == color; });
      if (!used) {
        x.color = color;
        break;
      }
    }
  }
}

}  // namespace

bool Cluster::contains(NodeId v) const { return sorted_contains(members, v); }

bool is_connected_cluster(const WeightedPlanarGraph& g, std::span<const NodeId> members) {
  if (members.empty()) return false;
  Region r(g, {members.begin(), members.end()}, {});
  NodeId s[] = {members.front()};
  auto d = multi_source_distances(r, s);
  return std::all_of(members.begin(), members.end(), [&](NodeId v) { return d[idx(v)] != kUnreachable; });
}

ClusterCenter cluster_center(const WeightedPlanarGraph& g, std::span<const NodeId> members) {
  ClusterCenter best;
  if (members.empty()) return best;
  Region r(g, {members.begin(), members.end()}, {});
  for (NodeId c : r.nodes()) {
    NodeId s[] = {c};
    // Searching past the current best radius cannot produce a new minimum.
    Weight limit = best.radius == kUnreachable ? kUnreachable : best.radius - 1;
    if (limit < 0) break;
    auto d = multi_source_distances(r, s, limit);
    Weight ecc = 0;
    for (NodeId v : r.nodes()) {
      ecc = std::max(ecc, d[idx(v)]);
      if (ecc == kUnreachable) break;
    }
    if (ecc < best.radius) best = {c, ecc};
  }
  if (best.center == -1) best.center = r.nodes().front();
  return best;
}

Weight cluster_radius(const WeightedPlanarGraph& g, const Cluster& x) {
  return cluster_center(g, x.members).radius;
}

std::vector<Cluster> shortest_path_cluster(const Region& r, const Path& p, Weight gamma) {
  if (p.nodes.empty()) throw std::invalid_argument("shortest_path_cluster: empty path");
  if (gamma < 1) throw std::invalid_argument("shortest_path_cluster: gamma must be >= 1");
  const auto& g = r.graph();
  const Weight span = 4 * gamma;
  std::vector<Cluster> out;
  std::size_t start = 0;
  while (start < p.nodes.size()) {
    std::size_t end = start;
    Weight run = 0;
    while (end + 1 < p.nodes.size()) {
      auto e = g.edge_between(p.nodes[end], p.nodes[end + 1]);
      if (!e) throw std::invalid_argument("shortest_path_cluster: path uses a non-edge");
      if (run + g.edge(*e).weight > span) break;
      run += g.edge(*e).weight;
      ++end;
    }
    std::span<const NodeId> sub(p.nodes.data() + start, end - start + 1);
    Cluster c;
    c.members = k_neighborhood(r, sub, span);
    const int i = static_cast<int>(out.size());
    c.color = i % 3 + 1;
    c.provenance.subpath = i;
    out.push_back(std::move(c));
    start = end + 1;
  }
  return out;
}

std::vector<Cluster> shortest_path_cluster(const WeightedPlanarGraph& g, const Path& p, Weight gamma) {
  return shortest_path_cluster(Region(g), p, gamma);
}

Cover depth_cover(const Region& r, Weight gamma, const CoverOptions& opts) {
  if (gamma < 1) throw std::invalid_argument("depth_cover: gamma must be >= 1");
  if (r.empty()) throw std::invalid_argument("depth_cover: empty region");
  if (Weight d = depth(r); d > gamma) {
    throw std::domain_error("depth_cover: depth " + (d == kUnreachable ? std::string("inf") : std::to_string(d)) +
                            " exceeds gamma " + std::to_string(gamma));
  }

  struct Task {
    Region region;
    Path path;
    int level;
  };
  std::deque<Task> pending;
  for (Region& comp : connected_components(r)) {
    NodeId root = comp.external().front();
    pending.push_back({std::move(comp), Path{{root}, 0}, 0});
  }

  Cover cover;
  cover.gamma = gamma;
  int path_id = 0;
  while (!pending.empty()) {
    Task task = std::move(pending.front());
    pending.pop_front();
    for (Cluster& c : shortest_path_cluster(task.region, task.path, gamma)) {
      if (task.level % 2 == 0) c.color += 3;
      c.provenance.tree_level = task.level;
      c.provenance.path_id = path_id;
      cover.clusters.push_back(std::move(c));
    }
    ++path_id;
    std::vector<Weight> reach;
    if (opts.child_rule == ChildPathRule::MinSurvivors) {
      reach = multi_source_distances(task.region, task.path.nodes, 4 * gamma);
    }
    for (Region& child : remove_closed_neighborhood(task.region, task.path.nodes, 2 * gamma)) {
      Path next = child_path(task.region, child, opts.child_rule, reach, gamma);
      pending.push_back({std::move(child), std::move(next), task.level + 1});
    }
  }
  return cover;
}

Cover depth_cover(const WeightedPlanarGraph& g, Weight gamma, const CoverOptions& opts) {
  return depth_cover(Region(g), gamma, opts);
}

Cover planar_cover(const WeightedPlanarGraph& g, Weight gamma, const CoverOptions& opts) {
  if (gamma < 1) throw std::invalid_argument("planar_cover: gamma must be >= 1");
  const Region whole(g);
  const auto depths = node_depths(whole);
  const Weight max_depth = *std::max_element(depths.begin(), depths.end());
  if (max_depth <= gamma) {
    Cover cover = depth_cover(whole, gamma, opts);
    repair_coloring(g, cover);
    return cover;
  }

  const Weight bands = max_depth / gamma + 1;
  std::vector<Weight> band(idx(g.node_count()));
  std::vector<std::size_t> band_size(static_cast<std::size_t>(bands), 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    band[idx(v)] = depths[idx(v)] / gamma;
    ++band_size[static_cast<std::size_t>(band[idx(v)])];
  }

  Cover cover;
  cover.gamma = gamma;
  for (Weight j = 0; j < bands; ++j) {
    if (band_size[static_cast<std::size_t>(j)] == 0) continue;
    auto in_zone = [&](NodeId v) { return band[idx(v)] >= j - 1 && band[idx(v)] <= j + 1; };
    std::vector<NodeId> nodes;
    std::vector<NodeId> external;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (!in_zone(v)) continue;
      nodes.push_back(v);
      bool ext = g.is_outer(v);
      for (const Neighbor& nb : g.neighbors(v)) {
        if (ext) break;
        ext = !in_zone(nb.node);
      }
      if (ext) external.push_back(v);
    }
    Region zone(g, std::move(nodes), std::move(external));
    Cover part;
    try {
      part = depth_cover(zone, 3 * gamma - 1, opts);
    } catch (const std::domain_error& e) {
      throw std::logic_error("planar_cover: zone " + std::to_string(j) + " violates depth bound: " + e.what());
    }
    for (Cluster& c : part.clusters) {
      c.color += 6 * static_cast<int>(j % 3);
      c.provenance.zone = static_cast<int>(j);
      cover.clusters.push_back(std::move(c));
    }
  }
  repair_coloring(g, cover);
  return cover;
}

bool cluster_distance_leq(const WeightedPlanarGraph& g, const Cluster& x, const Cluster& y, Weight k) {
  auto satisfied = [&](const Cluster& c) {
    std::vector<NodeId> out;
    for (NodeId u : c.members) {
      NodeId s[] = {u};
      auto ball = k_neighborhood(g, s, k);
      if (std::all_of(ball.begin(), ball.end(), [&](NodeId w) { return c.contains(w); })) out.push_back(u);
    }
    return out;
  };
  auto sx = satisfied(x);
  auto sy = satisfied(y);
  if (sx.empty() || sy.empty()) return false;
  auto near = k_neighborhood(g, sx, k);
  return std::any_of(sy.begin(), sy.end(), [&](NodeId v) { return sorted_contains(near, v); });
}

bool CoverReport::satisfies(std::size_t max_degree, double max_stretch, int max_colors) const {
  return unsatisfied.empty() && disconnected.empty() && degree <= max_degree && stretch <= max_stretch &&
         coloring.valid && coloring.colors_used <= max_colors && coloring.max_color <= max_colors;
}

CoverReport validate_cover(const WeightedPlanarGraph& g, const Cover& z) {
  CoverReport report;
  const auto clusters_of = memberships(g, z);
  for (const auto& list : clusters_of) report.degree = std::max(report.degree, list.size());

  for (std::size_t c = 0; c < z.clusters.size(); ++c) {
    Weight rad = cluster_radius(g, z.clusters[c]);
    if (rad == kUnreachable) {
      report.disconnected.push_back(c);
      continue;
    }
    report.radius = std::max(report.radius, rad);
  }
  report.stretch = z.gamma > 0 ? static_cast<double>(report.radius) / static_cast<double>(z.gamma) : 0.0;

  const auto sat_of = satisfying_sets(g, z, clusters_of);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (sat_of[idx(v)].empty()) report.unsatisfied.push_back(v);
  }

  std::set<int> colors;
  for (const Cluster& c : z.clusters) {
    colors.insert(c.color);
    report.coloring.max_color = std::max(report.coloring.max_color, c.color);
  }
  report.coloring.colors_used = static_cast<int>(colors.size());
  for (NodeId u = 0; u < g.node_count() && report.coloring.valid; ++u) {
    if (sat_of[idx(u)].empty()) continue;
    NodeId s[] = {u};
    auto ball = k_neighborhood(g, s, z.gamma);
    for (NodeId w : ball) {
      for (std::size_t a : sat_of[idx(u)]) {
        for (std::size_t b : sat_of[idx(w)]) {
          if (a == b || z.clusters[a].color != z.clusters[b].color) continue;
          report.coloring.valid = false;
          report.coloring.violation = ColoringViolation{a, b, u, w};
          break;
        }
        if (!report.coloring.valid) break;
      }
      if (!report.coloring.valid) break;
    }
  }

  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::set<std::pair<int, int>> paths;
    for (std::size_t c : clusters_of[idx(v)]) {
      paths.emplace(z.clusters[c].provenance.zone, z.clusters[c].provenance.path_id);
    }
    std::map<int, int> per_zone;
    for (const auto& [zone, path] : paths) {
      report.max_paths_per_node = std::max(report.max_paths_per_node, ++per_zone[zone]);
    }
  }
  return report;
}

std::string describe(const CoverReport& report) {
  std::ostringstream out;
  out << "unsatisfied nodes: " << report.unsatisfied.size();
  for (std::size_t i = 0; i < report.unsatisfied.size() && i < 10; ++i) out << ' ' << report.unsatisfied[i];
  out << "\ndisconnected clusters: " << report.disconnected.size() << '\n'
      << "degree: " << report.degree << '\n'
      << "radius: " << report.radius << '\n'
      << "stretch: " << report.stretch << '\n'
      << "colors used: " << report.coloring.colors_used << " (max color " << report.coloring.max_color << ")\n"
      << "coloring: " << (report.coloring.valid ? "valid" : "INVALID");
  if (report.coloring.violation) {
    const auto& v = *report.coloring.violation;
    out << " clusters " << v.first << " and " << v.second << " witnesses " << v.u << ' ' << v.v;
  }
  out << "\nmax clustering paths per node: " << report.max_paths_per_node << '\n';
  return out.str();
}

std::string format_cover(const Cover& z) {
  std::ostringstream out;
  for (std::size_t c = 0; c < z.clusters.size(); ++c) {
    const Cluster& x = z.clusters[c];
    out << "cluster " << c << " color " << x.color << " leader " << (x.leader ? *x.leader : -1) << " zone "
        << x.provenance.zone << " members";
    for (NodeId v : x.members) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

Cover parse_cover(std::string_view text, Weight gamma) {
  Cover z;
  z.gamma = gamma;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("cover line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::size_t id = 0;
    long long color = 0, leader = 0, zone = 0;
    std::string k1, k2, k3, k4;
    if (word != "cluster" || !(fields >> id >> k1 >> color >> k2 >> leader >> k3 >> zone >> k4) ||
        k1 != "color" || k2 != "leader" || k3 != "zone" || k4 != "members") {
      fail("expected 'cluster <id> color <c> leader <v> zone <z> members ...'");
    }
    if (id != z.clusters.size()) fail("cluster ids must be consecutive from 0");
    Cluster c;
    c.color = static_cast<int>(color);
    if (leader >= 0) c.leader = static_cast<NodeId>(leader);
    c.provenance.zone = static_cast<int>(zone);
    long long v = 0;
    while (fields >> v) c.members.push_back(static_cast<NodeId>(v));
    if (!fields.eof()) fail("bad member list");
    if (c.members.empty()) fail("cluster has no members");
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
    z.clusters.push_back(std::move(c));
  }
  return z;
}

}  // namespace oblikit
