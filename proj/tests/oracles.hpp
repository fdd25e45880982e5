#pragma once

// Brute-force reference implementations used to cross-check the library.
// Nothing here calls into the code under test except for graph accessors.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "oblikit/cover.hpp"
#include "oblikit/fusion.hpp"
#include "oblikit/graph.hpp"

namespace oracle {

using oblikit::NodeId;
using oblikit::Weight;

inline constexpr Weight kInf = std::numeric_limits<Weight>::max() / 4;

// All-pairs distances by Floyd-Warshall.
class Distances {
 public:
  explicit Distances(const oblikit::WeightedPlanarGraph& g) : n_(static_cast<std::size_t>(g.node_count())) {
    d_.assign(n_ * n_, kInf);
    for (std::size_t v = 0; v < n_; ++v) d_[v * n_ + v] = 0;
    for (const auto& e : g.edges()) {
      auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
      d_[u * n_ + v] = std::min(d_[u * n_ + v], e.weight);
      d_[v * n_ + u] = std::min(d_[v * n_ + u], e.weight);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        const Weight ik = d_[i * n_ + k];
        if (ik == kInf) continue;
        Weight* row = &d_[i * n_];
        const Weight* krow = &d_[k * n_];
        for (std::size_t j = 0; j < n_; ++j) row[j] = std::min(row[j], ik + krow[j]);
      }
    }
  }

  Weight operator()(NodeId u, NodeId v) const { return d_[static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v)]; }
  std::size_t size() const { return n_; }

  std::vector<NodeId> ball(NodeId v, Weight k) const {
    std::vector<NodeId> out;
    for (std::size_t w = 0; w < n_; ++w) {
      if ((*this)(v, static_cast<NodeId>(w)) <= k) out.push_back(static_cast<NodeId>(w));
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Weight> d_;
};

// Distances inside the subgraph induced by `members`, by Floyd-Warshall.
inline Weight induced_radius(const oblikit::WeightedPlanarGraph& g, const std::vector<NodeId>& members) {
  const std::size_t k = members.size();
  std::map<NodeId, std::size_t> pos;
  for (std::size_t i = 0; i < k; ++i) pos[members[i]] = i;
  std::vector<Weight> d(k * k, kInf);
  for (std::size_t i = 0; i < k; ++i) d[i * k + i] = 0;
  for (const auto& e : g.edges()) {
    auto a = pos.find(e.u), b = pos.find(e.v);
    if (a == pos.end() || b == pos.end()) continue;
    d[a->second * k + b->second] = std::min(d[a->second * k + b->second], e.weight);
    d[b->second * k + a->second] = std::min(d[b->second * k + a->second], e.weight);
  }
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) d[i * k + j] = std::min(d[i * k + j], d[i * k + m] + d[m * k + j]);
  Weight best = kInf;
  for (std::size_t i = 0; i < k; ++i) best = std::min(best, *std::max_element(d.begin() + i * k, d.begin() + (i + 1) * k));
  return best;
}

// Nodes of x whose k-ball lies inside x.
inline std::vector<NodeId> satisfied(const Distances& d, const std::vector<NodeId>& members, Weight k) {
  std::vector<NodeId> out;
  for (NodeId v : members) {
    auto b = d.ball(v, k);
    if (std::includes(members.begin(), members.end(), b.begin(), b.end())) out.push_back(v);
  }
  return out;
}

// First pair of distinct same-colored clusters with k-satisfied nodes at
// distance <= k, scanning every pair of clusters.
inline std::optional<std::pair<std::size_t, std::size_t>> coloring_violation(const Distances& d,
                                                                             const oblikit::Cover& z, Weight k) {
  std::vector<std::vector<NodeId>> sat;
  for (const auto& c : z.clusters) sat.push_back(satisfied(d, c.members, k));
  for (std::size_t a = 0; a < z.clusters.size(); ++a) {
    for (std::size_t b = a + 1; b < z.clusters.size(); ++b) {
      if (z.clusters[a].color != z.clusters[b].color) continue;
      for (NodeId u : sat[a]) {
        for (NodeId v : sat[b]) {
          if (d(u, v) <= k) return std::make_pair(a, b);
        }
      }
    }
  }
  return std::nullopt;
}

inline std::size_t max_membership(const oblikit::Cover& z, std::size_t n) {
  std::vector<std::size_t> count(n, 0);
  for (const auto& c : z.clusters)
    for (NodeId v : c.members) ++count[static_cast<std::size_t>(v)];
  return n == 0 ? 0 : *std::max_element(count.begin(), count.end());
}

inline bool all_satisfied(const Distances& d, const oblikit::Cover& z, Weight k) {
  for (std::size_t v = 0; v < d.size(); ++v) {
    auto b = d.ball(static_cast<NodeId>(v), k);
    bool ok = std::any_of(z.clusters.begin(), z.clusters.end(), [&](const oblikit::Cluster& c) {
      return std::includes(c.members.begin(), c.members.end(), b.begin(), b.end());
    });
    if (!ok) return false;
  }
  return true;
}

inline std::set<int> colors(const oblikit::Cover& z) {
  std::set<int> out;
  for (const auto& c : z.clusters) out.insert(c.color);
  return out;
}

// Cost by direct definition: for each undirected edge, the number of demands
// whose path touches it.
inline double cost(const oblikit::WeightedPlanarGraph& g, const std::vector<oblikit::Path>& paths,
                   const oblikit::FusionFunction& f) {
  std::map<std::pair<NodeId, NodeId>, std::int64_t> load;
  for (const auto& p : paths) {
    std::set<std::pair<NodeId, NodeId>> used;
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      used.insert(std::minmax(p.nodes[i], p.nodes[i + 1]));
    }
    for (const auto& e : used) ++load[e];
  }
  double total = 0;
  for (const auto& e : g.edges()) {
    auto it = load.find(std::minmax(e.u, e.v));
    if (it != load.end()) total += f(it->second) * static_cast<double>(e.weight);
  }
  return total;
}

// Plain Cartesian product over per-demand simple-path lists.
inline double exhaustive_optimum(const oblikit::WeightedPlanarGraph& g, const std::vector<std::vector<oblikit::Path>>& options,
                                 const oblikit::FusionFunction& f) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(options.size(), 0);
  while (true) {
    std::vector<oblikit::Path> chosen;
    for (std::size_t k = 0; k < options.size(); ++k) chosen.push_back(options[k][pick[k]]);
    best = std::min(best, cost(g, chosen, f));
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return best;
}

// Lightest edge subset whose edges connect all terminals, by enumerating
// every subset of edges. Only for graphs with a handful of edges.
inline Weight steiner_by_edges(const oblikit::WeightedPlanarGraph& g, const std::vector<NodeId>& terminals) {
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  Weight best = kInf;
  std::vector<NodeId> parent(static_cast<std::size_t>(g.node_count()));
  auto find = [&](NodeId x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    Weight total = 0;
    for (std::size_t e = 0; e < m; ++e) {
      if (mask >> e & 1) total += edges[e].weight;
    }
    if (total >= best) continue;
    for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<NodeId>(v);
    for (std::size_t e = 0; e < m; ++e) {
      if (mask >> e & 1) parent[static_cast<std::size_t>(find(edges[e].u))] = find(edges[e].v);
    }
    bool joined = std::all_of(terminals.begin(), terminals.end(),
                              [&](NodeId t) { return find(t) == find(terminals.front()); });
    if (joined) best = total;
  }
  return best;
}

}  // namespace oracle
