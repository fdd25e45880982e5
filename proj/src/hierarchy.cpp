#include "oblikit/hierarchy.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace oblikit {

namespace {

std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }

}  // namespace

Weight HierarchyParams::gamma(int i) const {
  if (i < 1) throw std::out_of_range("gamma is defined for levels >= 1");
  Weight g = 1;
  for (int k = 1; k < i; ++k) {
    if (g > kUnreachable / base) throw std::overflow_error("gamma overflows");
    g *= base;
  }
  return g;
}

HierarchyParams params_for_diameter(Weight diameter, const ParamOverrides& overrides) {
  HierarchyParams p;
  if (overrides.base) {
    if (*overrides.base < 2) throw std::invalid_argument("base must be >= 2");
    p.base = *overrides.base;
  } else {
    p.base = 4 * p.sigma;
  }
  if (diameter < 1) throw std::invalid_argument("diameter must be >= 1");
  p.diameter = diameter;
  int exponent = 0;
  for (Weight reach = 1; reach < diameter; ++exponent) {
    if (reach > kUnreachable / p.base) throw std::overflow_error("kappa overflows");
    reach *= p.base;
  }
  p.kappa = 1 + exponent;
  return p;
}

HierarchyParams make_params(const WeightedPlanarGraph& g, const ParamOverrides& overrides) {
  return params_for_diameter(std::max<Weight>(1, diameter(g)), overrides);
}

HierarchyError::HierarchyError(int level, const std::string& what)
    : std::runtime_error("level " + std::to_string(level) + ": " + what), level_(level) {}

NodeId elect_leader(const WeightedPlanarGraph& g, const Cluster& x) {
  if (x.members.empty()) throw std::invalid_argument("cannot elect a leader of an empty cluster");
  return cluster_center(g, x.members).center;
}

struct CoverHierarchy::TreeCache {
  std::mutex mutex;
  std::unordered_map<NodeId, std::shared_ptr<const ShortestPathTree>> trees;
};

CoverHierarchy::CoverHierarchy(const WeightedPlanarGraph& g, HierarchyParams params, HierarchyOptions options)
    : graph_(&g), params_(params), options_(options), cache_(std::make_unique<TreeCache>()) {
  const int kappa = params_.kappa;
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  const auto n = idx(g.node_count());
  levels_.resize(static_cast<std::size_t>(kappa) + 1);
  reports_.resize(static_cast<std::size_t>(kappa) + 1);
  chosen_.resize(static_cast<std::size_t>(kappa) + 1);

  Cover& base = levels_[0];
  base.gamma = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    Cluster c;
    c.members = {v};
    c.leader = v;
    base.clusters.push_back(std::move(c));
  }
  chosen_[0].resize(n);
  for (std::size_t v = 0; v < n; ++v) chosen_[0][v] = v;

  for (int i = 1; i < kappa; ++i) {
    Cover z = planar_cover(g, params_.gamma(i), options_.cover);
    if (options_.validate_levels) {
      CoverReport report = validate_cover(g, z);
      if (!report.satisfies(static_cast<std::size_t>(params_.beta), params_.sigma, params_.chi)) {
        throw HierarchyError(i, "cover failed validation\n" + describe(report));
      }
      reports_[static_cast<std::size_t>(i)] = std::move(report);
    }
    for (Cluster& c : z.clusters) c.leader = elect_leader(g, c);
    levels_[static_cast<std::size_t>(i)] = std::move(z);
  }
  Cover& top = levels_[static_cast<std::size_t>(kappa)];
  top.gamma = params_.gamma(kappa);
  Cluster all;
  for (NodeId v = 0; v < g.node_count(); ++v) all.members.push_back(v);
  all.leader = elect_leader(g, all);
  top.clusters.push_back(std::move(all));

  for (int i = 1; i <= kappa; ++i) {
    const Cover& z = levels_[static_cast<std::size_t>(i)];
    auto& chosen = chosen_[static_cast<std::size_t>(i)];
    chosen.assign(n, 0);
    if (i == kappa) continue;
    std::vector<std::vector<std::size_t>> clusters_of(n);
    for (std::size_t c = 0; c < z.clusters.size(); ++c) {
      for (NodeId v : z.clusters[c].members) clusters_of[idx(v)].push_back(c);
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
      NodeId s[] = {v};
      const auto ball = k_neighborhood(g, s, z.gamma);
      std::optional<std::size_t> best;
      for (std::size_t c : clusters_of[idx(v)]) {
        const Cluster& x = z.clusters[c];
        bool satisfied = std::includes(x.members.begin(), x.members.end(), ball.begin(), ball.end());
        if (satisfied && (!best || *x.leader < *z.clusters[*best].leader)) best = c;
      }
      if (!best) throw HierarchyError(i, "node " + std::to_string(v) + " is not satisfied");
      chosen[idx(v)] = *best;
    }
  }
}

CoverHierarchy::CoverHierarchy(CoverHierarchy&&) noexcept = default;
CoverHierarchy& CoverHierarchy::operator=(CoverHierarchy&&) noexcept = default;
CoverHierarchy::~CoverHierarchy() = default;

std::size_t CoverHierarchy::satisfying_cluster(int i, NodeId v) const {
  return chosen_.at(static_cast<std::size_t>(i)).at(idx(v));
}

NodeId CoverHierarchy::leader(int i, NodeId v) const {
  if (i == 0) return v;
  return *level(i).clusters[satisfying_cluster(i, v)].leader;
}

std::shared_ptr<const ShortestPathTree> CoverHierarchy::tree_from(NodeId source) const {
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->trees.find(source); it != cache_->trees.end()) return it->second;
  }
  auto tree = std::make_shared<const ShortestPathTree>(shortest_path_tree(*graph_, source));
  std::lock_guard lock(cache_->mutex);
  return cache_->trees.emplace(source, std::move(tree)).first->second;
}

CoverHierarchy build_hierarchy(const WeightedPlanarGraph& g, const HierarchyParams& params,
                               const HierarchyOptions& options) {
  return CoverHierarchy(g, params, options);
}

std::string summarize(const CoverHierarchy& h) {
  const auto& p = h.params();
  std::ostringstream out;
  out << "nodes " << h.graph().node_count() << " edges " << h.graph().edge_count() << " diameter " << p.diameter
      << '\n'
      << "kappa " << p.kappa << " base " << p.base << " beta " << p.beta << " sigma " << p.sigma << " chi " << p.chi
      << '\n';
  for (int i = 0; i <= h.kappa(); ++i) {
    const Cover& z = h.level(i);
    out << "level " << i << " gamma " << (i == 0 ? 0 : p.gamma(i)) << " clusters " << z.clusters.size();
    const auto& report = h.reports()[static_cast<std::size_t>(i)];
    if (report) {
      out << " degree " << report->degree << " radius " << report->radius << " stretch " << report->stretch
          << " colors " << report->coloring.colors_used << " status "
          << (report->satisfies(static_cast<std::size_t>(p.beta), p.sigma, p.chi) ? "ok" : "FAIL");
    } else if (i == 0 || i == h.kappa()) {
      out << " status trivial";
    } else {
      out << " status unchecked";
    }
    out << '\n';
  }
  out << "global leader " << h.global_leader() << '\n';
  return out.str();
}

Path AuxiliaryPath::segment(int i) const {
  auto a = marks.at(static_cast<std::size_t>(i));
  auto b = marks.at(static_cast<std::size_t>(i) + 1);
  Path s;
  s.nodes.assign(path.nodes.begin() + static_cast<std::ptrdiff_t>(a),
                 path.nodes.begin() + static_cast<std::ptrdiff_t>(b) + 1);
  s.length = offsets.at(b) - offsets.at(a);
  return s;
}

Path AuxiliaryPath::prefix(int i) const {
  auto b = marks.at(static_cast<std::size_t>(i));
  Path s;
  s.nodes.assign(path.nodes.begin(), path.nodes.begin() + static_cast<std::ptrdiff_t>(b) + 1);
  s.length = offsets.at(b);
  return s;
}

AuxiliaryPathSet auxiliary_paths(const CoverHierarchy& h) {
  const auto& g = h.graph();
  AuxiliaryPathSet out(idx(g.node_count()));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    AuxiliaryPath& q = out[idx(v)];
    q.owner = v;
    q.path.nodes = {v};
    q.marks = {0};
    NodeId x = v;
    for (int i = 0; i < h.kappa(); ++i) {
      NodeId next = h.leader(i + 1, v);
      // Trees rooted at ordinary nodes are used once; only leaders are cached.
      Path seg = i == 0 ? shortest_path_tree(g, x).path_to(next) : h.tree_from(x)->path_to(next);
      append_path(q.path, seg);
      q.marks.push_back(q.path.nodes.size() - 1);
      x = next;
    }
  }
  for (auto& q : out) {
    // Lengths of prefixes are recomputed from the graph so they are exact.
    q.path = make_path(g, std::move(q.path.nodes));
    q.offsets.assign(q.path.nodes.size(), 0);
    for (std::size_t k = 1; k < q.path.nodes.size(); ++k) {
      q.offsets[k] = q.offsets[k - 1] + g.edge(*g.edge_between(q.path.nodes[k - 1], q.path.nodes[k])).weight;
    }
  }
  return out;
}

std::span<const NodeId> RoutedPath::source_subpath(int j) const {
  auto a = source_marks.at(static_cast<std::size_t>(j));
  auto b = source_marks.at(static_cast<std::size_t>(j) + 1);
  return std::span<const NodeId>(path.nodes).subspan(a, b - a + 1);
}

std::span<const NodeId> RoutedPath::dest_subpath(int j) const {
  auto a = dest_marks.at(static_cast<std::size_t>(j) + 1);
  auto b = dest_marks.at(static_cast<std::size_t>(j));
  return std::span<const NodeId>(path.nodes).subspan(a, b - a + 1);
}

int meeting_level(const CoverHierarchy& h, Weight d, bool* capped) {
  if (capped) *capped = false;
  for (int i = 1; i <= h.kappa(); ++i) {
    Weight g = h.params().gamma(i);
    bool ok = h.options().level_rule == LevelRule::TwiceDistance ? g >= 2 * d : 2 * g >= d;
    if (ok) return i;
  }
  if (capped) *capped = true;
  return h.kappa();
}

namespace {

RoutedPath route(const CoverHierarchy& h, const AuxiliaryPathSet& q, NodeId u, NodeId v, Weight d,
                 const ShortestPathTree* from_u) {
  const auto& g = h.graph();
  RoutedPath r;
  r.source = u;
  r.target = v;
  if (u == v) {
    r.leader = u;
    r.cluster = idx(u);
    r.path = Path{{u}, 0};
    r.source_marks = {0};
    r.dest_marks = {0};
    return r;
  }
  const int i = meeting_level(h, d, &r.capped);
  r.level = i;
  // The common cluster is chosen for the lower endpoint so that (u, v) and
  // (v, u) meet at the same leader.
  r.cluster = h.satisfying_cluster(i, std::min(u, v));
  r.leader = *h.level(i).clusters[r.cluster].leader;

  const AuxiliaryPath& qu = q.at(idx(u));
  const AuxiliaryPath& qv = q.at(idx(v));
  r.path = qu.prefix(i - 1);
  r.source_marks.assign(qu.marks.begin(), qu.marks.begin() + i);

  const NodeId lu = h.leader(i - 1, u);
  std::shared_ptr<const ShortestPathTree> up;
  if (i - 1 == 0 && from_u) {
    append_path(r.path, from_u->path_to(r.leader));
  } else {
    up = h.tree_from(lu);
    append_path(r.path, up->path_to(r.leader));
  }
  const std::size_t leader_pos = r.path.nodes.size() - 1;
  r.source_marks.push_back(leader_pos);

  const NodeId lv = h.leader(i - 1, v);
  append_path(r.path, h.tree_from(r.leader)->path_to(lv));
  const std::size_t junction = r.path.nodes.size() - 1;
  Path back = reversed(qv.prefix(i - 1));
  append_path(r.path, back);

  const std::size_t len = back.nodes.size() - 1;
  r.dest_marks.resize(static_cast<std::size_t>(i) + 1);
  for (int j = 0; j < i; ++j) r.dest_marks[static_cast<std::size_t>(j)] = junction + len - qv.marks[static_cast<std::size_t>(j)];
  r.dest_marks[static_cast<std::size_t>(i)] = leader_pos;
  r.path = make_path(g, std::move(r.path.nodes));
  return r;
}

}  // namespace

RoutedPath find_path(const CoverHierarchy& h, const AuxiliaryPathSet& q, NodeId u, NodeId v) {
  const auto& g = h.graph();
  if (!g.contains(u) || !g.contains(v)) throw std::invalid_argument("find_path: node out of range");
  if (u == v) return route(h, q, u, v, 0, nullptr);
  auto tree = shortest_path_tree(g, u);
  return route(h, q, u, v, tree.dist[idx(v)], &tree);
}

PathTable::PathTable(NodeId n, std::vector<RoutedPath> entries) : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != idx(n) * idx(n)) throw std::invalid_argument("path table size mismatch");
}

const RoutedPath& PathTable::at(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::out_of_range("path table index");
  return entries_[idx(u) * idx(n_) + idx(v)];
}

PathTable find_all_paths(const CoverHierarchy& h, const AuxiliaryPathSet& q, std::size_t max_nodes) {
  const auto& g = h.graph();
  const auto n = idx(g.node_count());
  if (n > max_nodes) {
    throw std::length_error("find_all_paths: " + std::to_string(n) + " nodes exceeds cap " +
                            std::to_string(max_nodes));
  }
  std::vector<RoutedPath> entries;
  entries.reserve(n * n);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto tree = shortest_path_tree(g, u);
    for (NodeId v = 0; v < g.node_count(); ++v) entries.push_back(route(h, q, u, v, tree.dist[idx(v)], &tree));
  }
  return PathTable(g.node_count(), std::move(entries));
}

std::string format_path_line(const RoutedPath& p) {
  std::ostringstream out;
  out << "path " << p.source << ' ' << p.target << " level " << p.level << " leader " << p.leader << " nodes";
  for (NodeId v : p.path.nodes) out << ' ' << v;
  return out.str();
}

}  // namespace oblikit
