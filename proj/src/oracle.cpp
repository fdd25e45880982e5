#include "oblikit/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

namespace oblikit {

namespace {

std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }

void check_nodes(const WeightedPlanarGraph& g, const OracleBudget& budget) {
  if (static_cast<std::size_t>(g.node_count()) > budget.max_nodes) {
    throw BudgetExceeded("graph has " + std::to_string(g.node_count()) + " nodes, budget allows " +
                         std::to_string(budget.max_nodes));
  }
}

}  // namespace

std::vector<Path> enumerate_simple_paths(const WeightedPlanarGraph& g, NodeId u, NodeId v, std::size_t max_paths) {
  if (!g.contains(u) || !g.contains(v)) throw std::invalid_argument("node out of range");
  if (u == v) throw std::invalid_argument("enumerate_simple_paths needs u != v");
  std::vector<Path> out;
  std::vector<char> on_path(idx(g.node_count()), 0);
  Path cur{{u}, 0};
  on_path[idx(u)] = 1;

  std::function<void(NodeId)> dfs = [&](NodeId x) {
    for (const Neighbor& nb : g.neighbors(x)) {
      if (on_path[idx(nb.node)]) continue;
      cur.nodes.push_back(nb.node);
      cur.length += nb.weight;
      if (nb.node == v) {
        if (out.size() == max_paths) {
          throw BudgetExceeded("more than " + std::to_string(max_paths) + " simple paths between " +
                               std::to_string(u) + " and " + std::to_string(v));
        }
        out.push_back(cur);
      } else {
        on_path[idx(nb.node)] = 1;
        dfs(nb.node);
        on_path[idx(nb.node)] = 0;
      }
      cur.nodes.pop_back();
      cur.length -= nb.weight;
    }
  };
  dfs(u);
  std::sort(out.begin(), out.end(), [](const Path& a, const Path& b) {
    return a.length != b.length ? a.length < b.length : a.nodes < b.nodes;
  });
  return out;
}

OracleResult optimal_cost(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f,
                          const OracleBudget& budget) {
  check_nodes(g, budget);
  if (a.size() > budget.max_demands) {
    throw BudgetExceeded(std::to_string(a.size()) + " demands, budget allows " + std::to_string(budget.max_demands));
  }
  const auto k_max = static_cast<std::int64_t>(std::max<std::size_t>(2, a.size()));
  CanonicalReport canon = validate_canonical(f, k_max);
  if (!canon.ok) throw std::invalid_argument("oracle needs a canonical fusion function: " + canon.message);

  OracleResult result;
  if (a.empty()) {
    if (f.has_exact()) result.exact_cost = Rational(0);
    return result;
  }

  std::vector<std::vector<Path>> paths;
  std::vector<std::vector<std::vector<std::size_t>>> edges;
  for (const Demand& d : a) {
    paths.push_back(enumerate_simple_paths(g, d.s, d.t, budget.max_paths));
    auto& list = edges.emplace_back();
    for (const Path& p : paths.back()) list.push_back(path_edges(g, p.nodes));
  }

  // Marginal cost of one more demand on an edge already carrying x.
  std::vector<double> step(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (std::int64_t x = 0; x < k_max; ++x) step[static_cast<std::size_t>(x)] = f(x + 1) - f(x);
  // Concavity makes the last step the cheapest any demand can ever pay.
  const double min_step = std::max(0.0, step[a.size() - 1]);
  std::vector<double> tail_bound(a.size() + 1, 0.0);
  for (std::size_t k = a.size(); k-- > 0;) {
    tail_bound[k] = tail_bound[k + 1] + min_step * static_cast<double>(paths[k].front().length);
  }

  const std::size_t m = g.edge_count();
  std::vector<std::int64_t> load(m, 0);
  std::vector<std::size_t> choice(a.size(), 0), best_choice;
  double best = std::numeric_limits<double>::infinity();

  // Any remaining demand still has to pay at least the current marginal cost
  // along some path, since loads never shrink.
  std::vector<double> dist(idx(g.node_count()));
  auto single_bound = [&](std::size_t k) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[idx(a[k].s)] = 0;
    heap.push({0.0, a[k].s});
    while (!heap.empty()) {
      auto [d, x] = heap.top();
      heap.pop();
      if (d > dist[idx(x)]) continue;
      if (x == a[k].t) return d;
      for (const Neighbor& nb : g.neighbors(x)) {
        double c = d + step[static_cast<std::size_t>(load[nb.edge])] * static_cast<double>(nb.weight);
        if (c < dist[idx(nb.node)]) {
          dist[idx(nb.node)] = c;
          heap.push({c, nb.node});
        }
      }
    }
    return dist[idx(a[k].t)];
  };

  std::function<void(std::size_t, double)> search = [&](std::size_t k, double partial) {
    if (k == a.size()) {
      if (partial < best) {
        best = partial;
        best_choice = choice;
      }
      return;
    }
    double bound = tail_bound[k];
    for (std::size_t j = k; j < a.size() && partial + bound < best; ++j) bound = std::max(bound, single_bound(j));
    if (partial + bound >= best) return;
    // Identical consecutive demands are interchangeable; keep their choices
    // non-decreasing so each multiset of paths is tried once.
    std::size_t first = (k > 0 && a[k] == a[k - 1]) ? choice[k - 1] : 0;
    for (std::size_t p = first; p < edges[k].size(); ++p) {
      double delta = 0;
      for (std::size_t e : edges[k][p]) delta += step[static_cast<std::size_t>(load[e])] * g.edge(e).weight;
      if (partial + delta + tail_bound[k + 1] >= best) continue;
      choice[k] = p;
      for (std::size_t e : edges[k][p]) ++load[e];
      search(k + 1, partial + delta);
      for (std::size_t e : edges[k][p]) --load[e];
    }
  };
  search(0, 0.0);

  for (std::size_t k = 0; k < a.size(); ++k) result.witness.push_back(paths[k][best_choice[k]]);
  CostReport c = total_cost(g, result.witness, a, f);
  result.cost = c.total;
  result.exact_cost = c.exact_total;
  return result;
}

Weight steiner_brute(const WeightedPlanarGraph& g, std::span<const NodeId> terminals, const OracleBudget& budget) {
  check_nodes(g, budget);
  std::vector<NodeId> term(terminals.begin(), terminals.end());
  std::sort(term.begin(), term.end());
  term.erase(std::unique(term.begin(), term.end()), term.end());
  if (term.size() < 2) throw std::invalid_argument("steiner_brute needs at least two distinct terminals");
  for (NodeId t : term) {
    if (!g.contains(t)) throw std::invalid_argument("terminal out of range");
  }
  std::vector<NodeId> others;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!std::binary_search(term.begin(), term.end(), v)) others.push_back(v);
  }
  std::vector<std::size_t> by_weight(g.edge_count());
  std::iota(by_weight.begin(), by_weight.end(), 0);
  std::stable_sort(by_weight.begin(), by_weight.end(),
                   [&](std::size_t x, std::size_t y) { return g.edge(x).weight < g.edge(y).weight; });

  Weight best = kUnreachable;
  std::vector<char> in(idx(g.node_count()));
  std::vector<NodeId> parent(idx(g.node_count()));
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    while (parent[idx(x)] != x) x = parent[idx(x)] = parent[idx(parent[idx(x)])];
    return x;
  };
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
    std::fill(in.begin(), in.end(), 0);
    std::size_t count = term.size();
    for (NodeId t : term) in[idx(t)] = 1;
    for (std::size_t b = 0; b < others.size(); ++b) {
      if (mask >> b & 1) {
        in[idx(others[b])] = 1;
        ++count;
      }
    }
    std::iota(parent.begin(), parent.end(), 0);
    Weight total = 0;
    std::size_t joined = 1;
    for (std::size_t e : by_weight) {
      const Edge& ed = g.edge(e);
      if (!in[idx(ed.u)] || !in[idx(ed.v)]) continue;
      NodeId ru = find(ed.u), rv = find(ed.v);
      if (ru == rv) continue;
      parent[idx(ru)] = rv;
      total += ed.weight;
      if (++joined == count || total >= best) break;
    }
    if (joined == count && total < best) best = total;
  }
  return best;
}

CostReport baseline_independent_shortest(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f) {
  std::vector<Path> paths;
  for (const Demand& d : a) paths.push_back(shortest_path(g, d.s, d.t));
  return total_cost(g, paths, a, f);
}

namespace {

RatioReport make_ratio(const CostReport& c, const OracleResult& opt) {
  RatioReport r;
  r.cost = c.total;
  r.optimum = opt.cost;
  r.exact_cost = c.exact_total;
  r.exact_optimum = opt.exact_cost;
  if (r.exact_cost && r.exact_optimum) {
    r.ratio = *r.exact_optimum == Rational(0) ? 1.0 : boost::rational_cast<double>(*r.exact_cost / *r.exact_optimum);
  } else {
    r.ratio = r.optimum == 0 ? 1.0 : r.cost / r.optimum;
  }
  return r;
}

}  // namespace

RatioReport approximation_ratio(const CoverHierarchy& h, const AuxiliaryPathSet& q, const DemandSet& a,
                                const FusionFunction& f, const OracleBudget& budget) {
  auto routed = route_demands(h, q, a);
  CostReport c = total_cost(h.graph(), plain_paths(routed), a, f);
  return make_ratio(c, optimal_cost(h.graph(), a, f, budget));
}

namespace {

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string demand_key(const DemandSet& a) {
  std::string out;
  for (const Demand& d : a) {
    if (!out.empty()) out += ',';
    out += std::to_string(d.s) + '-' + std::to_string(d.t);
  }
  return out.empty() ? "none" : out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

OracleCache::OracleCache(std::string path) : path_(std::move(path)) {}

std::optional<OracleCache> OracleCache::from_environment() {
  const char* p = std::getenv("OBLIKIT_CACHE");
  if (p == nullptr || *p == '\0') return std::nullopt;
  return OracleCache(p);
}

std::optional<OracleResult> OracleCache::lookup(const WeightedPlanarGraph& g, const DemandSet& a,
                                                const FusionFunction& f) const {
  std::ifstream in(path_);
  if (!in) return std::nullopt;
  const std::string fp = hex(g.fingerprint()), key = demand_key(a);
  std::optional<OracleResult> found;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string lf, lname, ldem, lcost, lexact, lwit;
    if (!(fields >> lf >> lname >> ldem >> lcost >> lexact)) continue;
    fields >> lwit;
    if (lf != fp || lname != f.name() || ldem != key) continue;
    OracleResult r;
    try {
      r.cost = std::stod(lcost);
      if (lexact != "-") {
        auto slash = lexact.find('/');
        r.exact_cost = slash == std::string::npos
                           ? Rational(std::stoll(lexact))
                           : Rational(std::stoll(lexact.substr(0, slash)), std::stoll(lexact.substr(slash + 1)));
      }
      for (const std::string& p : split(lwit, '|')) {
        std::vector<NodeId> nodes;
        for (const std::string& v : split(p, '.')) nodes.push_back(static_cast<NodeId>(std::stol(v)));
        r.witness.push_back(make_path(g, std::move(nodes)));
      }
    } catch (const std::exception&) {
      continue;  // a damaged line is treated as a miss
    }
    if (r.witness.size() != a.size()) continue;
    found = std::move(r);
  }
  return found;
}

void OracleCache::store(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f,
                        const OracleResult& r) const {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot write oracle cache " + path_);
  out << hex(g.fingerprint()) << ' ' << f.name() << ' ' << demand_key(a) << ' ' << format_double(r.cost) << ' ';
  if (r.exact_cost) {
    out << r.exact_cost->numerator();
    if (r.exact_cost->denominator() != 1) out << '/' << r.exact_cost->denominator();
  } else {
    out << '-';
  }
  out << ' ';
  for (std::size_t k = 0; k < r.witness.size(); ++k) {
    if (k > 0) out << '|';
    for (std::size_t j = 0; j < r.witness[k].nodes.size(); ++j) {
      if (j > 0) out << '.';
      out << r.witness[k].nodes[j];
    }
  }
  out << '\n';
}

OracleResult cached_optimal_cost(const WeightedPlanarGraph& g, const DemandSet& a, const FusionFunction& f,
                                 const OracleBudget& budget, const OracleCache* cache) {
  if (cache) {
    if (auto hit = cache->lookup(g, a, f)) return *hit;
  }
  OracleResult r = optimal_cost(g, a, f, budget);
  if (cache) cache->store(g, a, f, r);
  return r;
}

}  // namespace oblikit
