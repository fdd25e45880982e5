#include "oblikit/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace oblikit {

namespace {

constexpr double kTolerance = 1e-9;

double parse_number(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(value)) {
    throw std::invalid_argument("bad " + std::string(what) + " parameter '" + s + "'");
  }
  return value;
}

std::string trim_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

FusionFunction::FusionFunction(std::string name, Eval eval, ExactEval exact)
    : name_(std::move(name)), eval_(std::move(eval)), exact_(std::move(exact)) {
  if (!eval_) throw std::invalid_argument("fusion function needs an evaluator");
}

double FusionFunction::operator()(std::int64_t load) const {
  if (load < 0) throw std::invalid_argument("negative load");
  return eval_(load);
}

Rational FusionFunction::exact(std::int64_t load) const {
  if (!exact_) throw std::logic_error(name_ + " has no exact form");
  if (load < 0) throw std::invalid_argument("negative load");
  return exact_(load);
}

FusionFunction identity_fusion() {
  return FusionFunction(
      "identity", [](std::int64_t x) { return static_cast<double>(x); }, [](std::int64_t x) { return Rational(x); });
}

FusionFunction power_fusion(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("power exponent must lie in (0, 1]");
  FusionFunction::ExactEval exact;
  if (alpha == 1.0) exact = [](std::int64_t x) { return Rational(x); };
  return FusionFunction(
      "power:" + trim_number(alpha),
      [alpha](std::int64_t x) { return x == 0 ? 0.0 : std::pow(static_cast<double>(x), alpha); }, exact);
}

FusionFunction unit_step_fusion() {
  return FusionFunction(
      "unit-step", [](std::int64_t x) { return x > 0 ? 1.0 : 0.0; },
      [](std::int64_t x) { return Rational(x > 0 ? 1 : 0); });
}

FusionFunction saturating_fusion(double c) {
  if (!(c >= 1.0)) throw std::invalid_argument("saturating cap must be >= 1");
  FusionFunction::ExactEval exact;
  if (c == std::floor(c) && c < 1e15) {
    auto cap = static_cast<std::int64_t>(c);
    exact = [cap](std::int64_t x) { return Rational(std::min(x, cap)); };
  }
  return FusionFunction(
      "saturating:" + trim_number(c), [c](std::int64_t x) { return std::min(static_cast<double>(x), c); }, exact);
}

FusionFunction log2p1_fusion() {
  return FusionFunction("log2p1", [](std::int64_t x) { return std::log2(1.0 + static_cast<double>(x)); });
}

FusionFunction builtin_fusion(std::string_view spec) {
  auto colon = spec.find(':');
  std::string_view name = spec.substr(0, colon);
  std::optional<std::string_view> arg;
  if (colon != std::string_view::npos) arg = spec.substr(colon + 1);
  auto no_arg = [&] {
    if (arg) throw std::invalid_argument(std::string(name) + " takes no parameter");
  };
  if (name == "identity") {
    no_arg();
    return identity_fusion();
  }
  if (name == "unit-step") {
    no_arg();
    return unit_step_fusion();
  }
  if (name == "log2p1") {
    no_arg();
    return log2p1_fusion();
  }
  if (name == "power") return power_fusion(arg ? parse_number(*arg, "power") : 0.5);
  if (name == "saturating") return saturating_fusion(arg ? parse_number(*arg, "saturating") : 2.0);
  throw std::invalid_argument("unknown fusion function '" + std::string(spec) + "'");
}

std::vector<std::string> builtin_fusion_specs() {
  return {"identity", "power:0.5", "unit-step", "saturating:3", "log2p1"};
}

CanonicalReport validate_canonical(const FusionFunction& f, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("validate_canonical needs n >= 2");
  CanonicalReport report;
  auto fail = [&](std::string property, std::int64_t x, std::int64_t y, std::string message) {
    report.ok = false;
    report.property = std::move(property);
    report.x = x;
    report.y = y;
    report.message = std::move(message);
    return report;
  };

  // Comparisons are exact when possible; otherwise slack scales with the
  // magnitudes involved.
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  std::vector<Rational> e;
  for (std::int64_t x = 0; x <= n; ++x) v[static_cast<std::size_t>(x)] = f(x);
  if (f.has_exact()) {
    for (std::int64_t x = 0; x <= n; ++x) e.push_back(f.exact(x));
  }
  auto at = [&](std::int64_t x) { return v[static_cast<std::size_t>(x)]; };
  auto rat = [&](std::int64_t x) { return e[static_cast<std::size_t>(x)]; };
  auto slack = [](double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };

  bool zero = e.empty() ? std::abs(at(0)) <= 1e-12 : rat(0) == Rational(0);
  if (!zero) return fail("f0", 0, 0, "f(0) = " + trim_number(at(0)) + ", expected 0");

  for (std::int64_t x = 0; x < n; ++x) {
    bool ok = e.empty() ? at(x + 1) >= at(x) - slack(at(x), at(x + 1)) : rat(x + 1) >= rat(x);
    if (!ok) {
      return fail("monotone", x, 0,
                  "f(" + std::to_string(x + 1) + ") = " + trim_number(at(x + 1)) + " < f(" + std::to_string(x) +
                      ") = " + trim_number(at(x)));
    }
  }
  for (std::int64_t x = 1; x < n; ++x) {
    bool ok;
    if (e.empty()) {
      double second = at(x + 1) - 2 * at(x) + at(x - 1);
      ok = second <= slack(at(x + 1), at(x - 1)) * 4;
    } else {
      ok = rat(x + 1) + rat(x - 1) <= rat(x) + rat(x);
    }
    if (!ok) {
      double second = at(x + 1) - 2 * at(x) + at(x - 1);
      return fail("concave", x, 0,
                  "second difference at " + std::to_string(x) + " is " + trim_number(second) + " > 0");
    }
  }
  for (std::int64_t x = 1; x <= n; ++x) {
    for (std::int64_t y = x; x + y <= n; ++y) {
      bool ok = e.empty() ? at(x + y) <= at(x) + at(y) + slack(at(x + y), at(x) + at(y))
                          : rat(x + y) <= rat(x) + rat(y);
      if (!ok) {
        return fail("subadditive", x, y,
                    "f(" + std::to_string(x + y) + ") > f(" + std::to_string(x) + ") + f(" + std::to_string(y) + ")");
      }
    }
  }
  return report;
}

DemandSet parse_demands(std::string_view text, const WeightedPlanarGraph& g) {
  DemandSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long s = 0, t = 0, count = 1;
    if (!(fields >> s)) continue;
    if (!(fields >> t)) throw GraphError("demand line needs 's t [count]'", line_no);
    if (!(fields >> count)) {
      count = 1;
      fields.clear();
    }
    std::string extra;
    if (fields >> extra) throw GraphError("trailing text '" + extra + "'", line_no);
    if (s < 0 || t < 0 || s >= g.node_count() || t >= g.node_count()) {
      throw GraphError("demand endpoint out of range", line_no);
    }
    if (s == t) throw GraphError("demand endpoints must differ", line_no);
    if (count < 1) throw GraphError("demand count must be >= 1", line_no);
    for (long long k = 0; k < count; ++k) out.push_back({static_cast<NodeId>(s), static_cast<NodeId>(t)});
  }
  return out;
}

std::string format_demands(const DemandSet& a) {
  std::ostringstream out;
  for (const Demand& d : a) out << d.s << ' ' << d.t << '\n';
  return out.str();
}

DemandSet random_demands(const WeightedPlanarGraph& g, std::size_t count, std::uint64_t seed) {
  if (g.node_count() < 2) throw std::invalid_argument("random demands need at least two nodes");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::uint64_t>(g.node_count());
  DemandSet out;
  out.reserve(count);
  while (out.size() < count) {
    // Rejection keeps the distribution uniform over ordered pairs s != t.
    auto s = static_cast<NodeId>(rng() % n);
    auto t = static_cast<NodeId>(rng() % n);
    if (s != t) out.push_back({s, t});
  }
  return out;
}

namespace {

void add_edge_set(const WeightedPlanarGraph& g, std::span<const NodeId> nodes, std::vector<std::int64_t>& load,
                  std::vector<std::size_t>& scratch) {
  scratch = path_edges(g, nodes);
  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
  for (std::size_t e : scratch) ++load[e];
}

}  // namespace

LoadMap edge_loads(const WeightedPlanarGraph& g, std::span<const Path> paths, const DemandSet& a) {
  if (paths.size() != a.size()) throw std::invalid_argument("need exactly one path per demand");
  LoadMap m;
  m.load.assign(g.edge_count(), 0);
  std::vector<std::size_t> scratch;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Path& p = paths[k];
    if (p.nodes.empty() || p.front() != a[k].s || p.back() != a[k].t) {
      throw std::invalid_argument("path " + std::to_string(k) + " does not join " + std::to_string(a[k].s) + " and " +
                                  std::to_string(a[k].t));
    }
    add_edge_set(g, p.nodes, m.load, scratch);
  }
  return m;
}

CostReport cost_of_loads(const WeightedPlanarGraph& g, const LoadMap& loads, const FusionFunction& f) {
  CostReport r;
  r.per_edge.assign(g.edge_count(), 0.0);
  long double sum = 0;
  std::optional<Rational> exact;
  if (f.has_exact()) exact = Rational(0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    std::int64_t x = loads.load[e];
    if (x == 0) continue;
    const Weight w = g.edge(e).weight;
    r.per_edge[e] = f(x) * static_cast<double>(w);
    sum += r.per_edge[e];
    if (exact) *exact += f.exact(x) * w;
  }
  r.total = static_cast<double>(sum);
  r.exact_total = exact;
  return r;
}

CostReport total_cost(const WeightedPlanarGraph& g, std::span<const Path> paths, const DemandSet& a,
                      const FusionFunction& f) {
  return cost_of_loads(g, edge_loads(g, paths, a), f);
}

std::vector<RoutedPath> route_demands(const CoverHierarchy& h, const AuxiliaryPathSet& q, const DemandSet& a) {
  std::vector<RoutedPath> out;
  out.reserve(a.size());
  for (const Demand& d : a) out.push_back(find_path(h, q, d.s, d.t));
  return out;
}

std::vector<Path> plain_paths(std::span<const RoutedPath> routed) {
  std::vector<Path> out;
  out.reserve(routed.size());
  for (const RoutedPath& r : routed) out.push_back(r.path);
  return out;
}

namespace {

void check_routed(std::span<const RoutedPath> routed, const DemandSet& a) {
  if (routed.size() != a.size()) throw std::invalid_argument("need exactly one routed path per demand");
  for (std::size_t k = 0; k < a.size(); ++k) {
    const RoutedPath& r = routed[k];
    if (r.source != a[k].s || r.target != a[k].t) {
      throw std::invalid_argument("routed path " + std::to_string(k) + " does not match its demand");
    }
    const auto want = static_cast<std::size_t>(r.level) + 1;
    if (r.source_marks.size() != want || r.dest_marks.size() != want) {
      throw std::invalid_argument("routed path " + std::to_string(k) + " is missing level annotations");
    }
  }
}

}  // namespace

LevelCosts level_costs(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
                       const FusionFunction& f) {
  check_routed(routed, a);
  const auto& g = h.graph();
  const auto levels = static_cast<std::size_t>(h.kappa());
  std::vector<LoadMap> src(levels), dst(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    src[i].load.assign(g.edge_count(), 0);
    dst[i].load.assign(g.edge_count(), 0);
  }
  std::vector<std::size_t> scratch;
  for (const RoutedPath& r : routed) {
    for (int j = 0; j < r.level; ++j) {
      add_edge_set(g, r.source_subpath(j), src[static_cast<std::size_t>(j)].load, scratch);
      add_edge_set(g, r.dest_subpath(j), dst[static_cast<std::size_t>(j)].load, scratch);
    }
  }

  LevelCosts out;
  out.total = total_cost(g, plain_paths(routed), a, f);
  long double sum = 0;
  std::vector<Rational> exact_src, exact_dst;
  for (std::size_t i = 0; i < levels; ++i) {
    CostReport s = cost_of_loads(g, src[i], f);
    CostReport d = cost_of_loads(g, dst[i], f);
    out.src.push_back(s.total);
    out.dst.push_back(d.total);
    sum += static_cast<long double>(s.total) + d.total;
    if (f.has_exact()) {
      exact_src.push_back(*s.exact_total);
      exact_dst.push_back(*d.exact_total);
    }
  }
  out.decomposed = static_cast<double>(sum);
  if (f.has_exact()) {
    Rational total(0);
    for (std::size_t i = 0; i < levels; ++i) total += exact_src[i] + exact_dst[i];
    out.decomposition_holds = *out.total.exact_total <= total;
    out.exact_src = std::move(exact_src);
    out.exact_dst = std::move(exact_dst);
  } else {
    out.decomposition_holds = out.total.total <= out.decomposed + kTolerance;
  }
  return out;
}

std::map<std::size_t, std::int64_t> extract_XA(const CoverHierarchy& h, std::span<const RoutedPath> routed,
                                               const DemandSet& a, int i) {
  check_routed(routed, a);
  if (i < 0 || i > h.kappa()) throw std::out_of_range("level out of range");
  std::map<std::size_t, std::int64_t> out;
  for (const RoutedPath& r : routed) {
    if (r.level > i) ++out[h.satisfying_cluster(i, r.source)];
  }
  return out;
}

std::size_t leader_fan_out(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a, int i) {
  check_routed(routed, a);
  std::map<std::size_t, std::set<NodeId>> next;
  for (const RoutedPath& r : routed) {
    if (r.level <= i) continue;
    NodeId leader = r.path.nodes[r.source_marks[static_cast<std::size_t>(i) + 1]];
    next[h.satisfying_cluster(i, r.source)].insert(leader);
  }
  std::size_t worst = 0;
  for (const auto& [cluster, leaders] : next) worst = std::max(worst, leaders.size());
  return worst;
}

double bound_Q(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
               const FusionFunction& f, int i) {
  if (i < 0 || i >= h.kappa()) throw std::out_of_range("Q is defined for 0 <= i < kappa");
  const auto& p = h.params();
  const double scale = static_cast<double>(p.beta) * p.sigma * static_cast<double>(p.gamma(i + 1));
  long double sum = 0;
  for (const auto& [cluster, count] : extract_XA(h, routed, a, i)) sum += f(count);
  return static_cast<double>(sum * scale);
}

RBound bound_R(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
               const FusionFunction& f, int i) {
  if (i < 2 || i > h.kappa() - 1) throw std::out_of_range("R is defined for 2 <= i <= kappa-1");
  const double half = static_cast<double>(h.params().gamma(i)) / 2.0;
  const Cover& z = h.level(i);
  RBound out;
  for (const auto& [cluster, count] : extract_XA(h, routed, a, i)) {
    double term = f(count) * half;
    out.r += term;
    out.by_color[z.clusters[cluster].color] += term;
  }
  out.over_chi = out.r / h.params().chi;
  return out;
}

double bound_small_levels(const CoverHierarchy& h, std::span<const RoutedPath> routed, const DemandSet& a,
                          const FusionFunction& f, int i) {
  if (i < 0 || i > 1) throw std::out_of_range("the unscaled bound covers levels 0 and 1");
  long double sum = 0;
  for (const auto& [cluster, count] : extract_XA(h, routed, a, i)) sum += f(count);
  return static_cast<double>(sum);
}

double ratio_bound(const HierarchyParams& p) {
  return 16.0 * p.kappa * p.beta * static_cast<double>(p.sigma) * p.sigma * p.chi;
}

}  // namespace oblikit
