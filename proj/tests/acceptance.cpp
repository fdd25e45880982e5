// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oblikit/cover.hpp"
#include "oblikit/fusion.hpp"
#include "oblikit/generators.hpp"
#include "oblikit/hierarchy.hpp"
#include "oblikit/oracle.hpp"
#include "oblikit/pipeline.hpp"
#include "oracles.hpp"

using namespace oblikit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failures; the verdict flips on any of them.
class Tally {
 public:
  void fail(const std::string& what) {
    if (failures_++ < 3) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
  }
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) fail(what);
  }
  Outcome outcome(const std::string& summary) const {
    Outcome o;
    o.pass = failures_ == 0;
    o.detail = summary + ", " + std::to_string(checks_) + " checks";
    if (failures_ > 0) o.detail += ", " + std::to_string(failures_) + " failures: " + notes_.str();
    return o;
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::ostringstream notes_;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

HierarchyParams with_base(const WeightedPlanarGraph& g, std::int64_t base) {
  ParamOverrides o;
  o.base = base;
  return make_params(g, o);
}

Outcome cover_structure() {
  Tally t;
  std::vector<std::pair<std::string, WeightedPlanarGraph>> graphs;
  for (int side : {10, 20, 30}) graphs.emplace_back("grid" + std::to_string(side), gen_grid(side, side));
  for (int n : {50, 200, 500}) graphs.emplace_back("tri" + std::to_string(n), gen_triangulated(n, 1));
  std::size_t worst_degree = 0, worst_colors = 0;
  double worst_stretch = 0;
  for (const auto& [name, g] : graphs) {
    oracle::Distances d(g);
    for (Weight gamma : {1, 2, 4, 8}) {
      const std::string tag = name + " gamma " + std::to_string(gamma);
      Cover z = planar_cover(g, gamma);
      CoverReport r = validate_cover(g, z);
      t.check(r.satisfies(18, 24, 18), tag + " validator: " + describe(r));
      t.check(oracle::all_satisfied(d, z, gamma), tag + " unsatisfied node");
      std::size_t degree = oracle::max_membership(z, d.size());
      t.check(degree <= 18, tag + " degree " + std::to_string(degree));
      Weight radius = 0;
      for (const Cluster& c : z.clusters) radius = std::max(radius, oracle::induced_radius(g, c.members));
      double stretch = static_cast<double>(radius) / static_cast<double>(gamma);
      t.check(stretch <= 24, tag + " stretch " + fmt(stretch));
      auto colors = oracle::colors(z);
      t.check(colors.size() <= 18 && *colors.rbegin() <= 18 && *colors.begin() >= 1,
              tag + " colors " + std::to_string(colors.size()));
      t.check(!oracle::coloring_violation(d, z, gamma), tag + " same-colored clusters within distance gamma");
      worst_degree = std::max(worst_degree, degree);
      worst_colors = std::max(worst_colors, colors.size());
      worst_stretch = std::max(worst_stretch, stretch);
    }
  }
  return t.outcome("24 covers, max degree " + std::to_string(worst_degree) + ", max stretch " + fmt(worst_stretch) +
                   ", max colors " + std::to_string(worst_colors));
}

Outcome path_clustering() {
  Tally t;
  std::mt19937_64 rng(2024);
  std::size_t worst_membership = 0;
  double worst_stretch = 0;
  for (int k = 0; k < 100; ++k) {
    auto seed = static_cast<std::uint64_t>(k);
    WeightedPlanarGraph g = k % 2 ? gen_triangulated(static_cast<int>(draw(rng, 20, 120)), seed)
                                  : gen_grid(static_cast<int>(draw(rng, 3, 12)), static_cast<int>(draw(rng, 3, 12)),
                                             k % 4 ? WeightRule::Random : WeightRule::Unit, seed);
    const auto n = g.node_count();
    auto p = shortest_path(g, static_cast<NodeId>(draw(rng, 0, n - 1)), static_cast<NodeId>(draw(rng, 0, n - 1)));
    const Weight gamma = draw(rng, 1, 6);
    Cover z;
    z.gamma = gamma;
    z.clusters = shortest_path_cluster(g, p, gamma);
    oracle::Distances d(g);
    const std::string tag = "case " + std::to_string(k);
    std::size_t m = oracle::max_membership(z, d.size());
    t.check(m <= 3, tag + " membership " + std::to_string(m));
    for (const Cluster& c : z.clusters) {
      Weight r = oracle::induced_radius(g, c.members);
      t.check(r <= 8 * gamma, tag + " radius " + std::to_string(r));
      worst_stretch = std::max(worst_stretch, static_cast<double>(r) / static_cast<double>(gamma));
    }
    t.check(oracle::colors(z).size() <= 3, tag + " more than 3 colors");
    t.check(!oracle::coloring_violation(d, z, gamma), tag + " 3-coloring invalid");
    worst_membership = std::max(worst_membership, m);
  }
  return t.outcome("100 cases, max membership " + std::to_string(worst_membership) + ", max radius/gamma " +
                   fmt(worst_stretch));
}

Outcome depth_covers() {
  Tally t;
  std::vector<std::pair<std::string, WeightedPlanarGraph>> graphs;
  for (int n : {8, 15, 40, 100}) graphs.emplace_back("cycle" + std::to_string(n), gen_cycle(n));
  for (int n : {8, 20, 60}) {
    for (std::uint64_t s = 1; s <= 3; ++s) graphs.emplace_back("fan" + std::to_string(n) + "-s" + std::to_string(s), gen_fan(n, s));
  }
  graphs.emplace_back("path30", gen_path(30));
  graphs.emplace_back("star12", gen_star(12));
  for (int cols : {5, 12, 30}) graphs.emplace_back("grid3x" + std::to_string(cols), gen_grid(3, cols));
  graphs.emplace_back("grid5x5", gen_grid(5, 5));
  graphs.emplace_back("grid6x9w", gen_grid(6, 9, WeightRule::Random, 2));
  for (std::uint64_t s = 1; s <= 4; ++s) graphs.emplace_back("tri40-s" + std::to_string(s), gen_triangulated(40, s));
  std::size_t runs = 0, worst_degree = 0, worst_colors = 0;
  for (const auto& [name, g] : graphs) {
    oracle::Distances d(g);
    const Weight base = std::max<Weight>(1, depth(g));
    for (Weight gamma : {base, base + 1, 2 * base + 2}) {
      const std::string tag = name + " gamma " + std::to_string(gamma);
      Cover z = depth_cover(g, gamma);
      ++runs;
      std::size_t degree = oracle::max_membership(z, d.size());
      auto colors = oracle::colors(z);
      t.check(oracle::all_satisfied(d, z, gamma), tag + " unsatisfied node");
      t.check(degree <= 6, tag + " degree " + std::to_string(degree));
      t.check(colors.size() <= 6 && *colors.begin() >= 1 && *colors.rbegin() <= 6,
              tag + " colors " + std::to_string(colors.size()));
      t.check(!oracle::coloring_violation(d, z, gamma), tag + " coloring invalid");
      worst_degree = std::max(worst_degree, degree);
      worst_colors = std::max(worst_colors, colors.size());
    }
  }
  return t.outcome(std::to_string(runs) + " depth covers, max degree " + std::to_string(worst_degree) +
                   ", max colors " + std::to_string(worst_colors));
}

struct LevelCorpus {
  std::size_t triples = 0;
  Tally eq1;
  Tally lemma6;
  double worst_q_ratio = 0;
  std::size_t worst_fan_out = 0;
};

LevelCorpus level_corpus() {
  LevelCorpus out;
  const auto specs = builtin_fusion_specs();
  std::mt19937_64 rng(77);
  for (int k = 0; k < 40; ++k) {
    auto seed = static_cast<std::uint64_t>(k);
    WeightedPlanarGraph g = k % 3 == 0   ? gen_grid(static_cast<int>(draw(rng, 5, 12)), static_cast<int>(draw(rng, 5, 12)))
                            : k % 3 == 1 ? gen_grid(static_cast<int>(draw(rng, 5, 10)), static_cast<int>(draw(rng, 5, 10)),
                                                    WeightRule::Random, seed)
                                         : gen_triangulated(static_cast<int>(draw(rng, 30, 150)), seed);
    CoverHierarchy h(g, with_base(g, 4), {});
    auto q = auxiliary_paths(h);
    DemandSet a = random_demands(g, static_cast<std::size_t>(draw(rng, 5, 40)), seed);
    auto routed = route_demands(h, q, a);
    for (const auto& spec : specs) {
      auto f = builtin_fusion(spec);
      const std::string tag = "instance " + std::to_string(k) + " " + f.name();
      ++out.triples;
      LevelCosts lc = level_costs(h, routed, a, f);
      out.eq1.check(lc.decomposition_holds, tag + " C=" + fmt(lc.total.total) + " > " + fmt(lc.decomposed));
      for (int i = 0; i < h.kappa(); ++i) {
        double src = lc.src[static_cast<std::size_t>(i)];
        double qi = bound_Q(h, routed, a, f, i);
        out.lemma6.check(src <= qi * (1 + 1e-12), tag + " level " + std::to_string(i) + " C_i=" + fmt(src) + " > Q=" + fmt(qi));
        if (qi > 0) out.worst_q_ratio = std::max(out.worst_q_ratio, src / qi);
        std::size_t fan = leader_fan_out(h, routed, a, i);
        out.lemma6.check(fan <= static_cast<std::size_t>(h.params().beta), tag + " fan-out " + std::to_string(fan));
        out.worst_fan_out = std::max(out.worst_fan_out, fan);
      }
    }
  }
  return out;
}

struct OracleCorpus {
  Tally lemma4;
  Tally ratio;
  std::size_t cases = 0;
  std::size_t lemma4_checks = 0;
  std::map<int, double> max_ratio_by_n;
  double max_ratio = 0;
  double bound = 0;
};

OracleCorpus oracle_corpus() {
  OracleCorpus out;
  const auto specs = builtin_fusion_specs();
  for (int k = 0; k < 100; ++k) {
    auto seed = static_cast<std::uint64_t>(k);
    WeightedPlanarGraph g = [&] {
      switch (k % 5) {
        case 0: return gen_grid(3, 3, WeightRule::Random, seed);
        case 1: return gen_grid(3, 4, WeightRule::Random, seed);
        case 2: return gen_fan(8 + k % 5, seed);
        case 3: return gen_triangulated(6 + k % 4, seed);
        default: return gen_grid(2, 6, WeightRule::Random, seed);
      }
    }();
    auto f = builtin_fusion(specs[static_cast<std::size_t>(k) % specs.size()]);
    CoverHierarchy h(g, with_base(g, 2), {});
    auto q = auxiliary_paths(h);
    DemandSet a = random_demands(g, static_cast<std::size_t>(1 + k % 4), seed + 1000);
    auto routed = route_demands(h, q, a);
    OracleResult opt = optimal_cost(g, a, f);
    const std::string tag = "case " + std::to_string(k) + " " + f.name();
    ++out.cases;
    for (int i = 0; i < h.kappa(); ++i) {
      double lower = i <= 1 ? bound_small_levels(h, routed, a, f, i) : bound_R(h, routed, a, f, i).over_chi;
      ++out.lemma4_checks;
      out.lemma4.check(lower <= opt.cost + 1e-9,
                       tag + " level " + std::to_string(i) + " bound " + fmt(lower) + " > C*=" + fmt(opt.cost));
    }
    RatioReport r = approximation_ratio(h, q, a, f);
    double bound = ratio_bound(h.params());
    out.bound = std::max(out.bound, bound);
    out.ratio.check(r.ratio >= 1.0 - 1e-9, tag + " ratio " + fmt(r.ratio) + " < 1");
    out.ratio.check(r.ratio <= bound, tag + " ratio " + fmt(r.ratio) + " above bound");
    out.max_ratio = std::max(out.max_ratio, r.ratio);
    auto& slot = out.max_ratio_by_n[g.node_count()];
    slot = std::max(slot, r.ratio);
  }
  return out;
}

Outcome obliviousness() {
  Tally t;
  auto g = gen_triangulated(200, 3);
  CoverHierarchy h(g, with_base(g, 3), {});
  auto q = auxiliary_paths(h);
  std::mt19937_64 rng(99);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (int k = 0; k < 100; ++k) pairs.emplace_back(static_cast<NodeId>(draw(rng, 0, 199)), static_cast<NodeId>(draw(rng, 0, 199)));

  std::vector<std::string> before;
  for (auto [u, v] : pairs) before.push_back(format_path_line(find_path(h, q, u, v)));

  // Repeated calls.
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    t.check(format_path_line(find_path(h, q, pairs[k].first, pairs[k].second)) == before[k], "repeat differs");
  }
  // Interleaved with unrelated queries, in reverse order.
  for (std::size_t k = pairs.size(); k-- > 0;) {
    find_path(h, q, static_cast<NodeId>(draw(rng, 0, 199)), static_cast<NodeId>(draw(rng, 0, 199)));
    t.check(format_path_line(find_path(h, q, pairs[k].first, pairs[k].second)) == before[k], "interleaved differs");
  }
  // Cost evaluation over unrelated demand sets in between.
  for (int rep = 0; rep < 5; ++rep) {
    DemandSet a = random_demands(g, 50, static_cast<std::uint64_t>(rep));
    auto routed = route_demands(h, q, a);
    level_costs(h, routed, a, builtin_fusion(builtin_fusion_specs()[static_cast<std::size_t>(rep)]));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    t.check(format_path_line(find_path(h, q, pairs[k].first, pairs[k].second)) == before[k], "after evaluation differs");
  }
  // A freshly built hierarchy with a cold tree cache.
  CoverHierarchy fresh(g, with_base(g, 3), {});
  auto fq = auxiliary_paths(fresh);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    t.check(format_path_line(find_path(fresh, fq, pairs[k].first, pairs[k].second)) == before[k], "rebuild differs");
  }
  return t.outcome("100 pairs on tri200");
}

Outcome steiner_cases() {
  Tally t;
  std::mt19937_64 rng(55);
  std::size_t edge_checked = 0;
  for (int k = 0; k < 50; ++k) {
    auto seed = static_cast<std::uint64_t>(k);
    WeightedPlanarGraph g = k % 3 == 0   ? gen_grid(3, static_cast<int>(draw(rng, 3, 4)), WeightRule::Random, seed)
                            : k % 3 == 1 ? gen_fan(static_cast<int>(draw(rng, 6, 11)), seed)
                                         : gen_triangulated(static_cast<int>(draw(rng, 5, 10)), seed);
    const auto n = g.node_count();
    const auto sink = static_cast<NodeId>(draw(rng, 0, n - 1));
    std::vector<NodeId> terms{sink};
    const auto want = static_cast<std::size_t>(draw(rng, 2, 4));
    while (terms.size() < want + 1) {
      auto t2 = static_cast<NodeId>(draw(rng, 0, n - 1));
      if (std::find(terms.begin(), terms.end(), t2) == terms.end()) terms.push_back(t2);
    }
    DemandSet a;
    for (std::size_t j = 1; j < terms.size(); ++j) a.push_back({terms[j], sink});
    OracleResult opt = optimal_cost(g, a, unit_step_fusion());
    Weight tree = steiner_brute(g, terms);
    const std::string tag = "case " + std::to_string(k);
    t.check(opt.exact_cost && *opt.exact_cost == Rational(tree),
            tag + " C*=" + fmt(opt.cost) + " steiner=" + std::to_string(tree));
    if (g.edge_count() <= 20) {
      ++edge_checked;
      t.check(tree == oracle::steiner_by_edges(g, terms), tag + " edge-subset search disagrees");
    }
  }
  return t.outcome("50 single-sink instances, " + std::to_string(edge_checked) + " also checked by edge-subset search");
}

Outcome performance(const std::string& csv_path) {
  Tally t;
  using Clock = std::chrono::steady_clock;
  auto start = Clock::now();
  auto g = gen_grid(50, 50);
  CoverHierarchy h(g, make_params(g), {});
  auto q = auxiliary_paths(h);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) find_path(h, q, static_cast<NodeId>(draw(rng, 0, 2499)), static_cast<NodeId>(draw(rng, 0, 2499)));
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  t.check(secs < 60, "50x50 took " + fmt(secs) + " s");

  std::string detail = "50x50 hierarchy + paths + 1000 queries in " + fmt(secs) + " s; pipeline elapsed_ms";
  std::ofstream csv(csv_path);
  csv << csv_header() << '\n';
  for (int side : {10, 20, 30, 50}) {
    ExperimentSpec spec;
    spec.graph.rows = side;
    spec.graph.cols = side;
    spec.demands = 100;
    PipelineResult r = run_pipeline(spec);
    t.check(r.all_pass, "pipeline on " + std::to_string(side) + "x" + std::to_string(side) + " failed: " + r.report);
    csv << to_csv(r.rows, false);
    detail += " n=" + std::to_string(side * side) + ":" + fmt(r.rows.back().elapsed_ms);
  }
  return t.outcome(detail + " (written to " + csv_path + ")");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string csv_path = argc > 1 ? argv[1] : "scaling.csv";
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d [%s]: %s (%s; %.1f s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  };

  report(1, "cover structure", cover_structure);
  report(2, "shortest-path clustering", path_clustering);
  report(3, "depth cover", depth_covers);

  LevelCorpus levels;
  report(4, "cost decomposition", [&] {
    levels = level_corpus();
    return levels.eq1.outcome(std::to_string(levels.triples) + " triples");
  });
  report(5, "source cost bound and fan-out", [&] {
    return levels.lemma6.outcome(std::to_string(levels.triples) + " triples, max C_i/Q " + fmt(levels.worst_q_ratio) +
                                 ", max fan-out " + std::to_string(levels.worst_fan_out));
  });

  OracleCorpus opt;
  report(6, "optimum lower bounds", [&] {
    opt = oracle_corpus();
    return opt.lemma4.outcome(std::to_string(opt.cases) + " cases, " + std::to_string(opt.lemma4_checks) + " level bounds");
  });
  report(7, "approximation ratio", [&] {
    std::string by_n;
    for (const auto& [n, r] : opt.max_ratio_by_n) by_n += " n=" + std::to_string(n) + ":" + fmt(r);
    return opt.ratio.outcome("max ratio " + fmt(opt.max_ratio) + " vs bound " + fmt(opt.bound) + ";" + by_n);
  });

  report(8, "obliviousness", obliviousness);
  report(9, "steiner special case", steiner_cases);
  report(10, "performance", [&] { return performance(csv_path); });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
