#include <doctest.h>

#include <cmath>
#include <random>

#include "oblikit/fusion.hpp"
#include "oblikit/generators.hpp"
#include "oblikit/hierarchy.hpp"
#include "oracles.hpp"

using namespace oblikit;

namespace {

CoverHierarchy hierarchy(const WeightedPlanarGraph& g, std::int64_t base) {
  ParamOverrides o;
  o.base = base;
  return CoverHierarchy(g, make_params(g, o), {});
}

std::vector<Path> subpaths(const WeightedPlanarGraph& g, const std::vector<RoutedPath>& routed, int j, bool source) {
  std::vector<Path> out;
  for (const RoutedPath& r : routed) {
    if (r.level <= j) continue;
    auto span = source ? r.source_subpath(j) : r.dest_subpath(j);
    out.push_back(make_path(g, {span.begin(), span.end()}));
  }
  return out;
}

}  // namespace

TEST_CASE("builtin fusion functions") {
  CHECK(identity_fusion()(5) == 5.0);
  CHECK(power_fusion(0.5)(4) == doctest::Approx(2.0));
  CHECK(unit_step_fusion()(0) == 0.0);
  CHECK(unit_step_fusion()(7) == 1.0);
  CHECK(saturating_fusion(3)(5) == 3.0);
  CHECK(saturating_fusion(3)(2) == 2.0);
  CHECK(log2p1_fusion()(3) == doctest::Approx(2.0));
  CHECK(builtin_fusion("power").name() == "power:0.5");
  CHECK(builtin_fusion("saturating").name() == "saturating:2");
  CHECK(builtin_fusion("power:0.25")(16) == doctest::Approx(2.0));
  CHECK(builtin_fusion("saturating:4")(9) == 4.0);
  CHECK(builtin_fusion("identity").has_exact());
  CHECK(builtin_fusion("unit-step").has_exact());
  CHECK(builtin_fusion("power:1").has_exact());
  CHECK_FALSE(builtin_fusion("power:0.5").has_exact());
  CHECK_FALSE(builtin_fusion("log2p1").has_exact());
  CHECK(builtin_fusion("saturating:3").exact(7) == Rational(3));
  CHECK_THROWS_AS(builtin_fusion("cubic"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_fusion("power:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_fusion("power:0"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_fusion("saturating:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(identity_fusion()(-1), std::invalid_argument);
  CHECK_THROWS_AS(log2p1_fusion().exact(1), std::logic_error);
  CHECK(builtin_fusion_specs().size() == 5);
}

TEST_CASE("canonical validation") {
  for (const auto& spec : builtin_fusion_specs()) {
    CAPTURE(spec);
    CHECK(validate_canonical(builtin_fusion(spec), 64).ok);
  }
  FusionFunction square("square", [](std::int64_t x) { return double(x) * double(x); },
                        [](std::int64_t x) { return Rational(x * x); });
  auto r = validate_canonical(square, 10);
  CHECK_FALSE(r.ok);
  CHECK(r.property == "concave");
  CHECK(r.x == 1);

  FusionFunction shifted("shifted", [](std::int64_t x) { return double(x) + 1; });
  r = validate_canonical(shifted, 10);
  CHECK(r.property == "f0");

  FusionFunction bump("bump", [](std::int64_t x) { return x == 3 ? 1.0 : (x == 0 ? 0.0 : 2.0); });
  r = validate_canonical(bump, 10);
  CHECK(r.property == "monotone");
  CHECK(r.x == 2);
  CHECK_THROWS_AS(validate_canonical(identity_fusion(), 1), std::invalid_argument);
}

TEST_CASE("edge loads count each demand once per edge") {
  auto g = gen_path(3);
  DemandSet a{{0, 2}, {1, 2}};
  std::vector<Path> paths{make_path(g, {0, 1, 0, 1, 2}), make_path(g, {1, 2})};
  LoadMap m = edge_loads(g, paths, a);
  CHECK(m.load[*g.edge_between(0, 1)] == 1);
  CHECK(m.load[*g.edge_between(1, 2)] == 2);
  std::vector<Path> wrong{make_path(g, {0, 1}), make_path(g, {1, 2})};
  CHECK_THROWS_AS(edge_loads(g, wrong, a), std::invalid_argument);
  CHECK_THROWS_AS(edge_loads(g, std::vector<Path>{paths[0]}, a), std::invalid_argument);
}

TEST_CASE("total cost examples") {
  auto line = gen_path(4);
  DemandSet twice{{0, 3}, {0, 3}};
  std::vector<Path> same{shortest_path(line, 0, 3), shortest_path(line, 0, 3)};
  auto f = power_fusion(0.5);
  CHECK(total_cost(line, same, twice, f).total == doctest::Approx(3 * std::sqrt(2.0)));
  CHECK(total_cost(line, same, twice, f).total == doctest::Approx(oracle::cost(line, same, f)));

  auto c4 = gen_cycle(4);
  DemandSet a{{0, 1}, {2, 3}};
  std::vector<Path> direct{shortest_path(c4, 0, 1), shortest_path(c4, 2, 3)};
  auto step = unit_step_fusion();
  CostReport r = total_cost(c4, direct, a, step);
  CHECK(r.total == doctest::Approx(oracle::cost(c4, direct, step)));
  REQUIRE(r.exact_total);
  CHECK(*r.exact_total == Rational(static_cast<std::int64_t>(r.total)));
  CHECK(total_cost(c4, std::vector<Path>{}, DemandSet{}, step).total == 0.0);
}

TEST_CASE("total cost agrees with the direct definition") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = gen_triangulated(30, seed);
    DemandSet a = random_demands(g, 12, seed);
    std::vector<Path> paths;
    for (const Demand& d : a) {
      // Detour through a random node so paths overlap and sometimes repeat edges.
      auto mid = static_cast<NodeId>(draw(rng, 0, 29));
      Path p = shortest_path(g, d.s, mid);
      append_path(p, shortest_path(g, mid, d.t));
      paths.push_back(make_path(g, p.nodes));
    }
    for (const auto& spec : builtin_fusion_specs()) {
      auto f = builtin_fusion(spec);
      CHECK(total_cost(g, paths, a, f).total == doctest::Approx(oracle::cost(g, paths, f)));
    }
  }
}

TEST_CASE("demand files") {
  auto g = gen_grid(3, 3);
  DemandSet a = parse_demands("# pairs\n0 8\n2 6 3 # three copies\n\n", g);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == Demand{0, 8});
  CHECK(a[3] == Demand{2, 6});
  CHECK(parse_demands(format_demands(a), g) == a);
  auto line_of = [&](const char* text) -> std::size_t {
    try {
      parse_demands(text, g);
    } catch (const GraphError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("0 1\n0 9\n") == 2);
  CHECK(line_of("4 4\n") == 1);
  CHECK(line_of("0\n") == 1);
  CHECK(line_of("0 1 0\n") == 1);
  CHECK(line_of("0 1 2 x\n") == 1);
  DemandSet r = random_demands(g, 50, 3);
  CHECK(r.size() == 50);
  for (const Demand& d : r) CHECK(d.s != d.t);
  CHECK(random_demands(g, 50, 3) == r);
}

TEST_CASE("level costs of a single demand") {
  auto g = gen_grid(5, 5);
  auto h = hierarchy(g, 4);
  auto q = auxiliary_paths(h);
  DemandSet a{{0, 24}};
  auto routed = route_demands(h, q, a);
  LevelCosts lc = level_costs(h, routed, a, identity_fusion());
  REQUIRE(lc.src.size() == 3);
  CHECK(lc.decomposition_holds);
  CHECK(lc.decomposed == doctest::Approx(static_cast<double>(routed[0].path.length)));
  CHECK(lc.total.total <= lc.decomposed);
}

TEST_CASE("level costs when only the top level exists") {
  auto g = parse_graph("3 3\n0 1 1\n1 2 1\n0 2 1\nouter: 0 1 2\n");
  CoverHierarchy h(g, make_params(g), {});
  auto q = auxiliary_paths(h);
  DemandSet a{{1, 2}, {2, 1}};
  auto routed = route_demands(h, q, a);
  LevelCosts lc = level_costs(h, routed, a, identity_fusion());
  REQUIRE(lc.src.size() == 1);
  CHECK(lc.src[0] == 2.0);
  CHECK(lc.dst[0] == 2.0);
  CHECK(lc.total.total == 4.0);
  CHECK(lc.decomposition_holds);
}

TEST_CASE("level costs match brute-force subpath costs") {
  auto g = gen_grid(10, 10);
  auto h = hierarchy(g, 4);
  auto q = auxiliary_paths(h);
  DemandSet a = random_demands(g, 20, 5);
  auto routed = route_demands(h, q, a);
  for (const auto& spec : builtin_fusion_specs()) {
    auto f = builtin_fusion(spec);
    CAPTURE(spec);
    LevelCosts lc = level_costs(h, routed, a, f);
    CHECK(lc.decomposition_holds);
    CHECK(lc.total.total <= lc.decomposed + 1e-9);
    CHECK(lc.total.total == doctest::Approx(oracle::cost(g, plain_paths(routed), f)));
    for (int j = 0; j < h.kappa(); ++j) {
      CHECK(lc.src[static_cast<std::size_t>(j)] == doctest::Approx(oracle::cost(g, subpaths(g, routed, j, true), f)));
      CHECK(lc.dst[static_cast<std::size_t>(j)] == doctest::Approx(oracle::cost(g, subpaths(g, routed, j, false), f)));
    }
    CHECK(lc.exact_src.has_value() == f.has_exact());
  }
  DemandSet other{{0, 1}};
  CHECK_THROWS_AS(level_costs(h, routed, other, identity_fusion()), std::invalid_argument);
}

TEST_CASE("demands grouped by source cluster") {
  auto g = gen_grid(5, 5);
  auto h = hierarchy(g, 4);
  auto q = auxiliary_paths(h);
  DemandSet a{{0, 1}, {0, 2}};
  auto routed = route_demands(h, q, a);
  REQUIRE(routed[0].level == 2);
  REQUIRE(routed[1].level == 2);
  auto x1 = extract_XA(h, routed, a, 1);
  REQUIRE(x1.size() == 1);
  CHECK(x1.begin()->first == h.satisfying_cluster(1, 0));
  CHECK(x1.begin()->second == 2);
  CHECK(extract_XA(h, routed, a, 2).empty());
  CHECK(extract_XA(h, routed, a, 0).begin()->second == 2);
  CHECK(bound_Q(h, routed, a, identity_fusion(), 1) == doctest::Approx(2.0 * 18 * 24 * 4));
  CHECK(bound_Q(h, routed, a, identity_fusion(), 2) == 0.0);
  CHECK(leader_fan_out(h, routed, a, 1) == 1);
  CHECK(bound_small_levels(h, routed, a, power_fusion(0.5), 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(bound_Q(h, routed, a, identity_fusion(), 3), std::out_of_range);
  CHECK_THROWS_AS(bound_small_levels(h, routed, a, identity_fusion(), 2), std::out_of_range);
}

TEST_CASE("R bound on a long path") {
  auto g = gen_path(200);
  CoverHierarchy h(g, make_params(g), {});
  REQUIRE(h.kappa() == 3);
  auto q = auxiliary_paths(h);
  DemandSet a{{0, 150}, {1, 160}, {2, 170}};
  auto routed = route_demands(h, q, a);
  RBound r = bound_R(h, routed, a, identity_fusion(), 2);
  CHECK(r.r == doctest::Approx(144.0));
  CHECK(r.over_chi == doctest::Approx(8.0));
  double by_color = 0;
  for (const auto& [color, value] : r.by_color) by_color += value;
  CHECK(by_color == doctest::Approx(r.r));
  CHECK_THROWS_AS(bound_R(h, routed, a, identity_fusion(), 1), std::out_of_range);
  CHECK_THROWS_AS(bound_R(h, routed, a, identity_fusion(), 3), std::out_of_range);
}

TEST_CASE("ratio bound") {
  HierarchyParams p;
  p.kappa = 1;
  CHECK(ratio_bound(p) == 2985984.0);
  p.kappa = 3;
  CHECK(ratio_bound(p) == 8957952.0);
  p.kappa = 4;
  CHECK(ratio_bound(p) > 8957952.0);
}

TEST_CASE("source-side cost stays under Q") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto g = seed % 2 ? gen_triangulated(80, seed) : gen_grid(9, 9, WeightRule::Random, seed);
    auto h = hierarchy(g, 3);
    auto q = auxiliary_paths(h);
    DemandSet a = random_demands(g, 25, seed);
    auto routed = route_demands(h, q, a);
    for (const auto& spec : builtin_fusion_specs()) {
      auto f = builtin_fusion(spec);
      LevelCosts lc = level_costs(h, routed, a, f);
      for (int i = 0; i < h.kappa(); ++i) {
        CHECK(lc.src[static_cast<std::size_t>(i)] <= bound_Q(h, routed, a, f, i) * (1 + 1e-12));
        CHECK(leader_fan_out(h, routed, a, i) <= 18);
      }
    }
  }
}
