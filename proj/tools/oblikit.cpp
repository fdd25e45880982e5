// Command-line front end: generators, cover/hierarchy/route/eval commands and
// the experiment sweep that writes CSV.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oblikit/cover.hpp"
#include "oblikit/fusion.hpp"
#include "oblikit/generators.hpp"
#include "oblikit/graph.hpp"
#include "oblikit/hierarchy.hpp"
#include "oblikit/oracle.hpp"
#include "oblikit/pipeline.hpp"

using namespace oblikit;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::int64_t base = 0;  // 0 keeps the default of 96
  std::string fusion = "power:0.5";
  std::size_t budget_nodes = OracleBudget{}.max_nodes;
  std::size_t budget_demands = OracleBudget{}.max_demands;
  std::string out;
};

Globals globals;

// Writes to --out when given, stdout otherwise.
void emit(const std::string& text) {
  if (globals.out.empty() || globals.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(globals.out);
  if (!f) throw std::runtime_error("cannot write " + globals.out);
  f << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ParamOverrides overrides() {
  ParamOverrides ov;
  if (globals.base != 0) ov.base = globals.base;
  return ov;
}

OracleBudget budget() {
  OracleBudget b;
  b.max_nodes = globals.budget_nodes;
  b.max_demands = globals.budget_demands;
  return b;
}

LevelRule parse_rule(const std::string& s) {
  if (s == "twice") return LevelRule::TwiceDistance;
  if (s == "half") return LevelRule::HalfDistance;
  throw std::invalid_argument("level rule must be 'twice' or 'half'");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

int run_validate(const WeightedPlanarGraph& g, const std::vector<Weight>& gammas, const std::string& cover_file,
                 Weight cover_gamma) {
  HierarchyParams p;
  bool ok = true;
  std::ostringstream out;
  auto check = [&](const Cover& z, const std::string& what) {
    CoverReport r = validate_cover(g, z);
    bool pass = r.satisfies(static_cast<std::size_t>(p.beta), p.sigma, p.chi);
    out << what << " gamma " << z.gamma << ": " << (pass ? "ok" : "VIOLATION") << '\n' << describe(r);
    ok = ok && pass;
  };
  if (!cover_file.empty()) {
    check(parse_cover(slurp(cover_file), cover_gamma), "cover " + cover_file);
  } else {
    for (Weight gamma : gammas) check(planar_cover(g, gamma), "planar cover");
  }
  emit(out.str());
  return ok ? 0 : 1;
}

std::string eval_report(const CoverHierarchy& h, const AuxiliaryPathSet& q, const DemandSet& a,
                        const FusionFunction& f) {
  auto routed = route_demands(h, q, a);
  LevelCosts lc = level_costs(h, routed, a, f);
  std::ostringstream out;
  out << "f " << f.name() << " demands " << a.size() << '\n';
  out << "C " << fmt(lc.total.total) << '\n';
  out << "level gamma Ci_src Ci_dst Q_i R_i fan_out\n";
  for (int i = 0; i < h.kappa(); ++i) {
    out << i << ' ' << (i == 0 ? 0 : h.params().gamma(i)) << ' ' << fmt(lc.src[static_cast<std::size_t>(i)]) << ' '
        << fmt(lc.dst[static_cast<std::size_t>(i)]) << ' ' << fmt(bound_Q(h, routed, a, f, i)) << ' ';
    if (i >= 2) {
      out << fmt(bound_R(h, routed, a, f, i).r);
    } else {
      out << fmt(bound_small_levels(h, routed, a, f, i));
    }
    out << ' ' << leader_fan_out(h, routed, a, i) << '\n';
  }
  out << "decomposed " << fmt(lc.decomposed) << " (" << (lc.decomposition_holds ? "holds" : "VIOLATED") << ")\n";
  out << "ratio bound " << fmt(ratio_bound(h.params())) << '\n';
  return out.str();
}

std::string curve(const std::vector<std::string>& files) {
  std::map<long long, double> worst;
  for (const std::string& file : files) {
    std::istringstream in(slurp(file));
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream row(line);
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (header.empty()) {
        header = cells;
        continue;
      }
      auto col = [&](const std::string& name) -> std::string {
        auto it = std::find(header.begin(), header.end(), name);
        auto k = static_cast<std::size_t>(it - header.begin());
        return it == header.end() || k >= cells.size() ? "" : cells[k];
      };
      if (col("level") != "summary" || col("ratio").empty()) continue;
      long long n = std::stoll(col("n"));
      double r = std::stod(col("ratio"));
      worst[n] = std::max(worst.count(n) ? worst[n] : 0.0, r);
    }
  }
  std::ostringstream out;
  out << "# n max_ratio\n";
  for (const auto& [n, r] : worst) out << n << ' ' << fmt(r) << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oblivious buy-at-bulk routing on planar graphs"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", globals.seed, "random seed");
  app.add_option("--base", globals.base, "hierarchy base b (0 keeps the default 96)");
  app.add_option("--fusion", globals.fusion, "identity | power:<a> | unit-step | saturating:<c> | log2p1");
  app.add_option("--budget-nodes", globals.budget_nodes, "oracle node budget");
  app.add_option("--budget-demands", globals.budget_demands, "oracle demand budget");
  app.add_option("--out", globals.out, "output file (default stdout)");
  app.fallthrough();

  int rows = 0, cols = 0, n = 0;
  bool random_weights = false;
  auto* gen_grid_cmd = app.add_subcommand("gen-grid", "write a grid graph");
  gen_grid_cmd->add_option("--rows", rows)->required();
  gen_grid_cmd->add_option("--cols", cols)->required();
  gen_grid_cmd->add_flag("--random-weights", random_weights, "weights uniform in [1,10]");

  auto* gen_tri_cmd = app.add_subcommand("gen-tri", "write a random triangulation");
  gen_tri_cmd->add_option("-n,--nodes", n)->required();

  std::string graph_file, demand_file;
  std::size_t count = 10;
  auto* demands_cmd = app.add_subcommand("demands", "write uniform random demands");
  demands_cmd->add_option("--graph", graph_file)->required();
  demands_cmd->add_option("--count", count);

  Weight gamma = 1;
  auto* cover_cmd = app.add_subcommand("cover", "build and print a planar cover");
  cover_cmd->add_option("--graph", graph_file)->required();
  cover_cmd->add_option("--gamma", gamma)->required();

  auto* hierarchy_cmd = app.add_subcommand("hierarchy", "summarize the cover hierarchy");
  hierarchy_cmd->add_option("--graph", graph_file)->required();

  std::vector<NodeId> pair;
  bool all_pairs = false;
  std::string rule = "twice";
  auto* route_cmd = app.add_subcommand("route", "print fixed paths");
  route_cmd->add_option("--graph", graph_file)->required();
  route_cmd->add_option("--pair", pair, "u v")->expected(2);
  route_cmd->add_flag("--all", all_pairs, "every ordered pair");
  route_cmd->add_option("--level-rule", rule, "twice | half");

  auto* eval_cmd = app.add_subcommand("eval", "cost and level decomposition of a demand file");
  eval_cmd->add_option("--graph", graph_file)->required();
  eval_cmd->add_option("--demands", demand_file)->required();
  eval_cmd->add_option("--level-rule", rule, "twice | half");

  auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum for a small instance");
  oracle_cmd->add_option("--graph", graph_file)->required();
  oracle_cmd->add_option("--demands", demand_file)->required();

  ExperimentSpec spec;
  std::string grid_size;
  int tri_n = 0;
  std::uint64_t graph_seed = 1;
  bool no_timing = false;
  auto* exp_cmd = app.add_subcommand("experiment", "run the pipeline and write CSV");
  exp_cmd->add_option("--grid", grid_size, "RxC grid");
  exp_cmd->add_option("--tri", tri_n, "triangulation size");
  exp_cmd->add_option("--graph", graph_file, "graph file");
  exp_cmd->add_flag("--random-weights", random_weights);
  exp_cmd->add_option("--graph-seed", graph_seed, "generator seed");
  exp_cmd->add_option("--demands", spec.demands, "demands per repetition");
  exp_cmd->add_option("--reps", spec.repetitions);
  exp_cmd->add_flag("--oracle", spec.oracle, "compute C* exactly");
  exp_cmd->add_flag("--no-timing", no_timing, "write elapsed_ms as 0");
  exp_cmd->add_option("--instance", spec.instance, "instance label");
  exp_cmd->add_option("--level-rule", rule, "twice | half");

  std::vector<Weight> gammas{1, 2, 4, 8};
  std::string cover_file;
  auto* validate_cmd = app.add_subcommand("validate", "check planar covers (or a cover file)");
  validate_cmd->add_option("--graph", graph_file)->required();
  validate_cmd->add_option("--gammas", gammas)->delimiter(',');
  validate_cmd->add_option("--cover", cover_file, "validate this cover instead");
  validate_cmd->add_option("--gamma", gamma, "gamma of --cover");

  std::vector<std::string> csv_files;
  auto* curve_cmd = app.add_subcommand("curve", "max ratio per n from experiment CSVs (gnuplot data)");
  curve_cmd->add_option("csv", csv_files)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_grid_cmd) {
      emit(format_graph(gen_grid(rows, cols, random_weights ? WeightRule::Random : WeightRule::Unit, globals.seed)));
    } else if (*gen_tri_cmd) {
      emit(format_graph(gen_triangulated(n, globals.seed)));
    } else if (*demands_cmd) {
      emit(format_demands(random_demands(read_graph_file(graph_file), count, globals.seed)));
    } else if (*cover_cmd) {
      auto g = read_graph_file(graph_file);
      Cover z = planar_cover(g, gamma);
      std::cerr << describe(validate_cover(g, z));
      emit(format_cover(z));
    } else if (*hierarchy_cmd) {
      auto g = read_graph_file(graph_file);
      emit(summarize(build_hierarchy(g, make_params(g, overrides()))));
    } else if (*route_cmd) {
      auto g = read_graph_file(graph_file);
      HierarchyOptions opts;
      opts.level_rule = parse_rule(rule);
      auto h = build_hierarchy(g, make_params(g, overrides()), opts);
      auto q = auxiliary_paths(h);
      std::string out;
      if (all_pairs) {
        PathTable table = find_all_paths(h, q);
        for (NodeId u = 0; u < g.node_count(); ++u) {
          for (NodeId v = 0; v < g.node_count(); ++v) {
            if (u != v) out += format_path_line(table.at(u, v)) + '\n';
          }
        }
      } else if (pair.size() == 2) {
        out = format_path_line(find_path(h, q, pair[0], pair[1])) + '\n';
      } else {
        throw std::invalid_argument("route needs --pair u v or --all");
      }
      emit(out);
    } else if (*eval_cmd) {
      auto g = read_graph_file(graph_file);
      HierarchyOptions opts;
      opts.level_rule = parse_rule(rule);
      auto h = build_hierarchy(g, make_params(g, overrides()), opts);
      auto q = auxiliary_paths(h);
      emit(eval_report(h, q, parse_demands(slurp(demand_file), g), builtin_fusion(globals.fusion)));
    } else if (*oracle_cmd) {
      auto g = read_graph_file(graph_file);
      auto a = parse_demands(slurp(demand_file), g);
      auto f = builtin_fusion(globals.fusion);
      auto cache = OracleCache::from_environment();
      OracleResult r = cached_optimal_cost(g, a, f, budget(), cache ? &*cache : nullptr);
      std::ostringstream out;
      out << "C* " << fmt(r.cost) << '\n';
      for (std::size_t k = 0; k < r.witness.size(); ++k) {
        out << "witness " << a[k].s << ' ' << a[k].t << " nodes";
        for (NodeId v : r.witness[k].nodes) out << ' ' << v;
        out << '\n';
      }
      out << "baseline " << fmt(baseline_independent_shortest(g, a, f).total) << '\n';
      emit(out.str());
    } else if (*exp_cmd) {
      int sources = !grid_size.empty() + (tri_n > 0) + !graph_file.empty();
      if (sources != 1) throw std::invalid_argument("experiment needs exactly one of --grid, --tri, --graph");
      if (!grid_size.empty()) {
        auto x = grid_size.find('x');
        if (x == std::string::npos) throw std::invalid_argument("--grid expects RxC");
        spec.graph.kind = GraphSource::Kind::Grid;
        spec.graph.rows = std::stoi(grid_size.substr(0, x));
        spec.graph.cols = std::stoi(grid_size.substr(x + 1));
        spec.graph.weights = random_weights ? WeightRule::Random : WeightRule::Unit;
      } else if (tri_n > 0) {
        spec.graph.kind = GraphSource::Kind::Triangulated;
        spec.graph.n = tri_n;
      } else {
        spec.graph.kind = GraphSource::Kind::File;
        spec.graph.path = graph_file;
      }
      spec.graph.seed = graph_seed;
      spec.overrides = overrides();
      spec.fusion = globals.fusion;
      spec.seed = globals.seed;
      spec.budget = budget();
      spec.record_timing = !no_timing;
      spec.level_rule = parse_rule(rule);
      auto cache = OracleCache::from_environment();
      PipelineResult result = run_pipeline(spec, cache ? &*cache : nullptr);
      std::cerr << result.report;
      emit(to_csv(result.rows));
      return result.all_pass ? 0 : 1;
    } else if (*validate_cmd) {
      return run_validate(read_graph_file(graph_file), gammas, cover_file, gamma);
    } else if (*curve_cmd) {
      emit(curve(csv_files));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
