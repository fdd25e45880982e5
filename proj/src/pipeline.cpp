#include "oblikit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oblikit {

namespace {

constexpr double kTolerance = 1e-9;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : ""; }

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

bool leq(double a, double b) { return a <= b + kTolerance * std::max(1.0, std::abs(b)); }

}  // namespace

std::string GraphSource::label() const {
  switch (kind) {
    case Kind::File: return path;
    case Kind::Grid:
      return "grid" + std::to_string(rows) + "x" + std::to_string(cols) +
             (weights == WeightRule::Random ? "-w" + std::to_string(seed) : "");
    case Kind::Triangulated: return "tri" + std::to_string(n) + "-s" + std::to_string(seed);
  }
  return "graph";
}

WeightedPlanarGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read graph file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

WeightedPlanarGraph load_graph(const GraphSource& src) {
  switch (src.kind) {
    case GraphSource::Kind::File: return read_graph_file(src.path);
    case GraphSource::Kind::Grid: return gen_grid(src.rows, src.cols, src.weights, src.seed);
    case GraphSource::Kind::Triangulated: return gen_triangulated(src.n, src.seed);
  }
  throw std::logic_error("unknown graph source");
}

std::string csv_header() {
  return "instance,n,m,D,kappa,base,level,gamma,f,demands,C,Ci_src,Ci_dst,Q_i,R_i_over_chi,C_star,ratio,"
         "ratio_bound,pass_eq1,pass_lemma6,pass_lemma4,elapsed_ms";
}

std::string PipelineRow::csv() const {
  std::ostringstream out;
  out << instance << ',' << n << ',' << m << ',' << diameter << ',' << kappa << ',' << base << ',' << level << ','
      << (gamma ? std::to_string(*gamma) : "") << ',' << fusion << ',' << demands << ',' << opt(cost) << ','
      << opt(ci_src) << ',' << opt(ci_dst) << ',' << opt(q_i) << ',' << opt(r_i_over_chi) << ',' << opt(c_star)
      << ',' << opt(ratio) << ',' << opt(ratio_bound) << ',' << pass_eq1 << ',' << pass_lemma6 << ','
      << pass_lemma4 << ',' << num(elapsed_ms);
  return out.str();
}

std::string to_csv(const std::vector<PipelineRow>& rows, bool header) {
  std::string out;
  if (header) out += csv_header() + '\n';
  for (const PipelineRow& r : rows) out += r.csv() + '\n';
  return out;
}

PipelineResult run_pipeline(const ExperimentSpec& spec, const OracleCache* cache) {
  if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  const FusionFunction f = builtin_fusion(spec.fusion);
  const std::string label = spec.instance.empty() ? spec.graph.label() : spec.instance;
  PipelineResult result;
  std::ostringstream report;

  for (int rep = 0; rep < spec.repetitions; ++rep) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    PipelineRow base;
    base.instance = label + "/rep" + std::to_string(rep);
    base.fusion = f.name();
    base.demands = spec.demands;
    std::vector<PipelineRow> rows;
    try {
      const WeightedPlanarGraph g = load_graph(spec.graph);
      base.n = g.node_count();
      base.m = g.edge_count();
      HierarchyParams params = make_params(g, spec.overrides);
      base.diameter = params.diameter;
      base.kappa = params.kappa;
      base.base = params.base;
      base.ratio_bound = ratio_bound(params);

      HierarchyOptions options;
      options.level_rule = spec.level_rule;
      const CoverHierarchy h(g, params, options);
      const AuxiliaryPathSet q = auxiliary_paths(h);
      const DemandSet a = random_demands(g, spec.demands, spec.seed + static_cast<std::uint64_t>(rep));
      const auto routed = route_demands(h, q, a);
      const LevelCosts lc = level_costs(h, routed, a, f);
      base.cost = lc.total.total;

      std::optional<double> c_star;
      if (spec.oracle) {
        OracleResult opt = cached_optimal_cost(g, a, f, spec.budget, cache);
        c_star = opt.cost;
        base.c_star = opt.cost;
        if (lc.total.exact_total && opt.exact_cost) {
          base.ratio = *opt.exact_cost == Rational(0)
                           ? 1.0
                           : boost::rational_cast<double>(*lc.total.exact_total / *opt.exact_cost);
        } else {
          base.ratio = opt.cost == 0 ? 1.0 : lc.total.total / opt.cost;
        }
      }

      bool lemma6 = true, lemma4 = true;
      for (int i = 0; i < h.kappa(); ++i) {
        PipelineRow row = base;
        row.level = std::to_string(i);
        row.gamma = i == 0 ? 0 : params.gamma(i);
        row.ci_src = lc.src[static_cast<std::size_t>(i)];
        row.ci_dst = lc.dst[static_cast<std::size_t>(i)];
        row.q_i = bound_Q(h, routed, a, f, i);
        bool ok6 = leq(*row.ci_src, *row.q_i) &&
                   leader_fan_out(h, routed, a, i) <= static_cast<std::size_t>(params.beta);
        row.pass_lemma6 = verdict(ok6);
        lemma6 = lemma6 && ok6;
        if (i <= 1) {
          row.r_i_over_chi = bound_small_levels(h, routed, a, f, i);
        } else {
          row.r_i_over_chi = bound_R(h, routed, a, f, i).over_chi;
        }
        if (c_star) {
          bool ok4 = *row.r_i_over_chi <= *c_star + kTolerance;
          row.pass_lemma4 = verdict(ok4);
          lemma4 = lemma4 && ok4;
        }
        rows.push_back(std::move(row));
      }

      PipelineRow summary = base;
      summary.level = "summary";
      double src = 0, dst = 0;
      for (double x : lc.src) src += x;
      for (double x : lc.dst) dst += x;
      summary.ci_src = src;
      summary.ci_dst = dst;
      summary.pass_eq1 = verdict(lc.decomposition_holds);
      summary.pass_lemma6 = verdict(lemma6);
      if (c_star) summary.pass_lemma4 = verdict(lemma4);
      rows.push_back(std::move(summary));

      const PipelineRow& s = rows.back();
      report << s.instance << ": C=" << num(*s.cost);
      if (s.c_star) report << " C*=" << num(*s.c_star) << " ratio=" << num(*s.ratio);
      report << " eq1=" << s.pass_eq1 << " lemma6=" << s.pass_lemma6 << " lemma4=" << s.pass_lemma4 << '\n';
      bool ok = lc.decomposition_holds && lemma6 && (!c_star || lemma4);
      if (s.ratio) {
        bool ratio_ok = *s.ratio >= 1.0 - kTolerance && *s.ratio <= *s.ratio_bound;
        if (!ratio_ok) report << s.instance << ": ratio outside [1, " << num(*s.ratio_bound) << "]\n";
        ok = ok && ratio_ok;
      }
      result.all_pass = result.all_pass && ok;
    } catch (const std::exception& e) {
      rows.clear();
      PipelineRow row = base;
      row.level = "error";
      row.pass_eq1 = row.pass_lemma6 = row.pass_lemma4 = "fail";
      rows.push_back(std::move(row));
      report << base.instance << ": error: " << e.what() << '\n';
      result.all_pass = false;
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    for (PipelineRow& row : rows) row.elapsed_ms = spec.record_timing ? ms : 0.0;
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  result.report = report.str();
  return result;
}

}  // namespace oblikit
