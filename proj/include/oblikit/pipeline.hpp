#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oblikit/fusion.hpp"
#include "oblikit/generators.hpp"
#include "oblikit/hierarchy.hpp"
#include "oblikit/oracle.hpp"

namespace oblikit {

struct GraphSource {
  enum class Kind { File, Grid, Triangulated };
  Kind kind = Kind::Grid;
  std::string path;  // Kind::File
  int rows = 10;     // Kind::Grid
  int cols = 10;
  WeightRule weights = WeightRule::Unit;
  int n = 50;  // Kind::Triangulated
  std::uint64_t seed = 1;

  std::string label() const;
};

WeightedPlanarGraph load_graph(const GraphSource& src);
WeightedPlanarGraph read_graph_file(const std::string& path);

struct ExperimentSpec {
  std::string instance;  // defaults to the source label
  GraphSource graph;
  ParamOverrides overrides;
  LevelRule level_rule = LevelRule::TwiceDistance;
  std::string fusion = "power:0.5";
  std::size_t demands = 20;
  std::uint64_t seed = 1;  // demand seed for repetition r is seed + r
  int repetitions = 1;
  bool oracle = false;
  OracleBudget budget;
  // When false, elapsed_ms is written as 0 so repeated runs compare equal.
  bool record_timing = true;
};

inline constexpr int kCsvSchemaVersion = 1;

// Column names, comma separated, no trailing newline.
std::string csv_header();

// One CSV line. Level rows carry the per-level decomposition and bounds; the
// summary row ("summary" in the level column) carries the totals and the
// overall verdicts; an "error" row records an aborted repetition.
struct PipelineRow {
  std::string instance;
  NodeId n = 0;
  std::size_t m = 0;
  Weight diameter = 0;
  int kappa = 0;
  std::int64_t base = 0;
  std::string level;
  std::optional<Weight> gamma;
  std::string fusion;
  std::size_t demands = 0;
  std::optional<double> cost;
  std::optional<double> ci_src;
  std::optional<double> ci_dst;
  std::optional<double> q_i;
  std::optional<double> r_i_over_chi;
  std::optional<double> c_star;
  std::optional<double> ratio;
  std::optional<double> ratio_bound;
  std::string pass_eq1 = "na";
  std::string pass_lemma6 = "na";
  std::string pass_lemma4 = "na";
  double elapsed_ms = 0.0;

  std::string csv() const;
};

struct PipelineResult {
  std::vector<PipelineRow> rows;
  std::string report;
  bool all_pass = true;  // no "fail" verdict and no error rows
};

PipelineResult run_pipeline(const ExperimentSpec& spec, const OracleCache* cache = nullptr);

std::string to_csv(const std::vector<PipelineRow>& rows, bool header = true);

}  // namespace oblikit
