#pragma once

#include <string>
#include <vector>

#include "gaussgraph/config.hpp"
#include "json.hpp"

namespace gaussgraph {

// Result of one solve, kept in memory for sweeps and tests.
struct SolveOutcome {
  bool ok = false;
  ErrorCode error = ErrorCode::InvalidArgument;
  std::string message;
  ChartSpec chart;
  GraphFunction f;  // solution, or last good iterate on failure
  std::optional<BarrierPair> barrier;
  std::vector<IterationRecord> log;
  std::vector<PathRecord> path;
  int newton_iterations = 0;
  double tau = 0.0;
  double residual = 0.0;
  double margin = 0.0;
  double seconds = 0.0;
};

// Runs the configured solve on a grid with `points` nodes per side
// (0 keeps domain.shape). Never throws for solver failures.
SolveOutcome run_solve(const RunConfig& c, int points = 0);

struct SweepRow {
  int points = 0;
  double h = 0.0;
  double error = 0.0;
  double order = 0.0;  // NaN for the first row
  SolveOutcome outcome;
};
struct SweepResult {
  std::string reference;  // "cap" or "finest"
  std::vector<SweepRow> rows;
};
SweepResult run_sweep(const RunConfig& c, int jobs = 1);

// Command entry points. Each writes its outputs under c.output.dir and
// returns the process exit code; `summary` receives the JSON summary.
int cmd_curvature(const RunConfig& c, nlohmann::json* summary = nullptr);
int cmd_solve(const RunConfig& c, nlohmann::json* summary = nullptr);
int cmd_validate(const RunConfig& c, nlohmann::json* summary = nullptr);
int cmd_sweep(const RunConfig& c, int jobs = 1, nlohmann::json* summary = nullptr);

// Exit codes besides the per-error ones.
constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 1;

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace gaussgraph
