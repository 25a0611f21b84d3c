#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaussgraph/diagnostics.hpp"
#include "gaussgraph/linearize.hpp"

namespace gaussgraph {

// Prescribed curvature per interior node, optionally shifted by a term
// depending on the local value of f.
struct SolveTarget {
  ChartSpec chart;
  DomainPtr domain;
  std::vector<double> phi;  // interior order
  // returns {value, d value / d f} at (x, f)
  std::function<std::pair<double, double>(const Point&, double)> dependence;
  std::optional<BarrierPair> barrier;
  double gap = 0.0;

  static SolveTarget constant(const ChartSpec& chart, const DomainPtr& domain, double k);
  std::vector<double> values(const GraphFunction& f) const;
};

struct NewtonOptions {
  double tol = 1e-9;
  double kappa = 0.1;
  int max_iter = 100;
  int max_halvings = 10;
};

struct IterationRecord {
  int iter = 0;
  double tau = 0.0;
  double residual = 0.0;
  double margin = 0.0;
  double step = 0.0;  // accepted line-search fraction, 0 for the starting point
};

struct NewtonResult {
  GraphFunction f;
  int iterations = 0;
  double residual = 0.0;
  double margin = 0.0;
  std::vector<IterationRecord> log;
};

double residual_norm(const GraphFunction& f, const SolveTarget& target);

NewtonResult newton_solve(const GraphFunction& f_init, const SolveTarget& target, const NewtonOptions& opts = {},
                          double tau = 1.0);

enum class Predictor { Previous, Secant };

struct ContinuationOptions {
  double dtau_init = 0.25;
  double dtau_min = 1e-4;
  double dtau_max = 1.0;
  int easy_steps = 3;
  Predictor predictor = Predictor::Secant;
  double sandwich_tol = 1e-8;
  NewtonOptions newton;
};

struct PathRecord {
  double tau = 0.0;
  double residual = 0.0;
  double margin = 0.0;
  int newton_steps = 0;
};

// Path tau -> (1 - tau) start + tau goal.phi + perturbation. After a call,
// tau and f hold the last accepted point, also when the path is lost.
struct ContinuationState {
  SolveTarget goal;
  std::vector<double> start;
  std::vector<double> perturbation;  // empty means none
  double tau = 0.0;
  GraphFunction f;
  bool started = false;  // f already solves the path at tau
  std::vector<PathRecord> accepted;
  std::vector<IterationRecord> log;
  int newton_total = 0;

  SolveTarget at(double tau) const;
};

// Start of the default path: phi_0 + 0.05 (phi_hat - phi_0), or goal-based
// when there is no barrier.
std::vector<double> default_path_start(const SolveTarget& goal);

GraphFunction continuation_solve(ContinuationState& state, const ContinuationOptions& opts = {});

// Adds a smooth pseudo-random field of sup norm `magnitude` to the path.
ContinuationState perturb_rhs(const ContinuationState& state, double magnitude, std::uint64_t seed);
std::vector<double> smooth_random_field(const GridDomain& d, std::uint64_t seed);

struct UniquenessReport {
  struct Branch {
    bool ok = false;
    std::string error;
    NewtonResult result;
  };
  struct Pair {
    int a = 0, b = 0;
    double distance = 0.0;
  };
  std::vector<Branch> branches;
  std::vector<Pair> pairs;
  double max_distance = 0.0;
};
UniquenessReport uniqueness_probe(const SolveTarget& target, const std::vector<GraphFunction>& inits,
                                  const NewtonOptions& opts = {});

// a (|x - c|^2 - rho^2) over a ball, a (product of distances to the faces) on a box.
GraphFunction paraboloid(const DomainPtr& domain, double a);

double sup_distance(const GraphFunction& a, const GraphFunction& b);

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log);

}  // namespace gaussgraph
