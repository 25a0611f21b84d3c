#pragma once

#include <string>
#include <vector>

#include "gaussgraph/kernel.hpp"

namespace gaussgraph {

// Lower barrier f_hat with curvature bound phi_hat and gap eps; the upper
// barrier is always the base (f = 0, curvature phi_0).
struct BarrierPair {
  GraphFunction lower;
  double lower_curvature = 0.0;
  double gap = 0.0;
  double base_curvature = 0.0;
  std::string tag;  // "sphere_cap", "user", ...
};

struct CapOptions {
  int steps = 4000;          // RK4 steps over the radius
  double start_fraction = 1e-4;
  int scan = 64;             // coarse samples of the centre value before bisection
};

// Radial profile of a constant-curvature cap over a ball centred at the
// origin (any centre for the Euclidean chart), vanishing on the sphere.
struct CapProfile {
  double center_value = 0.0;  // f at the centre
  double radius = 0.0;
  std::vector<double> r, f, df;  // RK4 nodes
  double operator()(double rho) const;
};
CapProfile cap_profile(const ChartSpec& chart, const DomainPtr& ball, double k, const CapOptions& opts = {});
GraphFunction sphere_cap_barrier(const ChartSpec& chart, const DomainPtr& ball, double k,
                                 const CapOptions& opts = {});
BarrierPair make_cap_barrier(const ChartSpec& chart, const DomainPtr& ball, double k, double gap);

// Checks that the lower barrier really has curvature >= phi_hat at every node.
bool barrier_curvature_holds(const BarrierPair& b, const ChartSpec& chart, double tol = 0.0);

struct SandwichReport {
  bool pass = true;
  bool order_ok = true;      // f_hat - tol <= f <= tol
  bool curvature_ok = true;  // phi_0 <= phi <= phi_hat - eps
  std::vector<int> below_barrier;  // nodes with f < f_hat - tol
  std::vector<int> above_base;     // nodes with f > tol
  double worst = 0.0;              // largest violation
};
// phi_min/phi_max bound the target the graph solves; pass NaN to skip.
SandwichReport validate_sandwich(const GraphFunction& f, const BarrierPair& b, double phi_min, double phi_max,
                                 double tol = 1e-12);

struct EstimateReport {
  double interior_sup = 0.0;   // sup |A| away from the boundary ring
  double boundary_sup = 0.0;   // sup |A| on boundary-adjacent nodes
  double sup = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::vector<std::array<double, 2>> eigenvalues;  // interior order
  double lipschitz = 0.0;      // max coordinate gradient norm of f
  Point weight_point{};        // boundary point P for delta(x) = d(x, P)^2
  std::vector<double> weight;  // delta per interior node
  double weighted_sup = 0.0;   // sup delta |A|
};
EstimateReport curvature_norm_report(const GraphFunction& f, const ChartSpec& chart);

struct PogorelovReport {
  double sup = 0.0;
  int argmax_node = -1;
  double alpha = 1.0;
  int support_size = 0;
};
// Phi = alpha log(cut) - <X, N> + log |A| over nodes with cut > 0. X is the
// unit chart vertical unless a coordinate direction (x..., s) is given.
PogorelovReport pogorelov_monitor(const GraphFunction& f, const ChartSpec& chart, double alpha,
                                  const std::vector<double>& cutoff, double eps_x = 1e-3,
                                  const std::vector<double>& direction = {});

// Smooth cutoff: 1 on the inner part of the domain, 0 outside fraction * size.
std::vector<double> radial_cutoff(const GridDomain& d, double inner_fraction, double outer_fraction);

// (a+b)^2 <= (1+lambda) a^2 + (1+1/lambda) b^2 for lambda > 0.
bool square_split_holds(double a, double b, double lambda);

}  // namespace gaussgraph
