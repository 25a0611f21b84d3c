#pragma once

// Ambient charts: coordinates (x_1..x_n, s) with the base hypersurface at s = 0
// and graphs written as s = f(x). Every chart metric is block diagonal
// (no x-s cross terms); the kernels rely on that.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gaussgraph/dual.hpp"
#include "gaussgraph/error.hpp"

namespace gaussgraph {

enum class ChartKind { EuclideanGraph, HyperbolicConformal, EpsilonFamily };

struct ChartSpec {
  ChartKind kind = ChartKind::EuclideanGraph;
  int n = 2;
  double offset = 0.0;   // HyperbolicConformal: signed distance D of the base equidistant
  double epsilon = 1.0;  // EpsilonFamily
  bool normalized = true;

  static ChartSpec euclidean(int n);
  static ChartSpec hyperbolic(int n, double offset);
  static ChartSpec epsilon_family(int n, double epsilon, bool normalized = true);

  int dim() const { return n + 1; }
  void validate() const;
};

// Compact textual identifier, e.g. "hyperbolic_conformal;n=2;D=0.5".
std::string chart_id(const ChartSpec& chart);
ChartSpec parse_chart_id(const std::string& id);

template <class T> using Tensor2 = std::array<std::array<T, 3>, 3>;
// gamma[a][b][c] is the symbol with upper index a and lower indices b, c.
template <class T> using Christoffel = std::array<Tensor2<T>, 3>;

double alpha_of_theta(double theta);  // inverse Gudermannian
double theta_of_alpha(double alpha);  // Gudermannian
double equidistant_curvature(double distance);

// Conformal angle of the base hypersurface, theta = -gd(D).
double base_theta(const ChartSpec& chart);

// Throws OutOfChart when (x, s) is outside the coordinate patch.
void check_in_chart(const ChartSpec& chart, const double* x, double s);

namespace detail {

inline double poincare_factor(int n, const double* x) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
  return 2.0 / (1.0 - r2);
}

template <class T> T warp_radius(const ChartSpec& c, double r) {
  return c.normalized ? T(std::sinh(c.epsilon * r) / c.epsilon) : T(std::sinh(c.epsilon * r));
}
inline double warp_radius_d(const ChartSpec& c, double r) {
  return c.normalized ? std::cosh(c.epsilon * r) : c.epsilon * std::cosh(c.epsilon * r);
}

}  // namespace detail

template <class T>
Tensor2<T> metric(const ChartSpec& chart, const double* x, const T& s) {
  using std::cos;
  using std::cosh;
  Tensor2<T> g{};
  for (auto& row : g)
    for (auto& v : row) v = T(0.0);
  const int n = chart.n;
  switch (chart.kind) {
    case ChartKind::EuclideanGraph:
      for (int a = 0; a <= n; ++a) g[a][a] = T(1.0);
      break;
    case ChartKind::HyperbolicConformal: {
      const T c = cos(s + base_theta(chart));
      const T conf = T(1.0) / (c * c);
      const double lam = detail::poincare_factor(n, x);
      for (int i = 0; i < n; ++i) g[i][i] = conf * (lam * lam);
      g[n][n] = conf;
      break;
    }
    case ChartKind::EpsilonFamily: {
      const T a = cosh(s * chart.epsilon);
      g[0][0] = a * a;
      if (n == 2) {
        const T S = detail::warp_radius<T>(chart, x[0]);
        g[1][1] = a * a * S * S;
      }
      g[n][n] = T(1.0);
      break;
    }
  }
  return g;
}

template <class T>
Christoffel<T> christoffel(const ChartSpec& chart, const double* x, const T& s) {
  using std::cosh;
  using std::sinh;
  using std::tan;
  Christoffel<T> G{};
  for (auto& m : G)
    for (auto& row : m)
      for (auto& v : row) v = T(0.0);
  const int n = chart.n;
  switch (chart.kind) {
    case ChartKind::EuclideanGraph:
      break;
    case ChartKind::HyperbolicConformal: {
      const double lam = detail::poincare_factor(n, x);
      double dl[2] = {0.0, 0.0};  // gradient of log(lambda)
      for (int i = 0; i < n; ++i) dl[i] = lam * x[i];
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double v = 0.0;
            if (i == k) v += dl[j];
            if (j == k) v += dl[i];
            if (i == j) v -= dl[k];
            G[k][i][j] = T(v);
          }
      const T t = tan(s + base_theta(chart));
      for (int i = 0; i < n; ++i) {
        G[n][i][i] = -t * (lam * lam);
        G[i][i][n] = t;
        G[i][n][i] = t;
      }
      G[n][n][n] = t;
      break;
    }
    case ChartKind::EpsilonFamily: {
      const double e = chart.epsilon;
      const T a = cosh(s * e);
      const T da = sinh(s * e) * e;
      const T ratio = da / a;
      G[n][0][0] = -a * da;
      G[0][0][n] = ratio;
      G[0][n][0] = ratio;
      if (n == 2) {
        const double S = detail::warp_radius<double>(chart, x[0]);
        const double dS = detail::warp_radius_d(chart, x[0]);
        G[0][1][1] = T(-S * dS);
        G[1][0][1] = T(dS / S);
        G[1][1][0] = T(dS / S);
        G[n][1][1] = -a * da * (S * S);
        G[1][1][n] = ratio;
        G[1][n][1] = ratio;
      }
      break;
    }
  }
  return G;
}

// Metric and symbols as flat row-major arrays over coordinates (x, s).
std::vector<double> metric_at(const ChartSpec& chart, std::span<const double> point);
Christoffel<double> christoffel_at(const ChartSpec& chart, std::span<const double> point);

// Difference between the chart connection and the product connection of
// (base slice metric) + ds^2, evaluated at a point.
struct ConnectionForm {
  int n = 0;
  Christoffel<double> omega{};
  // Omega(e_i, e_j), Omega(e_i, e_s), Omega(e_s, e_s) as coordinate vectors.
  std::array<double, 3> tangent_tangent(int i, int j) const;
  std::array<double, 3> tangent_vertical(int i) const;
  std::array<double, 3> vertical_vertical() const;
};
ConnectionForm connection_form_at(const ChartSpec& chart, std::span<const double> point);

// Riemann tensor R^a_{bcd} by fourth-order central differences of the
// closed-form symbols; R(X,Y)Z = R^a_{bcd} Z^b X^c Y^d.
using Riemann = std::array<Christoffel<double>, 3>;
Riemann riemann_at(const ChartSpec& chart, std::span<const double> point, double step = 1e-3);

double sectional_curvature(const ChartSpec& chart, std::span<const double> point,
                           std::span<const double> X, std::span<const double> Y, double step = 1e-3);

struct BaseHypersurface {
  int n = 0;
  double shape = 0.0;      // shape operator is shape * Id in an orthonormal frame
  double curvature = 0.0;  // phi_0 = det(A_0)^{1/n}
};
BaseHypersurface base_of(const ChartSpec& chart);

// Isometric model embedding used by the curvature oracle. Euclidean charts map
// into R^{n+1}; the hyperbolic and epsilon charts map onto a hyperboloid in
// Minkowski space with signature (-,+,...,+).
struct ModelPoint {
  int dim = 0;
  bool lorentzian = false;
  std::array<double, 4> p{};
};
ModelPoint embed(const ChartSpec& chart, const double* x, double s);
double model_inner(const ModelPoint& a, const std::array<double, 4>& u, const std::array<double, 4>& v);

}  // namespace gaussgraph
