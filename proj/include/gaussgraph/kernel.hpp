#pragma once

// Gauss curvature of a graph s = f(x) in a chart, from the local jet
// (f, grad f, Hess f). The same templated kernel serves double evaluation and
// forward-mode differentiation.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gaussgraph/geometry.hpp"
#include "gaussgraph/grid.hpp"

namespace gaussgraph {

// Hessian components are ordered xx, xy, yy (n = 1 uses xx only).
template <class T> struct Jet {
  T f{};
  std::array<T, 2> p{};
  std::array<T, 3> H{};
};

enum class KernelPath { Closed, Generic };

// Coordinate quantities at a point of the graph:
//   M  second fundamental form of the graph scaled by |grad F|, F = f - s
//   G  induced metric
// K = sign(det M) |det M / det G|^{1/n} / |grad F|.
template <class T> struct LocalGeometry {
  int n = 0;
  std::array<std::array<T, 2>, 2> M{};
  std::array<std::array<T, 2>, 2> G{};
  T grad_norm{};
  T detM{}, detG{};
};

namespace detail {

template <class T> T det_n(const std::array<std::array<T, 2>, 2>& A, int n) {
  return n == 1 ? A[0][0] : A[0][0] * A[1][1] - A[0][1] * A[1][0];
}

template <class T> T hess_entry(const std::array<T, 3>& H, int i, int j) {
  if (i == 0 && j == 0) return H[0];
  if (i == 1 && j == 1) return H[2];
  return H[1];
}

template <class T> Tensor2<T> inverse3(const Tensor2<T>& g, int d) {
  Tensor2<T> r{};
  for (auto& row : r)
    for (auto& v : row) v = T(0.0);
  if (d == 2) {
    const T det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    r[0][0] = g[1][1] / det;
    r[1][1] = g[0][0] / det;
    r[0][1] = -g[0][1] / det;
    r[1][0] = -g[1][0] / det;
    return r;
  }
  const T c00 = g[1][1] * g[2][2] - g[1][2] * g[2][1];
  const T c01 = g[1][2] * g[2][0] - g[1][0] * g[2][2];
  const T c02 = g[1][0] * g[2][1] - g[1][1] * g[2][0];
  const T det = g[0][0] * c00 + g[0][1] * c01 + g[0][2] * c02;
  r[0][0] = c00 / det;
  r[1][0] = c01 / det;
  r[2][0] = c02 / det;
  r[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / det;
  r[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / det;
  r[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / det;
  r[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / det;
  r[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / det;
  r[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / det;
  return r;
}

}  // namespace detail

template <class T>
LocalGeometry<T> local_geometry(const ChartSpec& chart, const double* x, const Jet<T>& j,
                                KernelPath path = KernelPath::Closed) {
  using std::cos;
  using std::sqrt;
  using std::tan;
  const int n = chart.n;
  LocalGeometry<T> out;
  out.n = n;
  for (auto* A : {&out.M, &out.G})
    for (auto& row : *A)
      for (auto& v : row) v = T(0.0);

  if (path == KernelPath::Closed && chart.kind == ChartKind::EuclideanGraph) {
    T pp = T(0.0);
    for (int i = 0; i < n; ++i) pp += j.p[i] * j.p[i];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        out.M[a][b] = detail::hess_entry(j.H, a, b);
        out.G[a][b] = j.p[a] * j.p[b] + (a == b ? 1.0 : 0.0);
      }
    out.grad_norm = sqrt(pp + 1.0);
  } else if (path == KernelPath::Closed && chart.kind == ChartKind::HyperbolicConformal) {
    const double lam = detail::poincare_factor(n, x);
    const double l2 = lam * lam;
    double dl[2] = {0.0, 0.0};
    for (int i = 0; i < n; ++i) dl[i] = lam * x[i];
    const T th = j.f + base_theta(chart);
    const T t = tan(th);
    const T c = cos(th);
    T pp = T(0.0);
    for (int i = 0; i < n; ++i) pp += j.p[i] * j.p[i];
    // g0-covariant Hessian minus tan(theta) (df df + g0)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        T gp = T(0.0);
        for (int k = 0; k < n; ++k) {
          double gam = 0.0;
          if (a == k) gam += dl[b];
          if (b == k) gam += dl[a];
          if (a == b) gam -= dl[k];
          gp += j.p[k] * gam;
        }
        out.M[a][b] = detail::hess_entry(j.H, a, b) - gp - t * (j.p[a] * j.p[b] + (a == b ? l2 : 0.0));
        out.G[a][b] = (j.p[a] * j.p[b] + (a == b ? l2 : 0.0)) / (c * c);
      }
    out.grad_norm = c * sqrt(pp / l2 + 1.0);
  } else {
    const int d = n + 1;
    const auto g = metric<T>(chart, x, j.f);
    const auto gam = christoffel<T>(chart, x, j.f);
    const auto gi = detail::inverse3(g, d);
    std::array<T, 3> dF{};
    for (int a = 0; a < n; ++a) dF[a] = j.p[a];
    dF[n] = T(-1.0);
    T norm2 = T(0.0);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) norm2 += gi[a][b] * dF[a] * dF[b];
    out.grad_norm = sqrt(norm2);
    // contracted symbols: C_ab = Gamma^c_ab dF_c
    Tensor2<T> C{};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        T acc = T(0.0);
        for (int c = 0; c < d; ++c) acc += gam[c][a][b] * dF[c];
        C[a][b] = acc;
      }
    // tangent vectors e_i + p_i e_s
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        T Gik = g[i][k] + j.p[k] * g[i][n] + j.p[i] * g[n][k] + j.p[i] * j.p[k] * g[n][n];
        T Cik = C[i][k] + j.p[k] * C[i][n] + j.p[i] * C[n][k] + j.p[i] * j.p[k] * C[n][n];
        out.G[i][k] = Gik;
        out.M[i][k] = detail::hess_entry(j.H, i, k) - Cik;
      }
  }
  out.detM = detail::det_n(out.M, n);
  out.detG = detail::det_n(out.G, n);
  return out;
}

template <class T> T curvature_of(const LocalGeometry<T>& L) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  const T r = abs(L.detM / L.detG);
  const T root = L.n == 1 ? r : sqrt(r);
  const double sgn = value_of(L.detM) < 0.0 ? -1.0 : 1.0;
  return root * sgn / L.grad_norm;
}

template <class T> bool positive_definite(const std::array<std::array<T, 2>, 2>& M, int n) {
  if (n == 1) return value_of(M[0][0]) > 0.0;
  return value_of(M[0][0]) > 0.0 && value_of(M[0][0] * M[1][1] - M[0][1] * M[1][0]) > 0.0;
}

// Per-node frame data that depends only on the base point.
struct NodeFrame {
  double c = 1.0;                          // sqrt(g_ss) on the base
  std::array<std::array<double, 2>, 2> E{};  // inverse square root of the base slice metric
  double det_h = 1.0;
};
NodeFrame node_frame(const ChartSpec& chart, const double* x);

struct NodeCurvature {
  double f = 0.0;
  std::array<double, 2> p{};
  std::array<double, 3> H{};
  double K = 0.0;      // signed value, meaningful when admissible
  double detM = 0.0;   // raw coordinate determinant
  double psi = 0.0;    // normalized scale: K = det(Mn)^{1/n} / psi
  std::array<std::array<double, 2>, 2> Mn{};  // normalized frame
  std::array<double, 2> principal{};          // principal curvatures, descending
  double margin = 0.0;                        // smallest eigenvalue of Mn
  double grad_norm = 0.0;
  double vertical_alignment = 0.0;            // <unit chart vertical, upward normal>
  bool admissible = false;
};

struct CurvatureAssembly {
  ChartSpec chart;
  DomainPtr domain;
  std::vector<NodeCurvature> nodes;  // interior order
  bool admissible = false;
  double margin = 0.0;  // min over nodes of the smallest eigenvalue of Mn
};

NodeCurvature evaluate_node(const ChartSpec& chart, const double* x, const Jet<double>& j,
                            KernelPath path = KernelPath::Closed);

CurvatureAssembly assemble_curvature(const GraphFunction& f, const ChartSpec& chart,
                                     KernelPath path = KernelPath::Closed);

struct Admissibility {
  bool admissible = false;
  double margin = 0.0;
};
Admissibility admissibility(const CurvatureAssembly& a);

// Gauss curvature recomputed from the model embedding of the discrete graph.
struct OracleNode {
  std::array<double, 2> principal{};
  double norm = 0.0;  // largest principal curvature
  double K = 0.0;
};
struct CurvatureOracle {
  std::vector<OracleNode> nodes;  // interior order
};
CurvatureOracle curvature_oracle(const GraphFunction& f, const ChartSpec& chart);

enum class Order { Less, Greater, Equal, Incomparable };
const char* order_name(Order o);
Order order_compare(const GraphFunction& a, const GraphFunction& b);

void write_kfield_csv(const std::string& path, const CurvatureAssembly& a);

}  // namespace gaussgraph
