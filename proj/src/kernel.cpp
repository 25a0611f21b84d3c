#include "gaussgraph/kernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <limits>

namespace gaussgraph {

namespace {

Eigen::Matrix2d to_eigen(const std::array<std::array<double, 2>, 2>& A, int n) {
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = A[i][j];
  return M;
}

// Eigenvalues of the pencil (A, B), B symmetric positive definite, descending.
bool pencil_eigenvalues(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B, int n, std::array<double, 2>& out) {
  if (n == 1) {
    if (!(B(0, 0) > 0.0)) return false;
    out = {A(0, 0) / B(0, 0), 0.0};
    return true;
  }
  Eigen::LLT<Eigen::Matrix2d> llt(B);
  if (llt.info() != Eigen::Success) return false;
  Eigen::Matrix2d L = llt.matrixL();
  Eigen::Matrix2d Li = L.inverse();
  Eigen::Matrix2d S = Li * A * Li.transpose();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S, Eigen::EigenvaluesOnly);
  out = {es.eigenvalues()(1), es.eigenvalues()(0)};
  return true;
}

double signed_root(double prod, int n) {
  const double r = n == 1 ? std::abs(prod) : std::sqrt(std::abs(prod));
  return prod < 0.0 ? -r : r;
}

}  // namespace

NodeFrame node_frame(const ChartSpec& chart, const double* x) {
  NodeFrame fr;
  const auto g = metric<double>(chart, x, 0.0);
  const int n = chart.n;
  fr.c = std::sqrt(g[n][n]);
  Eigen::Matrix2d h = Eigen::Matrix2d::Identity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = g[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  Eigen::Matrix2d E = es.operatorInverseSqrt();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fr.E[i][j] = (i < n && j < n) ? E(i, j) : 0.0;
  fr.det_h = n == 1 ? h(0, 0) : h.determinant();
  return fr;
}

NodeCurvature evaluate_node(const ChartSpec& chart, const double* x, const Jet<double>& j, KernelPath path) {
  check_in_chart(chart, x, j.f);
  const int n = chart.n;
  NodeCurvature out;
  out.f = j.f;
  out.p = j.p;
  out.H = j.H;
  const auto L = local_geometry<double>(chart, x, j, path);
  out.K = curvature_of(L);
  out.detM = L.detM;
  out.grad_norm = L.grad_norm;
  const NodeFrame fr = node_frame(chart, x);
  const double ratio = L.detG / fr.det_h;
  out.psi = fr.c * L.grad_norm * (n == 1 ? ratio : std::sqrt(ratio));
  Eigen::Matrix2d E = to_eigen(fr.E, n);
  Eigen::Matrix2d Mn = fr.c * E * to_eigen(L.M, n) * E;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.Mn[a][b] = Mn(a, b);
  if (n == 1) {
    out.margin = Mn(0, 0);
  } else {
    Mn = 0.5 * (Mn + Mn.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Mn, Eigen::EigenvaluesOnly);
    out.margin = es.eigenvalues()(0);
  }
  out.admissible = out.margin > 0.0 && std::isfinite(out.K);
  Eigen::Matrix2d A = to_eigen(L.M, n) / L.grad_norm;
  if (!pencil_eigenvalues(A, to_eigen(L.G, n), n, out.principal))
    fail(ErrorCode::DegenerateMetric, "induced metric is not positive definite");
  const auto g = metric<double>(chart, x, j.f);
  out.vertical_alignment = 1.0 / (std::sqrt(g[n][n]) * L.grad_norm);
  return out;
}

CurvatureAssembly assemble_curvature(const GraphFunction& f, const ChartSpec& chart, KernelPath path) {
  const auto& dom = *f.domain();
  if (dom.n() != chart.n) fail(ErrorCode::InvalidArgument, "grid and chart dimensions differ");
  CurvatureAssembly out;
  out.chart = chart;
  out.domain = f.domain();
  out.nodes.resize(dom.interior_count());
  out.admissible = true;
  out.margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dom.interior_count(); ++k) {
    Jet<double> j;
    f.jet(k, j.f, j.p, j.H);
    const Point x = dom.coord(dom.interior_nodes()[k]);
    out.nodes[k] = evaluate_node(chart, x.data(), j, path);
    out.admissible = out.admissible && out.nodes[k].admissible;
    out.margin = std::min(out.margin, out.nodes[k].margin);
  }
  return out;
}

Admissibility admissibility(const CurvatureAssembly& a) { return {a.admissible, a.margin}; }

namespace {

using Vec4 = std::array<double, 4>;

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Vector Euclidean-orthogonal to rows[0..D-2] in R^D (D <= 4), via cofactors.
Vec4 cofactor_normal(const std::vector<Vec4>& rows, int D) {
  Vec4 w{};
  const int m = D - 1;
  for (int a = 0; a < D; ++a) {
    double minor[3][3] = {};
    for (int r = 0; r < m; ++r) {
      int cc = 0;
      for (int c = 0; c < D; ++c) {
        if (c == a) continue;
        minor[r][cc++] = rows[r][c];
      }
    }
    double det;
    if (m == 1) det = minor[0][0];
    else if (m == 2) det = minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0];
    else det = det3(minor);
    w[a] = (a % 2 == 0 ? 1.0 : -1.0) * det;
  }
  return w;
}

}  // namespace

CurvatureOracle curvature_oracle(const GraphFunction& f, const ChartSpec& chart) {
  const auto& dom = *f.domain();
  const int n = chart.n;
  std::vector<ModelPoint> nodeP(dom.node_count());
  std::vector<char> have(dom.node_count(), 0);
  std::vector<ModelPoint> crossP(dom.crossings().size());
  for (size_t c = 0; c < crossP.size(); ++c)
    crossP[c] = embed(chart, dom.crossings()[c].data(), f.crossing_values()[c]);
  auto P_of = [&](const SampleRef& r) -> const ModelPoint& {
    if (r.kind == SampleRef::Crossing) return crossP[r.index];
    if (!have[r.index]) {
      nodeP[r.index] = embed(chart, dom.coord(r.index).data(), f[r.index]);
      have[r.index] = 1;
    }
    return nodeP[r.index];
  };

  CurvatureOracle out;
  out.nodes.resize(dom.interior_count());
  for (int k = 0; k < dom.interior_count(); ++k) {
    const int node = dom.interior_nodes()[k];
    const ModelPoint& P = P_of({SampleRef::Node, node});
    const int D = P.dim;
    Vec4 dP[2] = {}, ddP[3] = {};
    for (const auto& e : dom.stencil(k)) {
      const ModelPoint& Q = P_of(e.ref);
      for (int a = 0; a < D; ++a) {
        dP[0][a] += e.wp[0] * Q.p[a];
        dP[1][a] += e.wp[1] * Q.p[a];
        for (int h = 0; h < 3; ++h) ddP[h][a] += e.wH[h] * Q.p[a];
      }
    }
    Eigen::Matrix2d G = Eigen::Matrix2d::Identity(), A = Eigen::Matrix2d::Zero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = model_inner(P, dP[i], dP[j]);

    std::vector<Vec4> rows;
    if (P.lorentzian) rows.push_back(P.p);
    for (int i = 0; i < n; ++i) rows.push_back(dP[i]);
    Vec4 N = cofactor_normal(rows, D);
    if (P.lorentzian) N[0] = -N[0];  // raise the index with diag(-1, 1, ...)

    const Point x = dom.coord(node);
    const double hs = 1e-6;
    const ModelPoint up = embed(chart, x.data(), f[node] + hs);
    const ModelPoint dn = embed(chart, x.data(), f[node] - hs);
    Vec4 V{};
    for (int a = 0; a < D; ++a) V[a] = up.p[a] - dn.p[a];
    const double nn = model_inner(P, N, N);
    if (!(nn > 0.0)) fail(ErrorCode::DegenerateMetric, "oracle normal is not spacelike");
    const double sgn = model_inner(P, N, V) < 0.0 ? -1.0 : 1.0;
    for (int a = 0; a < D; ++a) N[a] *= sgn / std::sqrt(nn);

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int h = (i == j) ? (i == 0 ? 0 : 2) : 1;
        A(i, j) = model_inner(P, ddP[h], N);
      }
    std::array<double, 2> lam{};
    if (!pencil_eigenvalues(A, G, n, lam))
      fail(ErrorCode::DegenerateMetric, "induced metric of the embedded graph is not positive definite");
    auto& o = out.nodes[k];
    o.principal = lam;
    o.norm = lam[0];
    o.K = signed_root(n == 1 ? lam[0] : lam[0] * lam[1], n);
  }
  return out;
}

const char* order_name(Order o) {
  switch (o) {
    case Order::Less: return "less";
    case Order::Greater: return "greater";
    case Order::Equal: return "equal";
    case Order::Incomparable: return "incomparable";
  }
  return "incomparable";
}

Order order_compare(const GraphFunction& a, const GraphFunction& b) {
  require_same_domain(*a.domain(), *b.domain());
  bool le = true, ge = true;
  for (int node : a.domain()->interior_nodes()) {
    if (a[node] > b[node]) le = false;
    if (a[node] < b[node]) ge = false;
  }
  if (le && ge) return Order::Equal;
  if (le) return Order::Less;
  if (ge) return Order::Greater;
  return Order::Incomparable;
}

void write_kfield_csv(const std::string& path, const CurvatureAssembly& a) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  const auto& dom = *a.domain;
  std::fprintf(fp, dom.n() == 2 ? "node,x0,x1,f,K,margin,admissible\n" : "node,x0,f,K,margin,admissible\n");
  for (int k = 0; k < dom.interior_count(); ++k) {
    const int node = dom.interior_nodes()[k];
    const Point x = dom.coord(node);
    const auto& c = a.nodes[k];
    if (dom.n() == 2)
      std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", node, x[0], x[1], c.f, c.K, c.margin,
                   c.admissible ? 1 : 0);
    else
      std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%.17g,%d\n", node, x[0], c.f, c.K, c.margin, c.admissible ? 1 : 0);
  }
  if (std::fclose(fp) != 0) fail(ErrorCode::IOError, "write to '" + path + "' failed");
}

}  // namespace gaussgraph
