#include "gaussgraph/linearize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <random>

namespace gaussgraph {

using Triplet = Eigen::Triplet<double>;
using D6 = Dual<6>;

std::array<std::array<double, 2>, 2> EllipticOperator::second_order(int k) const {
  const auto& r = rows[k];
  return {{{r.c2[0], 0.5 * r.c2[1]}, {0.5 * r.c2[1], r.c2[2]}}};
}

std::vector<double> EllipticOperator::apply(const GraphFunction& v) const {
  require_same_domain(*domain, *v.domain());
  std::vector<double> out(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    double acc = r.c0 * v[domain->interior_nodes()[k]];
    for (const auto& e : domain->stencil(static_cast<int>(k))) {
      const double w = r.c1[0] * e.wp[0] + r.c1[1] * e.wp[1] + r.c2[0] * e.wH[0] + r.c2[1] * e.wH[1] +
                       r.c2[2] * e.wH[2];
      acc += w * v.sample(e.ref);
    }
    out[k] = acc;
  }
  return out;
}

namespace {

double entry_weight(const EllipticOperator::Row& r, const StencilEntry& e) {
  return r.c1[0] * e.wp[0] + r.c1[1] * e.wp[1] + r.c2[0] * e.wH[0] + r.c2[1] * e.wH[1] + r.c2[2] * e.wH[2];
}

}  // namespace

Eigen::SparseMatrix<double> EllipticOperator::interior_matrix() const {
  const int N = domain->interior_count();
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(N) * 14);
  for (int k = 0; k < N; ++k) {
    const auto& r = rows[k];
    t.emplace_back(k, k, r.c0);
    for (const auto& e : domain->stencil(k)) {
      if (e.ref.kind != SampleRef::Node) continue;
      const int col = domain->interior_id(e.ref.index);
      if (col < 0) continue;
      t.emplace_back(k, col, entry_weight(r, e));
    }
  }
  Eigen::SparseMatrix<double> m(N, N);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Eigen::SparseMatrix<double> EllipticOperator::full_matrix() const {
  const int N = domain->node_count();
  std::vector<Triplet> t;
  for (int node = 0; node < N; ++node) {
    const int k = domain->interior_id(node);
    if (k < 0) {
      t.emplace_back(node, node, 1.0);
      continue;
    }
    const auto& r = rows[k];
    t.emplace_back(node, node, r.c0);
    for (const auto& e : domain->stencil(k))
      if (e.ref.kind == SampleRef::Node) t.emplace_back(node, e.ref.index, entry_weight(r, e));
  }
  Eigen::SparseMatrix<double> m(N, N);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

namespace {

// Curvature and its jet derivatives at one node: slots f, p0, p1, Hxx, Hxy, Hyy.
D6 curvature_dual(const ChartSpec& chart, const double* x, const Jet<double>& j) {
  Jet<D6> jd;
  jd.f = D6::variable(j.f, 0);
  jd.p = {D6::variable(j.p[0], 1), D6::variable(j.p[1], 2)};
  jd.H = {D6::variable(j.H[0], 3), D6::variable(j.H[1], 4), D6::variable(j.H[2], 5)};
  return curvature_of(local_geometry<D6>(chart, x, jd));
}

}  // namespace

EllipticOperator build_DK(const GraphFunction& f, const ChartSpec& chart) {
  const auto& dom = *f.domain();
  EllipticOperator op;
  op.domain = f.domain();
  op.rows.resize(dom.interior_count());
  for (int k = 0; k < dom.interior_count(); ++k) {
    Jet<double> j;
    f.jet(k, j.f, j.p, j.H);
    const Point x = dom.coord(dom.interior_nodes()[k]);
    check_in_chart(chart, x.data(), j.f);
    const auto L = local_geometry<double>(chart, x.data(), j);
    if (!positive_definite(L.M, chart.n))
      fail(ErrorCode::NonAdmissible, "linearization requested at a non-admissible graph");
    const D6 K = curvature_dual(chart, x.data(), j);
    auto& r = op.rows[k];
    r.c0 = K.d[0];
    r.c1 = {K.d[1], K.d[2]};
    r.c2 = {K.d[3], K.d[4], K.d[5]};
  }
  return op;
}

std::vector<std::array<std::array<double, 2>, 2>> build_B(const CurvatureAssembly& a) {
  const int n = a.chart.n;
  std::vector<std::array<std::array<double, 2>, 2>> out(a.nodes.size());
  for (size_t k = 0; k < a.nodes.size(); ++k) {
    const auto& nd = a.nodes[k];
    if (!nd.admissible) fail(ErrorCode::NonAdmissible, "B requested at a non-admissible node");
    auto& B = out[k];
    B = {};
    if (n == 1) {
      B[0][0] = nd.psi / nd.Mn[0][0];
    } else {
      const double det = nd.Mn[0][0] * nd.Mn[1][1] - nd.Mn[0][1] * nd.Mn[1][0];
      const double s = nd.psi / (2.0 * det);
      B[0][0] = s * nd.Mn[1][1];
      B[1][1] = s * nd.Mn[0][0];
      B[0][1] = -s * nd.Mn[0][1];
      B[1][0] = -s * nd.Mn[1][0];
    }
  }
  return out;
}

EllipticOperator build_L(const GraphFunction& f, const ChartSpec& chart) {
  auto op = build_DK(f, chart);
  auto a = assemble_curvature(f, chart);
  for (size_t k = 0; k < op.rows.size(); ++k) {
    auto& r = op.rows[k];
    const double psi = a.nodes[k].psi;
    r.c0 = 0.0;
    for (double& c : r.c1) c *= psi;
    for (double& c : r.c2) c *= psi;
  }
  return op;
}

namespace {

struct BaseData {
  Eigen::Matrix2d A, h, W;  // coordinate bilinear forms on the base
  Christoffel<double> gamma;
};

BaseData base_data(const ChartSpec& chart, const Point& x) {
  const int n = chart.n;
  BaseData b;
  b.A.setIdentity();
  b.h.setIdentity();
  b.W.setIdentity();
  Jet<double> j;  // the base graph f = 0
  const auto L = local_geometry<double>(chart, x.data(), j);
  const auto g = metric<double>(chart, x.data(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      b.A(i, k) = value_of(L.M[i][k]) / value_of(L.grad_norm);
      b.h(i, k) = g[i][k];
    }
  b.gamma = christoffel<double>(chart, x.data(), 0.0);
  std::array<double, 3> p{x[0], x[1], 0.0};
  p[n] = 0.0;
  const auto R = riemann_at(chart, std::span<const double>(p.data(), n + 1));
  std::array<double, 3> N{0.0, 0.0, 0.0};
  N[n] = 1.0 / std::sqrt(g[n][n]);
  const int d = n + 1;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      // <R(e_i, N) e_k, N>
      double v = 0.0;
      for (int a = 0; a < d; ++a) {
        double ra = 0.0;
        for (int c = 0; c < d; ++c) ra += R[a][k][i][c] * N[c];
        for (int e = 0; e < d; ++e) v += g[a][e] * ra * N[e];
      }
      b.W(i, k) = v;
    }
  return b;
}

EllipticOperator::Row jacobi_row(const ChartSpec& chart, const Point& x) {
  const int n = chart.n;
  const BaseData b = base_data(chart, x);
  const double detA = n == 1 ? b.A(0, 0) : b.A.determinant();
  const double detH = n == 1 ? b.h(0, 0) : b.h.determinant();
  if (!(std::abs(detA) > 1e-12 * detH))
    fail(ErrorCode::SingularShapeOperator, "base shape operator is not invertible");
  Eigen::Matrix2d Ai = Eigen::Matrix2d::Zero(), hi = Eigen::Matrix2d::Zero();
  if (n == 1) {
    Ai(0, 0) = 1.0 / b.A(0, 0);
    hi(0, 0) = 1.0 / b.h(0, 0);
  } else {
    Ai = b.A.inverse();
    hi = b.h.inverse();
  }
  EllipticOperator::Row r;
  double trAW = 0.0, trA = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      trAW += Ai(i, k) * b.W(k, i);
      trA += hi(i, k) * b.A(k, i);
    }
  r.c0 = trAW - trA;
  r.c2[0] = -Ai(0, 0);
  if (n == 2) {
    r.c2[1] = -2.0 * Ai(0, 1);
    r.c2[2] = -Ai(1, 1);
  }
  for (int k = 0; k < n; ++k) {
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v += Ai(i, j) * b.gamma[k][i][j];
    r.c1[k] = v;
  }
  return r;
}

}  // namespace

double jacobi_zeroth_order(const ChartSpec& chart, const Point& x) { return jacobi_row(chart, x).c0; }

EllipticOperator build_JK(const ChartSpec& chart, const DomainPtr& domain) {
  EllipticOperator op;
  op.domain = domain;
  op.rows.resize(domain->interior_count());
  for (int k = 0; k < domain->interior_count(); ++k)
    op.rows[k] = jacobi_row(chart, domain->coord(domain->interior_nodes()[k]));
  return op;
}

InteriorSolver::InteriorSolver(const EllipticOperator& op) {
  auto m = op.interior_matrix();
  lu_.analyzePattern(m);
  lu_.factorize(m);
  if (lu_.info() != Eigen::Success) fail(ErrorCode::SingularLinearSystem, "sparse LU factorization failed");
}

std::vector<double> InteriorSolver::solve(const std::vector<double>& rhs) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = lu_.solve(b);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x(i))) fail(ErrorCode::SingularLinearSystem, "linear solve produced non-finite values");
  return std::vector<double>(x.data(), x.data() + x.size());
}

StabilityReport stability_check(const GraphFunction& f, const ChartSpec& chart) {
  auto op = build_DK(f, chart);
  InteriorSolver solver(op);
  StabilityReport rep;
  rep.witness = solver.solve(std::vector<double>(op.rows.size(), 1.0));
  rep.max_witness = -std::numeric_limits<double>::infinity();
  for (double w : rep.witness) rep.max_witness = std::max(rep.max_witness, w);
  rep.stable = rep.max_witness < 0.0;
  return rep;
}

BatteryReport stability_battery(const GraphFunction& f, const ChartSpec& chart, int sources, std::uint64_t seed) {
  auto op = build_DK(f, chart);
  InteriorSolver solver(op);
  std::mt19937_64 eng(seed);
  BatteryReport rep;
  rep.max_value = -std::numeric_limits<double>::infinity();
  std::vector<double> g(op.rows.size());
  for (int i = 0; i < sources; ++i) {
    for (double& v : g) v = 0.1 + static_cast<double>(eng() >> 11) * 0x1.0p-53;
    const auto w = solver.solve(g);
    const double mx = *std::max_element(w.begin(), w.end());
    rep.max_value = std::max(rep.max_value, mx);
    ++rep.sources;
    if (mx < 0.0) ++rep.negative;
  }
  return rep;
}

void write_triplets(const std::string& path, const Eigen::SparseMatrix<double>& m) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  std::fprintf(fp, "%ld %ld %ld\n", static_cast<long>(m.rows()), static_cast<long>(m.cols()),
               static_cast<long>(m.nonZeros()));
  for (int c = 0; c < m.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
      std::fprintf(fp, "%ld %ld %.17g\n", static_cast<long>(it.row()), static_cast<long>(it.col()), it.value());
  if (std::fclose(fp) != 0) fail(ErrorCode::IOError, "write to '" + path + "' failed");
}

}  // namespace gaussgraph
