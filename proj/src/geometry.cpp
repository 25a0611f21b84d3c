#include "gaussgraph/geometry.hpp"

#include <cstdio>
#include <sstream>

namespace gaussgraph {

ChartSpec ChartSpec::euclidean(int n) {
  ChartSpec c;
  c.kind = ChartKind::EuclideanGraph;
  c.n = n;
  c.validate();
  return c;
}

ChartSpec ChartSpec::hyperbolic(int n, double offset) {
  ChartSpec c;
  c.kind = ChartKind::HyperbolicConformal;
  c.n = n;
  c.offset = offset;
  c.validate();
  return c;
}

ChartSpec ChartSpec::epsilon_family(int n, double epsilon, bool normalized) {
  ChartSpec c;
  c.kind = ChartKind::EpsilonFamily;
  c.n = n;
  c.epsilon = epsilon;
  c.normalized = normalized;
  c.validate();
  return c;
}

void ChartSpec::validate() const {
  if (n != 1 && n != 2) fail(ErrorCode::InvalidArgument, "graph dimension must be 1 or 2");
  if (kind == ChartKind::EpsilonFamily && !(epsilon > 0.0))
    fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (kind == ChartKind::HyperbolicConformal && !std::isfinite(offset))
    fail(ErrorCode::InvalidArgument, "offset must be finite");
}

static std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string chart_id(const ChartSpec& c) {
  std::string out;
  switch (c.kind) {
    case ChartKind::EuclideanGraph: out = "euclidean"; break;
    case ChartKind::HyperbolicConformal: out = "hyperbolic_conformal"; break;
    case ChartKind::EpsilonFamily: out = "epsilon_family"; break;
  }
  out += ";n=" + std::to_string(c.n);
  if (c.kind == ChartKind::HyperbolicConformal) out += ";D=" + fmt17(c.offset);
  if (c.kind == ChartKind::EpsilonFamily)
    out += ";eps=" + fmt17(c.epsilon) + ";normalized=" + (c.normalized ? "1" : "0");
  return out;
}

ChartSpec parse_chart_id(const std::string& id) {
  std::stringstream ss(id);
  std::string tok;
  std::getline(ss, tok, ';');
  ChartSpec c;
  if (tok == "euclidean") c.kind = ChartKind::EuclideanGraph;
  else if (tok == "hyperbolic_conformal") c.kind = ChartKind::HyperbolicConformal;
  else if (tok == "epsilon_family") c.kind = ChartKind::EpsilonFamily;
  else fail(ErrorCode::ConfigError, "unknown chart '" + tok + "'");
  while (std::getline(ss, tok, ';')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, "bad chart field '" + tok + "'");
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "n") c.n = std::stoi(val);
      else if (key == "D") c.offset = std::stod(val);
      else if (key == "eps") c.epsilon = std::stod(val);
      else if (key == "normalized") c.normalized = (val == "1");
      else fail(ErrorCode::ConfigError, "unknown chart field '" + key + "'");
    } catch (const std::logic_error&) {
      fail(ErrorCode::ConfigError, "bad chart value in '" + tok + "'");
    }
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  return c;
}

double alpha_of_theta(double theta) { return std::asinh(std::tan(theta)); }
double theta_of_alpha(double alpha) { return std::atan(std::sinh(alpha)); }

double equidistant_curvature(double distance) {
  if (!(distance >= 0.0)) fail(ErrorCode::InvalidArgument, "distance must be non-negative");
  return std::tanh(distance);
}

double base_theta(const ChartSpec& chart) { return -theta_of_alpha(chart.offset); }

void check_in_chart(const ChartSpec& chart, const double* x, double s) {
  if (!std::isfinite(s)) fail(ErrorCode::OutOfChart, "non-finite height");
  switch (chart.kind) {
    case ChartKind::EuclideanGraph: return;
    case ChartKind::HyperbolicConformal: {
      double r2 = 0.0;
      for (int i = 0; i < chart.n; ++i) r2 += x[i] * x[i];
      if (!(r2 < 1.0)) fail(ErrorCode::OutOfChart, "point outside the Poincare ball");
      if (!(std::abs(s + base_theta(chart)) < M_PI / 2))
        fail(ErrorCode::OutOfChart, "conformal angle reached +-pi/2");
      return;
    }
    case ChartKind::EpsilonFamily:
      if (!(x[0] >= 1e-8)) fail(ErrorCode::OutOfChart, "radial coordinate at or below the pole");
      return;
  }
}

static void check_point(const ChartSpec& chart, std::span<const double> point) {
  if (static_cast<int>(point.size()) != chart.dim())
    fail(ErrorCode::InvalidArgument, "point has wrong dimension");
  check_in_chart(chart, point.data(), point[chart.n]);
}

std::vector<double> metric_at(const ChartSpec& chart, std::span<const double> point) {
  check_point(chart, point);
  auto g = metric<double>(chart, point.data(), point[chart.n]);
  const int d = chart.dim();
  std::vector<double> out(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out[a * d + b] = g[a][b];
  return out;
}

Christoffel<double> christoffel_at(const ChartSpec& chart, std::span<const double> point) {
  check_point(chart, point);
  return christoffel<double>(chart, point.data(), point[chart.n]);
}

std::array<double, 3> ConnectionForm::tangent_tangent(int i, int j) const {
  return {omega[0][i][j], omega[1][i][j], omega[2][i][j]};
}
std::array<double, 3> ConnectionForm::tangent_vertical(int i) const {
  return {omega[0][i][n], omega[1][i][n], omega[2][i][n]};
}
std::array<double, 3> ConnectionForm::vertical_vertical() const {
  return {omega[0][n][n], omega[1][n][n], omega[2][n][n]};
}

ConnectionForm connection_form_at(const ChartSpec& chart, std::span<const double> point) {
  check_point(chart, point);
  const int n = chart.n;
  ConnectionForm out;
  out.n = n;
  out.omega = christoffel<double>(chart, point.data(), point[n]);
  // product connection: slice symbols of the base metric, nothing involving s
  auto base = christoffel<double>(chart, point.data(), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.omega[k][i][j] -= base[k][i][j];
  return out;
}

Riemann riemann_at(const ChartSpec& chart, std::span<const double> point, double step) {
  check_point(chart, point);
  const int d = chart.dim();
  auto g = metric<double>(chart, point.data(), point[chart.n]);
  std::array<double, 3> p{};
  for (int a = 0; a < d; ++a) p[a] = point[a];
  auto gamma_at = [&](const std::array<double, 3>& q) {
    return christoffel<double>(chart, q.data(), q[chart.n]);
  };
  // dG[c][a][b][e] = d/dx^c of gamma[a][b][e]
  std::array<Christoffel<double>, 3> dG{};
  for (int c = 0; c < d; ++c) {
    const double h = step / std::sqrt(g[c][c]);
    Christoffel<double> G[4];
    const double offs[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int m = 0; m < 4; ++m) {
      auto q = p;
      q[c] += offs[m] * h;
      G[m] = gamma_at(q);
    }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e)
          dG[c][a][b][e] =
              (G[0][a][b][e] - 8.0 * G[1][a][b][e] + 8.0 * G[2][a][b][e] - G[3][a][b][e]) / (12.0 * h);
  }
  auto G = gamma_at(p);
  Riemann R{};
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double v = dG[c][a][e][b] - dG[e][a][c][b];
          for (int m = 0; m < d; ++m) v += G[a][c][m] * G[m][e][b] - G[a][e][m] * G[m][c][b];
          R[a][b][c][e] = v;
        }
  return R;
}

double sectional_curvature(const ChartSpec& chart, std::span<const double> point,
                           std::span<const double> X, std::span<const double> Y, double step) {
  const int d = chart.dim();
  if (static_cast<int>(X.size()) != d || static_cast<int>(Y.size()) != d)
    fail(ErrorCode::InvalidArgument, "tangent vectors have wrong dimension");
  auto R = riemann_at(chart, point, step);
  auto g = metric<double>(chart, point.data(), point[chart.n]);
  double num = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
  for (int a = 0; a < d; ++a)
    for (int e = 0; e < d; ++e) {
      xx += g[a][e] * X[a] * X[e];
      yy += g[a][e] * Y[a] * Y[e];
      xy += g[a][e] * X[a] * Y[e];
      double ra = 0.0;
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int m = 0; m < d; ++m) ra += R[a][b][c][m] * Y[b] * X[c] * Y[m];
      num += g[a][e] * ra * X[e];
    }
  const double den = xx * yy - xy * xy;
  if (!(den > 0.0)) fail(ErrorCode::InvalidArgument, "tangent vectors are linearly dependent");
  return num / den;
}

BaseHypersurface base_of(const ChartSpec& chart) {
  BaseHypersurface b;
  b.n = chart.n;
  if (chart.kind == ChartKind::HyperbolicConformal) {
    b.shape = std::tanh(chart.offset);
    b.curvature = b.shape;
  }
  return b;
}

ModelPoint embed(const ChartSpec& chart, const double* x, double s) {
  check_in_chart(chart, x, s);
  ModelPoint m;
  const int n = chart.n;
  switch (chart.kind) {
    case ChartKind::EuclideanGraph:
      m.dim = n + 1;
      for (int i = 0; i < n; ++i) m.p[i] = x[i];
      m.p[n] = s;
      break;
    case ChartKind::HyperbolicConformal: {
      m.dim = n + 2;
      m.lorentzian = true;
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
      const double alpha = alpha_of_theta(s + base_theta(chart));
      const double ch = std::cosh(alpha);
      m.p[0] = ch * (1.0 + r2) / (1.0 - r2);
      for (int i = 0; i < n; ++i) m.p[1 + i] = ch * 2.0 * x[i] / (1.0 - r2);
      m.p[n + 1] = std::sinh(alpha);
      break;
    }
    case ChartKind::EpsilonFamily: {
      m.dim = n + 2;
      m.lorentzian = true;
      const double e = chart.epsilon;
      const double a = std::cosh(e * s) / e;
      m.p[0] = a * std::cosh(e * x[0]);
      if (n == 1) {
        m.p[1] = a * std::sinh(e * x[0]);
      } else {
        const double ang = chart.normalized ? x[1] : e * x[1];
        m.p[1] = a * std::sinh(e * x[0]) * std::cos(ang);
        m.p[2] = a * std::sinh(e * x[0]) * std::sin(ang);
      }
      m.p[n + 1] = std::sinh(e * s) / e;
      break;
    }
  }
  return m;
}

double model_inner(const ModelPoint& m, const std::array<double, 4>& u, const std::array<double, 4>& v) {
  double r = 0.0;
  for (int a = 0; a < m.dim; ++a) r += u[a] * v[a];
  if (m.lorentzian) r -= 2.0 * u[0] * v[0];
  return r;
}

}  // namespace gaussgraph
