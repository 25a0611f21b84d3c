#include "gaussgraph/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaussgraph {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Radial reduction of the curvature equation: det M is affine in f'', so the
// ODE f'' = F(r, f, f') comes from two kernel evaluations.
struct RadialModel {
  const ChartSpec& chart;
  Point center;
  double k;

  bool inside(const Point& x, double f) const {
    if (chart.kind == ChartKind::HyperbolicConformal) {
      if (!(x[0] * x[0] + x[1] * x[1] < 1.0)) return false;
      if (!(std::abs(f + base_theta(chart)) < M_PI / 2)) return false;
    }
    return std::isfinite(f);
  }

  bool second(double rho, double f, double df, double& ddf) const {
    const Point x{center[0] + rho, center[1]};
    if (!inside(x, f) || !std::isfinite(df)) return false;
    Jet<double> j;
    j.f = f;
    j.p = {df, 0.0};
    j.H = {0.0, 0.0, chart.n == 2 ? df / rho : 0.0};
    const auto L0 = local_geometry<double>(chart, x.data(), j);
    j.H[0] = 1.0;
    const auto L1 = local_geometry<double>(chart, x.data(), j);
    if (k == 0.0) {
      // det M = 0 is degenerate along the totally geodesic cap; solve the
      // meridian condition M_xx = 0 instead
      const double dm = L1.M[0][0] - L0.M[0][0];
      ddf = -L0.M[0][0] / dm;
      return std::isfinite(ddf);
    }
    const double slope = L1.detM - L0.detM;
    if (!(slope > 0.0)) return false;
    const double target = std::pow(k, chart.n) * L0.detG * std::pow(L0.grad_norm, chart.n);
    const double a = (target - L0.detM) / slope;
    if (!std::isfinite(a)) return false;
    if (k > 0.0) {
      if (!(L0.M[0][0] + a > 0.0)) return false;
      if (chart.n == 2 && !(L0.M[1][1] > 0.0)) return false;
    }
    ddf = a;
    return true;
  }

  // Second derivative at the centre for n = 2: solves det(M0 + a I) = T.
  bool centre_curvature(double c, double& a) const {
    if (!inside(center, c)) return false;
    Jet<double> j;
    j.f = c;
    const auto L = local_geometry<double>(chart, center.data(), j);
    const double T = k * k * L.detG * L.grad_norm * L.grad_norm;
    const double tr = L.M[0][0] + L.M[1][1];
    const double diff = L.M[0][0] - L.M[1][1];
    const double disc = diff * diff + 4.0 * L.M[0][1] * L.M[1][0] + 4.0 * T;
    if (disc < 0.0) return false;
    a = 0.5 * (-tr + std::sqrt(disc));
    return std::isfinite(a);
  }
};

struct Shot {
  bool ok = false;
  double a0 = 0.0;
  std::vector<double> r, f, df;
};

Shot shoot(const RadialModel& m, double c, double R, const CapOptions& o, bool keep) {
  Shot s;
  double r0 = 0.0, f = c, df = 0.0;
  if (m.chart.n == 2) {
    if (!m.centre_curvature(c, s.a0)) return s;
    r0 = o.start_fraction * R;
    f = c + 0.5 * s.a0 * r0 * r0;
    df = s.a0 * r0;
  } else {
    if (!m.second(0.0, c, 0.0, s.a0)) return s;
  }
  const double h = (R - r0) / o.steps;
  if (keep) {
    s.r.reserve(o.steps + 1);
    s.r.push_back(r0);
    s.f.push_back(f);
    s.df.push_back(df);
  }
  for (int i = 0; i < o.steps; ++i) {
    const double r = r0 + i * h;
    double k1, k2, k3, k4;
    if (!m.second(r, f, df, k1)) return s;
    if (!m.second(r + 0.5 * h, f + 0.5 * h * df, df + 0.5 * h * k1, k2)) return s;
    if (!m.second(r + 0.5 * h, f + 0.5 * h * df + 0.25 * h * h * k1, df + 0.5 * h * k2, k3)) return s;
    if (!m.second(r + h, f + h * df + 0.5 * h * h * k2, df + h * k3, k4)) return s;
    f += h * df + h * h * (k1 + k2 + k3) / 6.0;
    df += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (keep) {
      s.r.push_back(i + 1 == o.steps ? R : r0 + (i + 1) * h);
      s.f.push_back(f);
      s.df.push_back(df);
    } else if (i + 1 == o.steps) {
      s.f.assign(1, f);
    }
  }
  s.ok = true;
  return s;
}

double end_value(const Shot& s) { return s.ok ? s.f.back() : kNaN; }

}  // namespace

double CapProfile::operator()(double rho) const {
  if (rho <= r.front()) {
    // series near the centre: f = c + f''(0) rho^2 / 2
    const double a0 = r.front() > 0.0 ? (f.front() - center_value) * 2.0 / (r.front() * r.front()) : 0.0;
    return center_value + 0.5 * a0 * rho * rho;
  }
  if (rho >= r.back()) return f.back();
  const size_t i = std::upper_bound(r.begin(), r.end(), rho) - r.begin() - 1;
  const double h = r[i + 1] - r[i];
  const double t = (rho - r[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1];
}

CapProfile cap_profile(const ChartSpec& chart, const DomainPtr& ball, double k, const CapOptions& opts) {
  const auto& g = ball->geometry();
  if (g.type != DomainType::Ball) fail(ErrorCode::InvalidArgument, "cap barriers need a ball domain");
  if (chart.kind == ChartKind::EpsilonFamily)
    fail(ErrorCode::OutOfRange, "cap barriers are built for the Euclidean and hyperbolic charts");
  if (chart.kind == ChartKind::HyperbolicConformal && (g.center[0] != 0.0 || g.center[1] != 0.0))
    fail(ErrorCode::InvalidArgument, "hyperbolic cap barriers need a ball centred at the origin");
  if (!(k >= 0.0)) fail(ErrorCode::OutOfRange, "cap curvature must be non-negative");
  const RadialModel m{chart, g.center, k};
  const double R = g.radius;

  double lo, hi;
  if (chart.kind == ChartKind::HyperbolicConformal) {
    lo = -M_PI / 2 - base_theta(chart) + 1e-6;
    hi = M_PI / 2 - base_theta(chart) - 1e-6;
  } else {
    lo = -(R + 2.0 / std::max(k, 1e-3));
    hi = R;
  }
  // coarse scan for a sign change of the boundary value, nearest to c = 0
  std::vector<double> cs(opts.scan + 1), Fs(opts.scan + 1);
  for (int i = 0; i <= opts.scan; ++i) {
    cs[i] = lo + (hi - lo) * i / opts.scan;
    Fs[i] = end_value(shoot(m, cs[i], R, opts, false));
  }
  int best = -1;
  for (int i = 0; i < opts.scan; ++i) {
    if (!std::isfinite(Fs[i]) || !std::isfinite(Fs[i + 1])) continue;
    if ((Fs[i] <= 0.0) != (Fs[i + 1] <= 0.0)) {
      if (best < 0 || std::abs(cs[i]) < std::abs(cs[best])) best = i;
    }
  }
  if (best < 0) fail(ErrorCode::OutOfRange, "no constant-curvature cap with k = " + std::to_string(k) + " over this ball");
  double a = cs[best], b = cs[best + 1], Fa = Fs[best];
  for (int it = 0; it < 200 && b - a > 1e-16 * (1.0 + std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    const double Fm = end_value(shoot(m, mid, R, opts, false));
    if (!std::isfinite(Fm)) fail(ErrorCode::OutOfRange, "cap shooting left the solvable range");
    if ((Fm <= 0.0) == (Fa <= 0.0)) {
      a = mid;
      Fa = Fm;
    } else {
      b = mid;
    }
  }
  const double c = 0.5 * (a + b);
  Shot s = shoot(m, c, R, opts, true);
  if (!s.ok) fail(ErrorCode::OutOfRange, "cap profile blew up");
  CapProfile p;
  p.center_value = c;
  p.radius = R;
  p.r = std::move(s.r);
  p.f = std::move(s.f);
  p.df = std::move(s.df);
  return p;
}

GraphFunction sphere_cap_barrier(const ChartSpec& chart, const DomainPtr& ball, double k, const CapOptions& opts) {
  const CapProfile p = cap_profile(chart, ball, k, opts);
  const auto& g = ball->geometry();
  GraphFunction out(ball);
  for (int node = 0; node < ball->node_count(); ++node) {
    const Point x = ball->coord(node);
    if (!ball->is_interior(node)) continue;  // boundary data is zero
    out[node] = p(std::hypot(x[0] - g.center[0], chart.n == 2 ? x[1] - g.center[1] : 0.0));
  }
  return out;
}

BarrierPair make_cap_barrier(const ChartSpec& chart, const DomainPtr& ball, double k, double gap) {
  BarrierPair b;
  b.lower = sphere_cap_barrier(chart, ball, k);
  b.lower_curvature = k;
  b.gap = gap;
  b.base_curvature = base_of(chart).curvature;
  b.tag = "sphere_cap";
  return b;
}

bool barrier_curvature_holds(const BarrierPair& b, const ChartSpec& chart, double tol) {
  auto a = assemble_curvature(b.lower, chart);
  if (!a.admissible) return false;
  for (const auto& nd : a.nodes)
    if (nd.K < b.lower_curvature - tol) return false;
  return true;
}

SandwichReport validate_sandwich(const GraphFunction& f, const BarrierPair& b, double phi_min, double phi_max,
                                 double tol) {
  require_same_domain(*f.domain(), *b.lower.domain());
  SandwichReport rep;
  for (int node : f.domain()->interior_nodes()) {
    const double lowgap = b.lower[node] - tol - f[node];
    const double upgap = f[node] - tol;
    if (lowgap > 0.0) {
      rep.below_barrier.push_back(node);
      rep.worst = std::max(rep.worst, lowgap);
    }
    if (upgap > 0.0) {
      rep.above_base.push_back(node);
      rep.worst = std::max(rep.worst, upgap);
    }
  }
  rep.order_ok = rep.below_barrier.empty() && rep.above_base.empty();
  if (std::isfinite(phi_min) && phi_min < b.base_curvature) rep.curvature_ok = false;
  if (std::isfinite(phi_max) && phi_max > b.lower_curvature - b.gap) rep.curvature_ok = false;
  rep.pass = rep.order_ok && rep.curvature_ok;
  return rep;
}

namespace {

Point boundary_point(const GridDomain& d) {
  const auto& g = d.geometry();
  if (g.type == DomainType::Ball) return {g.center[0] + g.radius, g.center[1]};
  return {g.hi[0], d.n() == 2 ? 0.5 * (g.lo[1] + g.hi[1]) : 0.0};
}

double ambient_distance(const ChartSpec& chart, const ModelPoint& a, const ModelPoint& b) {
  if (!a.lorentzian) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += (a.p[i] - b.p[i]) * (a.p[i] - b.p[i]);
    return std::sqrt(s);
  }
  const double e = chart.kind == ChartKind::EpsilonFamily ? chart.epsilon : 1.0;
  const double c = std::max(1.0, -e * e * model_inner(a, a.p, b.p));
  return std::acosh(c) / e;
}

}  // namespace

EstimateReport curvature_norm_report(const GraphFunction& f, const ChartSpec& chart) {
  const auto& d = *f.domain();
  const auto o = curvature_oracle(f, chart);
  EstimateReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
  rep.weight_point = boundary_point(d);
  const ModelPoint P = embed(chart, rep.weight_point.data(), 0.0);
  rep.eigenvalues.resize(o.nodes.size());
  rep.weight.resize(o.nodes.size());
  for (int k = 0; k < d.interior_count(); ++k) {
    const auto& nd = o.nodes[k];
    rep.eigenvalues[k] = nd.principal;
    double norm = 0.0;
    for (int i = 0; i < chart.n; ++i) {
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, nd.principal[i]);
      rep.max_eigenvalue = std::max(rep.max_eigenvalue, nd.principal[i]);
      norm = std::max(norm, std::abs(nd.principal[i]));
    }
    if (d.near_boundary(k)) rep.boundary_sup = std::max(rep.boundary_sup, norm);
    else rep.interior_sup = std::max(rep.interior_sup, norm);
    double v;
    std::array<double, 2> p;
    std::array<double, 3> H;
    f.jet(k, v, p, H);
    rep.lipschitz = std::max(rep.lipschitz, std::hypot(p[0], p[1]));
    const int node = d.interior_nodes()[k];
    const ModelPoint Q = embed(chart, d.coord(node).data(), f[node]);
    const double dist = ambient_distance(chart, P, Q);
    rep.weight[k] = dist * dist;
    rep.weighted_sup = std::max(rep.weighted_sup, rep.weight[k] * norm);
  }
  rep.sup = std::max(rep.interior_sup, rep.boundary_sup);
  return rep;
}

PogorelovReport pogorelov_monitor(const GraphFunction& f, const ChartSpec& chart, double alpha,
                                  const std::vector<double>& cutoff, double eps_x,
                                  const std::vector<double>& direction) {
  const auto& d = *f.domain();
  if (static_cast<int>(cutoff.size()) != d.interior_count())
    fail(ErrorCode::InvalidArgument, "cutoff must have one value per interior node");
  if (!(alpha >= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be at least 1");
  if (!direction.empty() && static_cast<int>(direction.size()) != chart.dim())
    fail(ErrorCode::InvalidArgument, "direction must have n + 1 components");
  const auto a = assemble_curvature(f, chart);
  PogorelovReport rep;
  rep.alpha = alpha;
  rep.sup = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < d.interior_count(); ++k) {
    if (!(cutoff[k] > 0.0)) continue;
    ++rep.support_size;
    const auto& nd = a.nodes[k];
    double xn = nd.vertical_alignment;
    if (!direction.empty()) {
      const Point x = d.coord(d.interior_nodes()[k]);
      const auto g = metric<double>(chart, x.data(), nd.f);
      double norm2 = 0.0;
      for (int i = 0; i <= chart.n; ++i)
        for (int j = 0; j <= chart.n; ++j) norm2 += g[i][j] * direction[i] * direction[j];
      double dF = -direction[chart.n];
      for (int i = 0; i < chart.n; ++i) dF += nd.p[i] * direction[i];
      xn = -dF / (nd.grad_norm * std::sqrt(norm2));
    }
    if (xn < eps_x) fail(ErrorCode::TransversalityFailure, "<X, N> fell below the transversality bound");
    const double normA = nd.principal[0];
    if (!(normA > 0.0)) fail(ErrorCode::NonAdmissible, "second fundamental form is not positive");
    const double phi = alpha * std::log(cutoff[k]) - xn + std::log(normA);
    if (phi > rep.sup) {
      rep.sup = phi;
      rep.argmax_node = d.interior_nodes()[k];
    }
  }
  return rep;
}

std::vector<double> radial_cutoff(const GridDomain& d, double inner, double outer) {
  const auto& g = d.geometry();
  std::vector<double> cut(d.interior_count());
  for (int k = 0; k < d.interior_count(); ++k) {
    const Point x = d.coord(d.interior_nodes()[k]);
    double r = 0.0;
    if (g.type == DomainType::Ball) {
      r = std::hypot(x[0] - g.center[0], d.n() == 2 ? x[1] - g.center[1] : 0.0) / g.radius;
    } else {
      for (int i = 0; i < d.n(); ++i) {
        const double c = 0.5 * (g.lo[i] + g.hi[i]), h = 0.5 * (g.hi[i] - g.lo[i]);
        r = std::max(r, std::abs(x[i] - c) / h);
      }
    }
    if (r <= inner) cut[k] = 1.0;
    else if (r >= outer) cut[k] = 0.0;
    else cut[k] = 0.5 * (1.0 + std::cos(M_PI * (r - inner) / (outer - inner)));
  }
  return cut;
}

bool square_split_holds(double a, double b, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");
  const double lhs = (a + b) * (a + b);
  const double rhs = (1.0 + lambda) * a * a + (1.0 + 1.0 / lambda) * b * b;
  // the gap equals (sqrt(lambda) a - b / sqrt(lambda))^2; allow rounding
  return lhs <= rhs * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace gaussgraph
