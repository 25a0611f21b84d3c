#include "gaussgraph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace gaussgraph {

SolveTarget SolveTarget::constant(const ChartSpec& chart, const DomainPtr& domain, double k) {
  SolveTarget t;
  t.chart = chart;
  t.domain = domain;
  t.phi.assign(domain->interior_count(), k);
  return t;
}

std::vector<double> SolveTarget::values(const GraphFunction& f) const {
  std::vector<double> out = phi;
  if (dependence) {
    const auto& d = *domain;
    for (int k = 0; k < d.interior_count(); ++k) {
      const int node = d.interior_nodes()[k];
      out[k] += dependence(d.coord(node), f[node]).first;
    }
  }
  return out;
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// K(f) - target, or empty when f is not admissible or leaves the chart.
struct Eval {
  bool ok = false;
  double residual = 0.0;
  double margin = 0.0;
  std::vector<double> r;
};

Eval evaluate(const GraphFunction& f, const SolveTarget& t) {
  Eval e;
  try {
    const auto a = assemble_curvature(f, t.chart);
    if (!a.admissible) return e;
    const auto phi = t.values(f);
    e.r.resize(phi.size());
    for (size_t k = 0; k < phi.size(); ++k) e.r[k] = a.nodes[k].K - phi[k];
    e.residual = inf_norm(e.r);
    e.margin = a.margin;
    e.ok = std::isfinite(e.residual);
  } catch (const Error&) {
    e.ok = false;
  }
  return e;
}

}  // namespace

double residual_norm(const GraphFunction& f, const SolveTarget& target) {
  const auto a = assemble_curvature(f, target.chart);
  const auto phi = target.values(f);
  double m = 0.0;
  for (size_t k = 0; k < phi.size(); ++k) m = std::max(m, std::abs(a.nodes[k].K - phi[k]));
  return m;
}

NewtonResult newton_solve(const GraphFunction& f_init, const SolveTarget& target, const NewtonOptions& opts,
                          double tau) {
  require_same_domain(*f_init.domain(), *target.domain);
  if (static_cast<int>(target.phi.size()) != target.domain->interior_count())
    fail(ErrorCode::InvalidArgument, "target needs one value per interior node");
  NewtonResult res;
  res.f = f_init;
  Eval cur = evaluate(res.f, target);
  if (!cur.ok) fail(ErrorCode::NonAdmissibleInit, "initial graph is not admissible");
  res.log.push_back({0, tau, cur.residual, cur.margin, 0.0});
  const auto& d = *target.domain;
  for (int it = 1;; ++it) {
    if (cur.residual <= opts.tol) break;
    if (it > opts.max_iter)
      fail(ErrorCode::NoConvergence, "Newton iteration limit reached, residual " + std::to_string(cur.residual));
    auto op = build_DK(res.f, target.chart);
    if (target.dependence) {
      for (int k = 0; k < d.interior_count(); ++k) {
        const int node = d.interior_nodes()[k];
        op.rows[k].c0 -= target.dependence(d.coord(node), res.f[node]).second;
      }
    }
    std::vector<double> rhs(cur.r.size());
    for (size_t k = 0; k < rhs.size(); ++k) rhs[k] = -cur.r[k];
    const auto delta = InteriorSolver(op).solve(rhs);
    const auto base = res.f.interior_values();

    bool accepted = false;
    double s = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, s *= 0.5) {
      std::vector<double> v(base.size());
      for (size_t k = 0; k < v.size(); ++k) v[k] = base[k] + s * delta[k];
      GraphFunction trial = res.f;
      trial.set_interior_values(v);
      Eval e = evaluate(trial, target);
      if (!e.ok) continue;
      if (e.margin < opts.kappa * cur.margin) continue;
      if (e.residual > (1.0 - s / 4.0) * cur.residual) continue;
      res.f = std::move(trial);
      cur = std::move(e);
      accepted = true;
      break;
    }
    if (!accepted)
      fail(ErrorCode::NoConvergence, "line search exhausted at residual " + std::to_string(cur.residual));
    res.iterations = it;
    res.log.push_back({it, tau, cur.residual, cur.margin, s});
  }
  res.residual = cur.residual;
  res.margin = cur.margin;
  return res;
}

SolveTarget ContinuationState::at(double t) const {
  SolveTarget out = goal;
  for (size_t k = 0; k < out.phi.size(); ++k) {
    out.phi[k] = (1.0 - t) * start[k] + t * goal.phi[k];
    if (!perturbation.empty()) out.phi[k] += perturbation[k];
  }
  return out;
}

std::vector<double> default_path_start(const SolveTarget& goal) {
  const double phi0 = base_of(goal.chart).curvature;
  std::vector<double> s(goal.phi.size());
  if (goal.barrier) {
    const double step = 0.05 * (goal.barrier->lower_curvature - phi0);
    std::fill(s.begin(), s.end(), phi0 + step);
  } else {
    for (size_t k = 0; k < s.size(); ++k) s[k] = phi0 + 0.05 * (goal.phi[k] - phi0);
  }
  return s;
}

namespace {

void check_sandwich(const ContinuationState& st, double tau, const GraphFunction& f, double tol) {
  if (!st.goal.barrier) return;
  const auto phi = st.at(tau).values(f);
  const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
  const auto rep = validate_sandwich(f, *st.goal.barrier, *lo, *hi, tol);
  if (!rep.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "sandwich violated at tau = %.6g (order %s, curvature %s, worst %.3g)", tau,
                  rep.order_ok ? "ok" : "broken", rep.curvature_ok ? "ok" : "broken", rep.worst);
    fail(ErrorCode::BarrierViolation, buf);
  }
}

void append_log(ContinuationState& st, const NewtonResult& r) {
  for (const auto& rec : r.log) st.log.push_back(rec);
  st.newton_total += r.iterations;
}

}  // namespace

GraphFunction continuation_solve(ContinuationState& st, const ContinuationOptions& opts) {
  const size_t N = st.goal.phi.size();
  if (st.start.size() != N) fail(ErrorCode::InvalidArgument, "path start has the wrong length");
  if (!st.perturbation.empty() && st.perturbation.size() != N)
    fail(ErrorCode::InvalidArgument, "perturbation has the wrong length");
  if (!st.f.domain()) st.f = GraphFunction(st.goal.domain);

  if (!st.started) {
    try {
      auto r = newton_solve(st.f, st.at(st.tau), opts.newton, st.tau);
      append_log(st, r);
      st.f = std::move(r.f);
      st.accepted.push_back({st.tau, r.residual, r.margin, r.iterations});
    } catch (const Error& e) {
      fail(e.code(), "path start at tau = " + std::to_string(st.tau) + ": " + e.what());
    }
    check_sandwich(st, st.tau, st.f, opts.sandwich_tol);
    st.started = true;
    // a constant path is crossed by the start solve alone
    if (st.start == st.goal.phi) {
      st.tau = 1.0;
      st.accepted.back().tau = 1.0;
    }
  }

  double dtau = std::clamp(opts.dtau_init, opts.dtau_min, opts.dtau_max);
  GraphFunction prev;
  double prev_tau = st.tau;
  bool have_prev = false;
  while (st.tau < 1.0) {
    const double next = std::min(1.0, st.tau + dtau);
    GraphFunction guess = st.f;
    if (opts.predictor == Predictor::Secant && have_prev && st.tau > prev_tau) {
      const double w = (next - st.tau) / (st.tau - prev_tau);
      auto a = st.f.interior_values(), b = prev.interior_values();
      for (size_t k = 0; k < a.size(); ++k) a[k] += w * (a[k] - b[k]);
      guess.set_interior_values(a);
      try {
        if (!assemble_curvature(guess, st.goal.chart).admissible) guess = st.f;
      } catch (const Error&) {
        guess = st.f;
      }
    }
    bool ok = false;
    NewtonResult r;
    try {
      r = newton_solve(guess, st.at(next), opts.newton, next);
      ok = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::NonAdmissibleInit &&
          e.code() != ErrorCode::SingularLinearSystem)
        fail(e.code(), "at tau = " + std::to_string(next) + ": " + e.what());
    }
    if (!ok) {
      dtau *= 0.5;
      if (dtau < opts.dtau_min) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "continuation step below %.3g; last good tau = %.17g", opts.dtau_min,
                      st.tau);
        fail(ErrorCode::StepsizeUnderflow, buf);
      }
      continue;
    }
    append_log(st, r);
    check_sandwich(st, next, r.f, opts.sandwich_tol);
    prev = std::move(st.f);
    prev_tau = st.tau;
    have_prev = true;
    st.f = std::move(r.f);
    st.tau = next;
    st.accepted.push_back({next, r.residual, r.margin, r.iterations});
    if (r.iterations <= opts.easy_steps) dtau = std::min(2.0 * dtau, opts.dtau_max);
  }
  return st.f;
}

std::vector<double> smooth_random_field(const GridDomain& d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  constexpr int modes = 6;
  double amp[modes], wx[modes], wy[modes], ph[modes];
  for (int m = 0; m < modes; ++m) {
    amp[m] = u(-1.0, 1.0) / (1.0 + m);
    wx[m] = u(-3.0, 3.0);
    wy[m] = d.n() == 2 ? u(-3.0, 3.0) : 0.0;
    ph[m] = u(0.0, 2.0 * M_PI);
  }
  std::vector<double> v(d.interior_count());
  for (int k = 0; k < d.interior_count(); ++k) {
    const Point x = d.coord(d.interior_nodes()[k]);
    double s = 0.0;
    for (int m = 0; m < modes; ++m) s += amp[m] * std::sin(wx[m] * x[0] + wy[m] * x[1] + ph[m]);
    v[k] = s;
  }
  return v;
}

ContinuationState perturb_rhs(const ContinuationState& state, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0)) fail(ErrorCode::InvalidArgument, "perturbation magnitude must be non-negative");
  ContinuationState out = state;
  if (magnitude == 0.0) return out;
  auto v = smooth_random_field(*state.goal.domain, seed);
  const double m = inf_norm(v);
  if (m == 0.0) return out;
  if (out.perturbation.empty()) out.perturbation.assign(v.size(), 0.0);
  for (size_t k = 0; k < v.size(); ++k) out.perturbation[k] += magnitude * v[k] / m;
  return out;
}

double sup_distance(const GraphFunction& a, const GraphFunction& b) {
  require_same_domain(*a.domain(), *b.domain());
  double m = 0.0;
  for (int node : a.domain()->interior_nodes()) m = std::max(m, std::abs(a[node] - b[node]));
  return m;
}

UniquenessReport uniqueness_probe(const SolveTarget& target, const std::vector<GraphFunction>& inits,
                                  const NewtonOptions& opts) {
  UniquenessReport rep;
  for (const auto& f0 : inits) {
    UniquenessReport::Branch b;
    try {
      b.result = newton_solve(f0, target, opts);
      b.ok = true;
    } catch (const Error& e) {
      b.error = e.what();
    }
    rep.branches.push_back(std::move(b));
  }
  for (size_t i = 0; i < rep.branches.size(); ++i)
    for (size_t j = i + 1; j < rep.branches.size(); ++j) {
      if (!rep.branches[i].ok || !rep.branches[j].ok) continue;
      const double d = sup_distance(rep.branches[i].result.f, rep.branches[j].result.f);
      rep.pairs.push_back({static_cast<int>(i), static_cast<int>(j), d});
      rep.max_distance = std::max(rep.max_distance, d);
    }
  return rep;
}

GraphFunction paraboloid(const DomainPtr& domain, double a) {
  const auto& g = domain->geometry();
  const int n = domain->n();
  return GraphFunction::from_function(domain, [&](const Point& x) {
    if (g.type == DomainType::Ball) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) r2 += (x[i] - g.center[i]) * (x[i] - g.center[i]);
      return a * (r2 - g.radius * g.radius);
    }
    double p = -1.0;
    for (int i = 0; i < n; ++i) p *= (x[i] - g.lo[i]) * (g.hi[i] - x[i]);
    return a * p;
  });
}

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& log) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  std::fprintf(fp, "iter,tau,residual,margin,step\n");
  for (const auto& r : log)
    std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.tau, r.residual, r.margin, r.step);
  if (std::fclose(fp) != 0) fail(ErrorCode::IOError, "write to '" + path + "' failed");
}

}  // namespace gaussgraph
