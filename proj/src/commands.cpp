#include "gaussgraph/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

namespace gaussgraph {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string out_path(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.output.dir, ec);
  if (ec) fail(ErrorCode::IOError, "cannot create output directory '" + c.output.dir + "': " + ec.message());
  return (fs::path(c.output.dir) / name).string();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GraphFunction initial_graph(const RunConfig& c, const ChartSpec& chart, const DomainPtr& dom) {
  const auto& s = c.solver;
  if (s.init == "paraboloid") return paraboloid(dom, s.init_a);
  if (s.init == "cap") return sphere_cap_barrier(chart, dom, s.init_k);
  if (s.init == "file") {
    auto g = read_grid_file(s.init_path);
    require_same_domain(*g.f.domain(), *dom);
    return g.f;
  }
  return GraphFunction(dom);
}

int report_error(const Error& e, const char* what) {
  std::fprintf(stderr, "%s: %s\n", what, e.what());
  return exit_code_for(e.code());
}

}  // namespace

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IOError, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IOError, "write to '" + path + "' failed");
}

SolveOutcome run_solve(const RunConfig& c, int points) {
  require_solve_keys(c);
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  out.chart = c.chart_spec();
  const DomainPtr dom = points > 0 ? c.make_domain(points) : c.make_domain();
  const double k = *c.problem.k;
  SolveTarget target = SolveTarget::constant(out.chart, dom, k);
  target.gap = c.problem.eps_gap;
  try {
    if (c.problem.barrier == "sphere_cap") {
      target.barrier = make_cap_barrier(out.chart, dom, c.problem.barrier_k, c.problem.eps_gap);
      out.barrier = target.barrier;
    }
    GraphFunction init = initial_graph(c, out.chart, dom);
    out.f = init;
    if (c.solver.method == "newton") {
      if (c.solver.perturbation > 0.0) {
        const auto p = smooth_random_field(*dom, c.solver.seed);
        double m = 0.0;
        for (double v : p) m = std::max(m, std::abs(v));
        if (m > 0.0)
          for (size_t i = 0; i < p.size(); ++i) target.phi[i] += c.solver.perturbation * p[i] / m;
      }
      auto r = newton_solve(init, target, c.solver.newton);
      out.f = std::move(r.f);
      out.log = std::move(r.log);
      out.newton_iterations = r.iterations;
      out.residual = r.residual;
      out.margin = r.margin;
      out.tau = 1.0;
      out.path.push_back({1.0, out.residual, out.margin, r.iterations});
      if (out.barrier) {
        const auto rep = validate_sandwich(out.f, *out.barrier, k, k, c.solver.path.sandwich_tol);
        if (!rep.pass) fail(ErrorCode::BarrierViolation, "solution leaves the barrier sandwich");
      }
    } else {
      ContinuationState st;
      st.goal = target;
      st.start = c.problem.k_start ? std::vector<double>(target.phi.size(), *c.problem.k_start)
                                   : default_path_start(target);
      st.f = init;
      st = perturb_rhs(st, c.solver.perturbation, c.solver.seed);
      try {
        continuation_solve(st, c.solver.path);
      } catch (const Error&) {
        out.f = st.f;
        out.log = st.log;
        out.path = st.accepted;
        out.tau = st.tau;
        out.newton_iterations = st.newton_total;
        throw;
      }
      out.f = st.f;
      out.log = std::move(st.log);
      out.path = std::move(st.accepted);
      out.tau = st.tau;
      out.newton_iterations = st.newton_total;
      out.residual = out.path.back().residual;
      out.margin = out.path.back().margin;
    }
    out.ok = true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IOError) throw;
    out.ok = false;
    out.error = e.code();
    out.message = e.what();
  }
  out.seconds = seconds_since(t0);
  return out;
}

int cmd_solve(const RunConfig& c, json* summary) {
  try {
    const SolveOutcome o = run_solve(c);
    write_iteration_log(out_path(c, "iterations.csv"), o.log);
    if (o.f.domain()) write_grid_file(out_path(c, o.ok ? "solution.grid" : "last_good.grid"), o.f, o.chart);
    if (o.barrier) write_grid_file(out_path(c, "barrier.grid"), o.barrier->lower, o.chart);
    json s;
    s["command"] = "solve";
    s["status"] = o.ok ? "converged" : error_name(o.error);
    s["exit_code"] = o.ok ? kExitOk : exit_code_for(o.error);
    if (!o.ok) s["message"] = o.message;
    s["chart"] = chart_id(o.chart);
    s["shape"] = o.f.domain() ? json(o.f.domain()->shape()) : json(nullptr);
    s["k"] = *c.problem.k;
    s["method"] = c.solver.method;
    s["seed"] = c.solver.seed;
    s["perturbation"] = c.solver.perturbation;
    s["tau"] = o.tau;
    s["residual"] = num(o.ok ? o.residual : kNaN);
    s["margin"] = num(o.ok ? o.margin : kNaN);
    s["newton_iterations"] = o.newton_iterations;
    json steps = json::array();
    for (const auto& p : o.path)
      steps.push_back({{"tau", p.tau}, {"residual", p.residual}, {"margin", p.margin}, {"newton_steps", p.newton_steps}});
    s["path"] = steps;
    if (o.ok && o.barrier) {
      const auto rep = validate_sandwich(o.f, *o.barrier, *c.problem.k, *c.problem.k, c.solver.path.sandwich_tol);
      s["sandwich"] = {{"pass", rep.pass}, {"worst", rep.worst}};
    }
    s["timings"] = {{"total_seconds", o.seconds}};
    write_json(out_path(c, "summary.json"), s);
    if (summary) *summary = s;
    if (!o.ok) std::fprintf(stderr, "solve: %s\n", o.message.c_str());
    return s["exit_code"].get<int>();
  } catch (const Error& e) {
    return report_error(e, "solve");
  }
}

int cmd_curvature(const RunConfig& c, json* summary) {
  try {
    if (c.input.grid.empty()) fail(ErrorCode::ConfigError, c.source + ": field 'input.grid': required key missing");
    const auto t0 = std::chrono::steady_clock::now();
    const GridFile g = read_grid_file(c.input.grid);
    if (chart_id(g.chart) != chart_id(c.chart_spec()))
      fail(ErrorCode::ConfigError, c.source + ": field 'chart': grid file is on chart '" + chart_id(g.chart) + "'");
    const auto a = assemble_curvature(g.f, g.chart);
    const auto o = curvature_oracle(g.f, g.chart);
    write_kfield_csv(out_path(c, "kfield.csv"), a);
    double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin, gap = 0.0;
    for (size_t i = 0; i < a.nodes.size(); ++i) {
      kmin = std::min(kmin, a.nodes[i].K);
      kmax = std::max(kmax, a.nodes[i].K);
      gap = std::max(gap, std::abs(a.nodes[i].K - o.nodes[i].K));
    }
    json s;
    s["command"] = "curvature";
    s["chart"] = chart_id(g.chart);
    s["shape"] = g.f.domain()->shape();
    s["interior_nodes"] = a.nodes.size();
    s["admissible"] = a.admissible;
    s["margin"] = num(a.margin);
    s["K_min"] = num(kmin);
    s["K_max"] = num(kmax);
    s["oracle_gap"] = num(gap);
    s["timings"] = {{"total_seconds", seconds_since(t0)}};
    write_json(out_path(c, "curvature_summary.json"), s);
    if (summary) *summary = s;
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, "curvature");
  }
}

int cmd_validate(const RunConfig& c, json* summary) {
  try {
    // without input.grid, validate the solution a previous solve left in output.dir
    const std::string grid =
        c.input.grid.empty() ? (fs::path(c.output.dir) / "solution.grid").string() : c.input.grid;
    const GridFile g = read_grid_file(grid);
    const ChartSpec chart = g.chart;
    if (chart_id(chart) != chart_id(c.chart_spec()))
      fail(ErrorCode::ConfigError, c.source + ": field 'chart': grid file is on chart '" + chart_id(chart) + "'");
    const GraphFunction& f = g.f;
    const DomainPtr dom = f.domain();
    const auto& v = c.validate;
    json checks = json::array();
    bool pass = true;
    auto add = [&](json chk) {
      if (chk.value("status", std::string()) != "skipped") pass = pass && chk["pass"].get<bool>();
      checks.push_back(std::move(chk));
    };

    CurvatureAssembly a;
    bool assembled = false;
    try {
      a = assemble_curvature(f, chart);
      assembled = true;
      add({{"name", "admissible"}, {"pass", a.admissible}, {"margin", num(a.margin)}});
    } catch (const Error& e) {
      add({{"name", "admissible"}, {"pass", false}, {"error", e.what()}});
    }

    // position between the lower barrier and the base
    std::optional<BarrierPair> barrier;
    if (!c.input.barrier.empty()) {
      const GridFile b = read_grid_file(c.input.barrier);
      require_same_domain(*b.f.domain(), *dom);
      BarrierPair bp;
      bp.lower = b.f;
      bp.lower_curvature = c.problem.barrier_k;
      bp.gap = c.problem.eps_gap;
      bp.base_curvature = base_of(chart).curvature;
      bp.tag = "user";
      barrier = bp;
    } else if (c.problem.barrier == "sphere_cap") {
      barrier = make_cap_barrier(chart, dom, c.problem.barrier_k, c.problem.eps_gap);
    }
    if (!barrier) {
      BarrierPair bp;  // no lower barrier: only the upper side is tested
      bp.lower = GraphFunction(dom);
      for (double& x : bp.lower.values()) x = -std::numeric_limits<double>::infinity();
      bp.lower_curvature = std::numeric_limits<double>::infinity();
      bp.base_curvature = base_of(chart).curvature;
      bp.tag = "none";
      barrier = bp;
    }
    {
      const double k = c.problem.k ? *c.problem.k : kNaN;
      const auto rep = validate_sandwich(f, *barrier, k, k, v.sandwich_tol);
      add({{"name", "sandwich"},
           {"pass", rep.pass},
           {"barrier", barrier->tag},
           {"order_ok", rep.order_ok},
           {"curvature_ok", rep.curvature_ok},
           {"below_barrier", rep.below_barrier.size()},
           {"above_base", rep.above_base.size()},
           {"worst", rep.worst}});
    }
    {
      const Order o = order_compare(f, GraphFunction(dom));
      add({{"name", "order"}, {"pass", o == Order::Less || o == Order::Equal}, {"relation", order_name(o)}});
    }
    if (c.problem.k && assembled) {
      const double r = residual_norm(f, SolveTarget::constant(chart, dom, *c.problem.k));
      add({{"name", "residual"}, {"pass", r <= v.residual_tol}, {"value", num(r)}});
    }
    if (v.stability) {
      try {
        const auto st = stability_check(GraphFunction(dom), chart);
        const auto bat = stability_battery(GraphFunction(dom), chart, 20, c.solver.seed);
        add({{"name", "stability"},
             {"pass", st.stable && bat.pass()},
             {"stable", st.stable},
             {"max_witness", st.max_witness},
             {"battery_negative", bat.negative},
             {"battery_sources", bat.sources}});
      } catch (const Error& e) {
        add({{"name", "stability"}, {"status", "skipped"}, {"reason", e.what()}});
      }
    }
    if (v.pogorelov && assembled && a.admissible) {
      try {
        const auto cut = radial_cutoff(*dom, v.cutoff_inner, v.cutoff_outer);
        const auto rep = pogorelov_monitor(f, chart, v.alpha, cut);
        add({{"name", "pogorelov"},
             {"pass", std::isfinite(rep.sup)},
             {"sup", num(rep.sup)},
             {"argmax_node", rep.argmax_node},
             {"support", rep.support_size}});
      } catch (const Error& e) {
        add({{"name", "pogorelov"}, {"pass", false}, {"error", e.what()}});
      }
    }
    if (assembled && a.admissible) {
      const auto est = curvature_norm_report(f, chart);
      add({{"name", "estimates"},
           {"pass", std::isfinite(est.sup)},
           {"interior_sup", est.interior_sup},
           {"boundary_sup", est.boundary_sup},
           {"min_eigenvalue", est.min_eigenvalue},
           {"max_eigenvalue", est.max_eigenvalue},
           {"lipschitz", est.lipschitz},
           {"weighted_sup", est.weighted_sup}});
    }

    json s;
    s["command"] = "validate";
    s["chart"] = chart_id(chart);
    s["pass"] = pass;
    s["checks"] = checks;
    write_json(out_path(c, "validate.json"), s);
    if (summary) *summary = s;
    return pass ? kExitOk : kExitChecksFailed;
  } catch (const Error& e) {
    return report_error(e, "validate");
  }
}

SweepResult run_sweep(const RunConfig& c, int jobs) {
  require_solve_keys(c);
  const auto& shapes = c.sweep.shapes;
  SweepResult res;
  res.rows.resize(shapes.size());
  // independent solves, merged by input order
  std::vector<std::exception_ptr> errs(shapes.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < shapes.size();) {
      try {
        res.rows[i].points = shapes[i];
        res.rows[i].outcome = run_solve(c, shapes[i]);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(shapes.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  const ChartSpec chart = c.chart_spec();
  const bool radial = c.domain.type == "ball" && c.solver.perturbation == 0.0 &&
                      (chart.kind == ChartKind::EuclideanGraph ||
                       (chart.kind == ChartKind::HyperbolicConformal && c.domain.center[0] == 0.0 &&
                        c.domain.center[1] == 0.0));
  // reference: the radial cap when the problem is radial, else the finest grid
  size_t finest = 0;
  for (size_t i = 0; i < shapes.size(); ++i)
    if (shapes[i] > shapes[finest]) finest = i;
  res.reference = radial ? "cap" : "finest";
  for (auto& row : res.rows) {
    const auto& o = row.outcome;
    row.h = o.f.domain()->spacing()[0];
    row.error = kNaN;
    row.order = kNaN;
    if (!o.ok) continue;
    const auto& d = *o.f.domain();
    if (radial) {
      const auto p = cap_profile(chart, o.f.domain(), *c.problem.k);
      double e = 0.0;
      for (int node : d.interior_nodes()) {
        const Point x = d.coord(node);
        const double r = std::hypot(x[0] - c.domain.center[0], chart.n == 2 ? x[1] - c.domain.center[1] : 0.0);
        e = std::max(e, std::abs(o.f[node] - p(r)));
      }
      row.error = e;
    } else {
      const auto& ref = res.rows[finest].outcome;
      if (&row == &res.rows[finest] || !ref.ok) continue;
      const auto& dr = *ref.f.domain();
      const double hr = dr.spacing()[0];
      const int ratio = static_cast<int>(std::lround(row.h / hr));
      double e = 0.0;
      bool nested = ratio >= 1 && std::abs(ratio * hr - row.h) < 1e-12 * row.h;
      for (int node : d.interior_nodes()) {
        if (!nested) break;
        const Point x = d.coord(node);
        const int i = static_cast<int>(std::lround((x[0] - dr.coord(0)[0]) / hr));
        const int j = d.n() == 2 ? static_cast<int>(std::lround((x[1] - dr.coord(0)[1]) / dr.spacing()[1])) : 0;
        if (i < 0 || i >= dr.shape()[0] || j < 0 || j >= dr.shape()[1]) {
          nested = false;
          break;
        }
        const int rn = dr.node_index(i, j);
        const Point y = dr.coord(rn);
        if (std::abs(y[0] - x[0]) > 1e-12 || std::abs(y[1] - x[1]) > 1e-12) {
          nested = false;
          break;
        }
        e = std::max(e, std::abs(o.f[node] - ref.f[rn]));
      }
      if (nested) row.error = e;
    }
  }
  for (size_t i = 1; i < res.rows.size(); ++i) {
    const auto &a = res.rows[i - 1], &b = res.rows[i];
    if (a.error > 0.0 && b.error > 0.0 && a.h != b.h) res.rows[i].order = std::log(a.error / b.error) / std::log(a.h / b.h);
  }
  return res;
}

int cmd_sweep(const RunConfig& c, int jobs, json* summary) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult r = run_sweep(c, jobs);
    std::FILE* fp = std::fopen(out_path(c, "sweep.csv").c_str(), "w");
    if (!fp) fail(ErrorCode::IOError, "cannot write sweep.csv");
    std::fprintf(fp, "points,h,error,order,residual,newton_iterations,status\n");
    json rows = json::array();
    bool ok = true;
    for (const auto& row : r.rows) {
      const auto& o = row.outcome;
      ok = ok && o.ok;
      std::fprintf(fp, "%d,%.17g,%.17g,%.17g,%.17g,%d,%s\n", row.points, row.h, row.error, row.order,
                   o.ok ? o.residual : kNaN, o.newton_iterations, o.ok ? "converged" : error_name(o.error));
      rows.push_back({{"points", row.points},
                      {"h", row.h},
                      {"error", num(row.error)},
                      {"order", num(row.order)},
                      {"residual", num(o.ok ? o.residual : kNaN)},
                      {"newton_iterations", o.newton_iterations},
                      {"status", o.ok ? "converged" : error_name(o.error)}});
      if (o.ok)
        write_grid_file(out_path(c, "solution_" + std::to_string(row.points) + ".grid"), o.f, o.chart);
    }
    if (std::fclose(fp) != 0) fail(ErrorCode::IOError, "write to sweep.csv failed");
    json s;
    s["command"] = "sweep";
    s["chart"] = chart_id(c.chart_spec());
    s["k"] = *c.problem.k;
    s["reference"] = r.reference;
    s["rows"] = rows;
    s["timings"] = {{"total_seconds", seconds_since(t0)}};
    write_json(out_path(c, "sweep.json"), s);
    if (summary) *summary = s;
    if (!ok) {
      for (const auto& row : r.rows)
        if (!row.outcome.ok) return exit_code_for(row.outcome.error);
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, "sweep");
  }
}

}  // namespace gaussgraph
