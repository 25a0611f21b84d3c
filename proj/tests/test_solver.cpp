#include <cmath>

#include "doctest.h"
#include "gaussgraph/solver.hpp"
#include "support.hpp"

using namespace gaussgraph;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // sentinel: nothing thrown
}

double cap_error(const GraphFunction& f, double R) {
  double m = 0.0;
  for (int node : f.domain()->interior_nodes()) {
    const Point x = f.domain()->coord(node);
    const double ref = std::sqrt(R * R - 1.0) - std::sqrt(R * R - x[0] * x[0] - x[1] * x[1]);
    m = std::max(m, std::abs(f[node] - ref));
  }
  return m;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("Newton returns to the equidistant from a nearby graph") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    Draw u(3);
    SmoothField bump(u, 0.5);
    auto f0 = GraphFunction::from_function(dom, [&](const Point& x) { return 0.01 * bump(x); });
    auto r = newton_solve(f0, SolveTarget::constant(chart, dom, std::tanh(0.5)));
    CHECK(r.residual <= 1e-9);
    double m = 0.0;
    for (double v : r.f.values()) m = std::max(m, std::abs(v));
    CHECK(m <= 1e-8);
  }

  TEST_CASE("Newton reaches the Euclidean sphere cap at second order") {
    auto chart = ChartSpec::euclidean(2);
    double err[2];
    int i = 0;
    for (int N : {17, 33}) {
      auto dom = GridDomain::ball(2, {N, N}, {0.0, 0.0}, 1.0);
      auto r = newton_solve(paraboloid(dom, 0.25), SolveTarget::constant(chart, dom, 0.5));
      CHECK(r.residual <= 1e-9);
      for (size_t j = 1; j < r.log.size(); ++j) {
        CHECK(r.log[j].residual < r.log[j - 1].residual);
        CHECK(r.log[j].margin > 0.0);
      }
      err[i++] = cap_error(r.f, 2.0);
    }
    CHECK(err[1] < 1e-3);
    CHECK(err[0] / err[1] > 3.0);
  }

  TEST_CASE("Newton rejects a non-admissible start") {
    auto dom = GridDomain::ball(2, {9, 9}, {0.0, 0.0}, 1.0);
    CHECK(code_of([&] { newton_solve(GraphFunction(dom), SolveTarget::constant(ChartSpec::euclidean(2), dom, 0.5)); }) ==
          ErrorCode::NonAdmissibleInit);
  }

  TEST_CASE("f-dependent targets") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto t = SolveTarget::constant(chart, dom, 0.6);
    t.dependence = [](const Point& x, double f) { return std::make_pair(0.2 * f + 0.01 * x[0], 0.2); };
    auto r = newton_solve(GraphFunction(dom), t);
    CHECK(r.residual <= 1e-9);
    CHECK(residual_norm(r.f, t) <= 1e-9);
  }

  TEST_CASE("continuation along the curvature path") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    ContinuationState st;
    st.goal = SolveTarget::constant(chart, dom, 0.9);
    st.goal.barrier = make_cap_barrier(chart, dom, 1.0, 0.05);
    st.start.assign(dom->interior_count(), std::tanh(0.5) + 0.05);
    auto f = continuation_solve(st);
    CHECK(st.tau == 1.0);
    CHECK(st.newton_total <= 40);
    CHECK(residual_norm(f, st.goal) <= 1e-9);
    for (const auto& rec : st.log) CHECK(rec.margin > 0.0);
    for (const auto& a : st.accepted) CHECK(a.residual <= 1e-9);
    CHECK(validate_sandwich(f, *st.goal.barrier, 0.9, 0.9, 1e-8).pass);
  }

  TEST_CASE("a constant path needs one corrector solve") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    ContinuationState st;
    st.goal = SolveTarget::constant(chart, dom, 0.6);
    st.start = st.goal.phi;
    continuation_solve(st);
    CHECK(st.accepted.size() == 1);
    CHECK(st.tau == 1.0);
  }

  TEST_CASE("paths beyond the barrier fail") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    ContinuationState st;
    st.goal = SolveTarget::constant(chart, dom, 1.5);
    st.start.assign(dom->interior_count(), 0.6);
    CHECK(code_of([&] { continuation_solve(st); }) == ErrorCode::StepsizeUnderflow);
    CHECK(st.tau > 0.0);
    CHECK(st.tau < 1.0);
    CHECK(assemble_curvature(st.f, chart).admissible);

    ContinuationState sb;
    sb.goal = SolveTarget::constant(chart, dom, 0.98);
    sb.goal.barrier = make_cap_barrier(chart, dom, 1.0, 0.05);
    sb.start.assign(dom->interior_count(), 0.6);
    CHECK(code_of([&] { continuation_solve(sb); }) == ErrorCode::BarrierViolation);
  }

  TEST_CASE("perturbations are reproducible and norm-bounded") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    ContinuationState st;
    st.goal = SolveTarget::constant(chart, dom, 0.7);
    st.start.assign(dom->interior_count(), 0.6);
    CHECK(perturb_rhs(st, 0.0, 1).perturbation.empty());
    auto a = perturb_rhs(st, 1e-6, 42), b = perturb_rhs(st, 1e-6, 42), c = perturb_rhs(st, 1e-6, 43);
    CHECK(a.perturbation == b.perturbation);
    CHECK(a.perturbation != c.perturbation);
    double m = 0.0;
    for (double v : a.perturbation) m = std::max(m, std::abs(v));
    CHECK(m == doctest::Approx(1e-6).epsilon(1e-12));
    auto f = continuation_solve(a);
    CHECK(residual_norm(f, a.at(1.0)) <= 1e-9);
    CHECK(residual_norm(f, st.goal) <= 1e-6 + 1e-9);
  }

  TEST_CASE("uniqueness probe") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    auto t = SolveTarget::constant(chart, dom, 0.6);
    auto cap = sphere_cap_barrier(chart, dom, 0.8);
    auto rep = uniqueness_probe(t, {GraphFunction(dom), cap});
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.max_distance <= 1e-8);

    CHECK(uniqueness_probe(t, {cap}).pairs.empty());

    GraphFunction bad = cap;
    for (double& v : bad.values()) v *= -20.0;
    auto rep3 = uniqueness_probe(t, {GraphFunction(dom), bad, cap});
    CHECK_FALSE(rep3.branches[1].ok);
    CHECK(rep3.branches[1].error.find("NonAdmissibleInit") != std::string::npos);
    CHECK(rep3.pairs.size() == 1);
  }

  TEST_CASE("larger curvature gives a lower graph") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    auto lo = newton_solve(GraphFunction(dom), SolveTarget::constant(chart, dom, 0.8)).f;
    auto hi = newton_solve(GraphFunction(dom), SolveTarget::constant(chart, dom, 0.6)).f;
    for (int node : dom->interior_nodes()) CHECK(lo[node] < hi[node]);
  }

  TEST_CASE("identical runs are bitwise identical") {
    auto chart = ChartSpec::hyperbolic(2, 0.5);
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto run = [&] {
      ContinuationState st;
      st.goal = SolveTarget::constant(chart, dom, 0.8);
      st.start.assign(dom->interior_count(), 0.5);
      st = perturb_rhs(st, 1e-7, 9);
      return continuation_solve(st).values();
    };
    CHECK(run() == run());
  }
}
