#include <Eigen/Dense>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gaussgraph/linearize.hpp"
#include "support.hpp"

using namespace gaussgraph;

namespace {

struct Setup {
  ChartSpec chart;
  DomainPtr domain;
  std::function<double(const Point&)> base;  // admissible graph
  std::function<double(const Point&)> bump;  // vanishes on the boundary
};

std::vector<Setup> setups() {
  auto disk = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 1.0);
  auto hdisk = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
  auto annulus = GridDomain::box(2, {33, 33}, {0.5, -0.5}, {1.5, 0.5});
  return {
      {ChartSpec::euclidean(2), disk, [](const Point& x) { return 0.4 * (x[0] * x[0] + x[1] * x[1] - 1.0); },
       [](const Point& x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; }},
      {ChartSpec::hyperbolic(2, 0.5), hdisk, [](const Point& x) { return 0.02 * (x[0] * x[0] + x[1] * x[1] - 0.25); },
       [](const Point& x) { return 4.0 * (0.25 - x[0] * x[0] - x[1] * x[1]); }},
      {ChartSpec::epsilon_family(2, 0.1, true), annulus, [](const Point& x) { return 0.3 * (x[0] * x[0] - 1.0); },
       [](const Point& x) { return (x[0] - 0.5) * (1.5 - x[0]) * (0.25 - x[1] * x[1]) * 16.0; }},
  };
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> K_values(const GraphFunction& f, const ChartSpec& chart) {
  auto a = assemble_curvature(f, chart);
  std::vector<double> k(a.nodes.size());
  for (size_t i = 0; i < k.size(); ++i) k[i] = a.nodes[i].K;
  return k;
}

}  // namespace

TEST_SUITE("linearize") {
  TEST_CASE("DK matches central differences of the assembled curvature") {
    Draw u(41);
    for (const auto& s : setups()) {
      for (int trial = 0; trial < 5; ++trial) {
        SmoothField pert(u), dir(u);
        auto f = GraphFunction::from_function(s.domain, [&](const Point& x) {
          return s.base(x) + 0.01 * s.bump(x) * pert(x);
        });
        auto v = GraphFunction::from_function(s.domain, [&](const Point& x) { return s.bump(x) * dir(x); });
        REQUIRE(assemble_curvature(f, s.chart).admissible);
        auto DKv = build_DK(f, s.chart).apply(v);
        const double eps = 1e-5;
        GraphFunction fp = f, fm = f;
        for (size_t i = 0; i < f.values().size(); ++i) {
          fp.values()[i] += eps * v.values()[i];
          fm.values()[i] -= eps * v.values()[i];
        }
        auto Kp = K_values(fp, s.chart), Km = K_values(fm, s.chart);
        std::vector<double> diff(DKv.size());
        for (size_t i = 0; i < diff.size(); ++i) diff[i] = DKv[i] - (Kp[i] - Km[i]) / (2 * eps);
        CHECK(inf_norm(diff) <= 1e-6 * inf_norm(DKv));
      }
    }
  }

  TEST_CASE("second-order coefficient is positive definite and equals K Bn in the frame") {
    Draw u(42);
    for (const auto& s : setups()) {
      SmoothField pert(u);
      auto f = GraphFunction::from_function(s.domain, [&](const Point& x) {
        return s.base(x) + 0.01 * s.bump(x) * pert(x);
      });
      auto a = assemble_curvature(f, s.chart);
      REQUIRE(a.admissible);
      auto DK = build_DK(f, s.chart);
      auto L = build_L(f, s.chart);
      auto B = build_B(a);
      for (int k = 0; k < s.domain->interior_count(); k += 7) {
        auto c = DK.second_order(k);
        Eigen::Matrix2d C;
        C << c[0][0], c[0][1], c[1][0], c[1][1];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
        CHECK(es.eigenvalues()(0) > 0.0);

        const Point x = s.domain->coord(s.domain->interior_nodes()[k]);
        const NodeFrame fr = node_frame(s.chart, x.data());
        Eigen::Matrix2d E;
        E << fr.E[0][0], fr.E[0][1], fr.E[1][0], fr.E[1][1];
        auto l = L.second_order(k);
        Eigen::Matrix2d Lc;
        Lc << l[0][0], l[0][1], l[1][0], l[1][1];
        Eigen::Matrix2d Lf = E.inverse() * Lc * E.inverse() / fr.c;
        const double K = a.nodes[k].K;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) CHECK(Lf(i, j) == doctest::Approx(K * B[k][i][j]).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("B on the base equidistant is Id / (n tanh D)") {
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto a = assemble_curvature(GraphFunction(dom), ChartSpec::hyperbolic(2, 0.5));
    for (const auto& B : build_B(a)) {
      CHECK(B[0][0] == doctest::Approx(1.0 / (2.0 * std::tanh(0.5))).epsilon(1e-12));
      CHECK(B[1][1] == doctest::Approx(1.0 / (2.0 * std::tanh(0.5))).epsilon(1e-12));
      CHECK(std::abs(B[0][1]) < 1e-14);
    }
  }

  TEST_CASE("Jacobi zeroth order on H(D) is n (coth D - tanh D)") {
    Draw u(43);
    for (int trial = 0; trial < 20; ++trial) {
      const double D = u(0.05, 5.0);
      for (int n : {1, 2}) {
        auto chart = ChartSpec::hyperbolic(n, D);
        const Point x{u(-0.4, 0.4), n == 2 ? u(-0.4, 0.4) : 0.0};
        const double h = jacobi_zeroth_order(chart, x);
        const double ref = n * (1.0 / std::tanh(D) - std::tanh(D));
        CHECK(h >= 0.0);
        CHECK(h == doctest::Approx(ref).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("DK at the base is a multiple of the Jacobi operator") {
    for (double D : {0.5, 1.2}) {
      auto chart = ChartSpec::hyperbolic(2, D);
      auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
      auto DK = build_DK(GraphFunction(dom), chart);
      auto JK = build_JK(chart, dom);
      const double scale = -std::tanh(D) * std::cosh(D) / 2.0;
      for (size_t k = 0; k < DK.rows.size(); ++k) {
        CHECK(DK.rows[k].c0 == doctest::Approx(scale * JK.rows[k].c0).epsilon(1e-6));
        for (int i = 0; i < 2; ++i)
          CHECK(DK.rows[k].c1[i] == doctest::Approx(scale * JK.rows[k].c1[i]).epsilon(1e-9));
        for (int i = 0; i < 3; ++i)
          CHECK(DK.rows[k].c2[i] == doctest::Approx(scale * JK.rows[k].c2[i]).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("Jacobi operator needs an invertible base shape operator") {
    auto dom = GridDomain::ball(2, {9, 9}, {0.0, 0.0}, 0.5);
    try {
      build_JK(ChartSpec::euclidean(2), dom);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularShapeOperator);
    }
    CHECK_THROWS_AS(build_JK(ChartSpec::hyperbolic(2, 0.0), dom), Error);
  }

  TEST_CASE("the base equidistant is stable") {
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    auto rep = stability_check(GraphFunction(dom), ChartSpec::hyperbolic(2, 0.5));
    CHECK(rep.stable);
    CHECK(rep.max_witness < 0.0);
    auto bat = stability_battery(GraphFunction(dom), ChartSpec::hyperbolic(2, 0.5), 20, 5);
    CHECK(bat.pass());
    CHECK(bat.sources == 20);
  }

  TEST_CASE("witness sign pattern is invariant under positive scaling of the source") {
    auto dom = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto op = build_DK(GraphFunction(dom), ChartSpec::hyperbolic(2, 0.5));
    InteriorSolver s(op);
    auto w1 = s.solve(std::vector<double>(op.rows.size(), 1.0));
    auto w10 = s.solve(std::vector<double>(op.rows.size(), 10.0));
    for (size_t i = 0; i < w1.size(); ++i) CHECK((w1[i] < 0.0) == (w10[i] < 0.0));
  }

  TEST_CASE("linearization at a non-admissible graph is rejected") {
    auto dom = GridDomain::ball(2, {9, 9}, {0.0, 0.0}, 1.0);
    try {
      build_DK(GraphFunction(dom), ChartSpec::euclidean(2));
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonAdmissible);
    }
  }

  TEST_CASE("full matrix has identity boundary rows and exports as triplets") {
    auto dom = GridDomain::ball(2, {9, 9}, {0.0, 0.0}, 0.5);
    auto DK = build_DK(GraphFunction(dom), ChartSpec::hyperbolic(2, 0.5));
    auto M = DK.full_matrix();
    CHECK(M.rows() == dom->node_count());
    for (int node = 0; node < dom->node_count(); ++node) {
      if (dom->is_interior(node)) continue;
      double rowsum = 0.0;
      for (int c = 0; c < M.cols(); ++c) rowsum += std::abs(M.coeff(node, c));
      CHECK(M.coeff(node, node) == 1.0);
      CHECK(rowsum == 1.0);
    }
    const auto path = (std::filesystem::temp_directory_path() / "gaussgraph_dk.txt").string();
    write_triplets(path, M);
    std::ifstream in(path);
    long r, c, nnz;
    in >> r >> c >> nnz;
    CHECK(r == dom->node_count());
    CHECK(nnz == M.nonZeros());
    std::filesystem::remove(path);
  }
}
