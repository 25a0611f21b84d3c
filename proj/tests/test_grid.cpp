#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gaussgraph/grid.hpp"
#include "support.hpp"

using namespace gaussgraph;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gaussgraph_" + name)).string();
}

struct Quadratic {
  double a, b0, b1, c00, c01, c11;
  double operator()(const Point& x) const {
    return a + b0 * x[0] + b1 * x[1] + c00 * x[0] * x[0] + 2 * c01 * x[0] * x[1] + c11 * x[1] * x[1];
  }
};

std::vector<DomainPtr> sample_domains() {
  return {GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 1.0),
          GridDomain::ball(2, {29, 37}, {0.1, -0.05}, 0.77),
          GridDomain::ball(2, {65, 65}, {0.0, 0.0}, 0.5),
          GridDomain::box(2, {17, 23}, {0.5, -1.0}, {1.5, 1.0}),
          GridDomain::ball(1, {21, 1}, {0.3, 0.0}, 0.8),
          GridDomain::box(1, {15, 1}, {-1.0, 0.0}, {2.0, 0.0})};
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("difference weights are exact on quartics") {
    Draw u(21);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> s{0.0, u(0.01, 1.0), -1.0, -2.0, -3.0};
      std::vector<double> w1, w2;
      fd_weights(s, w1, w2);
      for (int deg = 0; deg <= 4; ++deg) {
        double d1 = 0.0, d2 = 0.0;
        for (size_t i = 0; i < s.size(); ++i) {
          d1 += w1[i] * std::pow(s[i], deg);
          d2 += w2[i] * std::pow(s[i], deg);
        }
        CHECK(std::abs(d1 - (deg == 1 ? 1.0 : 0.0)) < 1e-9);
        CHECK(std::abs(d2 - (deg == 2 ? 2.0 : 0.0)) < 1e-9);
      }
    }
  }

  TEST_CASE("cut-cell stencils differentiate quadratics exactly") {
    Draw u(22);
    for (const auto& dom : sample_domains()) {
      for (int trial = 0; trial < 5; ++trial) {
        Quadratic q{u(-1, 1), u(-1, 1), u(-1, 1), u(-1, 1), u(-1, 1), u(-1, 1)};
        if (dom->n() == 1) q.b1 = q.c01 = q.c11 = 0.0;
        auto f = GraphFunction::from_function(dom, q);
        double err = 0.0;
        for (int k = 0; k < dom->interior_count(); ++k) {
          double v;
          std::array<double, 2> p;
          std::array<double, 3> H;
          f.jet(k, v, p, H);
          const Point x = dom->coord(dom->interior_nodes()[k]);
          err = std::max(err, std::abs(p[0] - (q.b0 + 2 * q.c00 * x[0] + 2 * q.c01 * x[1])));
          err = std::max(err, std::abs(H[0] - 2 * q.c00));
          if (dom->n() == 2) {
            err = std::max(err, std::abs(p[1] - (q.b1 + 2 * q.c01 * x[0] + 2 * q.c11 * x[1])));
            err = std::max(err, std::abs(H[1] - 2 * q.c01));
            err = std::max(err, std::abs(H[2] - 2 * q.c11));
          }
        }
        CHECK(err < 1e-7);
      }
    }
  }

  TEST_CASE("Hessian of a smooth function converges at second order") {
    auto fn = [](const Point& x) { return std::sin(1.3 * x[0] + 0.4) * std::cos(0.9 * x[1] - 0.2); };
    double err[2];
    int shapes[2] = {33, 65};
    for (int m = 0; m < 2; ++m) {
      auto dom = GridDomain::ball(2, {shapes[m], shapes[m]}, {0.0, 0.0}, 1.0);
      auto f = GraphFunction::from_function(dom, fn);
      double e = 0.0;
      for (int k = 0; k < dom->interior_count(); ++k) {
        double v;
        std::array<double, 2> p;
        std::array<double, 3> H;
        f.jet(k, v, p, H);
        const Point x = dom->coord(dom->interior_nodes()[k]);
        const double a = 1.3 * x[0] + 0.4, b = 0.9 * x[1] - 0.2;
        e = std::max(e, std::abs(H[0] + 1.69 * std::sin(a) * std::cos(b)));
        e = std::max(e, std::abs(H[1] + 1.17 * std::cos(a) * std::sin(b)));
        e = std::max(e, std::abs(H[2] + 0.81 * std::sin(a) * std::cos(b)));
      }
      err[m] = e;
    }
    CHECK(ratio_ok(err[0], err[1]));
  }

  TEST_CASE("ball grids centred at the origin are mirror symmetric") {
    auto dom = GridDomain::ball(2, {33, 33}, {0.0, 0.0}, 0.5);
    const int N = 33;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Point a = dom->coord(dom->node_index(i, j));
        const Point b = dom->coord(dom->node_index(N - 1 - i, j));
        const Point c = dom->coord(dom->node_index(j, i));
        CHECK(a[0] == -b[0]);
        CHECK(a[1] == b[1]);
        CHECK(a[0] == c[1]);
        CHECK(dom->is_interior(dom->node_index(i, j)) == dom->is_interior(dom->node_index(N - 1 - i, j)));
      }
    CHECK(dom->spacing()[0] == doctest::Approx(1.0 / 32.0));
  }

  TEST_CASE("grid files round trip bitwise") {
    Draw u(23);
    for (const auto& dom : sample_domains()) {
      GraphFunction f(dom);
      for (auto& v : f.values()) v = u(-1.0, 1.0) * std::pow(10.0, u(-20.0, 5.0));
      for (auto& v : f.crossing_values()) v = u(-1.0, 1.0);
      auto chart = dom->n() == 2 ? ChartSpec::hyperbolic(2, 0.5) : ChartSpec::euclidean(1);
      const auto path = temp_path("roundtrip.grid");
      write_grid_file(path, f, chart);
      auto back = read_grid_file(path);
      CHECK(chart_id(back.chart) == chart_id(chart));
      CHECK(back.f.domain()->same_as(*dom));
      REQUIRE(back.f.values().size() == f.values().size());
      CHECK(std::memcmp(back.f.values().data(), f.values().data(), f.values().size() * sizeof(double)) == 0);
      CHECK(back.f.crossing_values() == f.crossing_values());
      std::filesystem::remove(path);
    }
  }

  TEST_CASE("malformed grid files report the offending field") {
    const auto path = temp_path("bad.grid");
    {
      std::ofstream out(path);
      out << "{\"shape\":[5,5],\"chart\":\"euclidean;n=2\",\"boundary\":\"25*1\"}\n";
    }
    try {
      read_grid_file(path);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find("spacing") != std::string::npos);
    }
    {
      std::ofstream out(path);
      out << "not json\n";
    }
    CHECK_THROWS_AS(read_grid_file(path), Error);
    std::filesystem::remove(path);
    try {
      read_grid_file(temp_path("does_not_exist.grid"));
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IOError);
    }
  }

  TEST_CASE("domains compare structurally") {
    auto a = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto b = GridDomain::ball(2, {17, 17}, {0.0, 0.0}, 0.5);
    auto c = GridDomain::ball(2, {19, 19}, {0.0, 0.0}, 0.5);
    CHECK_NOTHROW(require_same_domain(*a, *b));
    try {
      require_same_domain(*a, *c);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DomainMismatch);
    }
  }
}
