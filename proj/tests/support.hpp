#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic uniform draws for property tests.
struct Draw {
  std::mt19937_64 eng;
  explicit Draw(std::uint64_t seed) : eng(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
};

inline bool ratio_ok(double coarse, double fine, double lo = 3.4, double hi = 4.6) {
  const double r = coarse / fine;
  return r >= lo && r <= hi;
}

#include "gaussgraph/grid.hpp"

// Random smooth field: a few low Fourier modes, optionally damped to vanish on
// the boundary of a ball of radius rho centred at the origin.
struct SmoothField {
  double a[4][3];
  double rho = 0.0;
  SmoothField(Draw& u, double rho_ = 0.0) : rho(rho_) {
    for (auto& m : a)
      for (double& v : m) v = u(-1.0, 1.0);
  }
  double operator()(const gaussgraph::Point& x) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += a[k][0] * std::sin((k + 1) * (a[k][1] * x[0] + a[k][2] * x[1]) + k);
    if (rho > 0.0) s *= (rho * rho - x[0] * x[0] - x[1] * x[1]) / (rho * rho);
    return s;
  }
};
