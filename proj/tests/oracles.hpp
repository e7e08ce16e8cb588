#pragma once

// Test-only oracles, independent of the library's computation paths:
// analytic Minkowski quantities and a high-order ODE integration of null
// boundary characteristics for product metrics -dt^2 + rho(x)^2 dx^2.

#include "lab/geometry.hpp"

#include <cmath>
#include <functional>

namespace oracles {

// Exact Minkowski time separation for the flat preset.
inline double minkowski_d(const lab::Vec& p, const lab::Vec& q) {
  const lab::Vec d = q - p;
  if (d[0] <= 0.0) return 0.0;
  double space2 = 0.0;
  for (int i = 1; i < d.size(); ++i) space2 += d[i] * d[i];
  const double m2 = d[0] * d[0] - space2;
  return m2 > 0.0 ? std::sqrt(m2) : 0.0;
}

// Euclidean distance from a point to the cone {a >= |b|} in 2D.
inline double flat_cone_distance(const lab::Vec& v) {
  if (v[0] >= std::abs(v[1])) return 0.0;
  if (v[0] + std::abs(v[1]) <= 0.0) return v.norm();  // beyond both rays
  return (std::abs(v[1]) - v[0]) / std::sqrt(2.0);
}

// Integrates dt/dx = sgn * rho(x) from x = 0 with RK4; returns t at x.
inline double null_boundary_time(const std::function<double(double)>& rho, double x,
                                 double step = 1e-4) {
  const double sgn = x >= 0 ? 1.0 : -1.0;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(x) / step)));
  const double h = std::abs(x) / n;
  double t = 0.0, s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k1 = rho(sgn * s);
    const double k2 = rho(sgn * (s + 0.5 * h));
    const double k3 = k2;
    const double k4 = rho(sgn * (s + h));
    t += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += h;
  }
  return t;
}

}  // namespace oracles
