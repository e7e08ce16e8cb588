#pragma once

// Polygonal worldlines in the cover: Lorentzian/Riemannian lengths by
// midpoint quadrature, causality of segments, rotation vectors, geodesic
// shooting and seeded random causal walks.

#include "lab/geometry.hpp"
#include "lab/spacetime.hpp"

#include <iosfwd>
#include <vector>

namespace lab {

struct PolygonalWorldline {
  std::vector<Vec> vertices;

  int dim() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().size()); }
  int segments() const { return static_cast<int>(vertices.size()) - 1; }
  // consecutive vertices distinct, finite coordinates
  void validate() const;
};

struct CurveLengths {
  double lorentzian = 0.0;
  double riemannian = 0.0;
  int spacelike_pieces = 0;  // subsegments contributing 0 to the Lorentzian sum
};

CurveLengths curve_lengths(const MetricField& m, const PolygonalWorldline& c, int subdiv = 8);

struct FutureCheck {
  bool ok = true;
  int offending_segment = -1;
};

FutureCheck is_future_pointing(const MetricField& m, const PolygonalWorldline& c, int subdiv = 8);

// Displacement divided by g_R arclength; throws on zero-length curves.
Vec rotation_vector(const MetricField& m, const PolygonalWorldline& c, int subdiv = 8);

struct GeodesicTrace {
  PolygonalWorldline path;
  std::vector<double> energy;  // g(gamma', gamma') at each step
  bool truncated = false;      // a step produced a non-finite state
};

// Classical RK4 on the geodesic equation, Christoffel symbols from central
// finite differences of the metric.
GeodesicTrace geodesic_shoot(const MetricField& m, const Vec& p, const Vec& v, double T,
                             double dt, double fd_step = 1e-4);

// Random future causal polygonal walk: ~70% interior timelike steps, ~30%
// near-null steps so the cone boundary stays populated. Deterministic for a
// fixed seed; the result always passes is_future_pointing.
PolygonalWorldline random_causal_walk(const MetricField& m, const Vec& p, int steps,
                                      double step_len, std::uint64_t seed);

// CSV export, one vertex per row.
void write_csv(const PolygonalWorldline& c, std::ostream& os);

}  // namespace lab
