#pragma once

// Convex-cone toolkit in R^b. Cones are represented by sampled generating
// rays. In dimension 2 the hull is reduced to its extreme rays and all
// queries are exact; in dimension >= 3 the sampled hull is kept as-is and
// duals / boundary distances are computed against direction grids (a
// documented lower-accuracy path).

#include "lab/geometry.hpp"
#include "lab/norms.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <vector>

namespace lab {

class PolyCone {
 public:
  // Internal shape classification; `sampled` is the generic >= 3D case.
  enum class Shape { zero, pointed, halfplane, line, full, sampled };

  PolyCone() = default;

  int dim() const { return dim_; }
  const std::vector<Vec>& rays() const { return rays_; }
  bool contains_line() const { return contains_line_; }
  bool is_zero() const { return shape_ == Shape::zero; }
  bool is_full() const { return shape_ == Shape::full; }
  Shape shape() const { return shape_; }

  // Pointed 2D sectors keep their extreme rays first in rays().
  const Vec& axis() const { return axis_; }
  double half_span() const { return half_span_; }

  nlohmann::json to_json() const;
  nlohmann::json to_json(const NormModel& norm) const;
  static PolyCone from_json(const nlohmann::json& j);

 private:
  friend PolyCone conic_hull(const std::vector<Vec>&, const NormModel&);
  friend PolyCone make_full_cone(int dim);
  friend PolyCone make_zero_cone(int dim);

  int dim_ = 0;
  std::vector<Vec> rays_;
  bool contains_line_ = false;
  Shape shape_ = Shape::zero;
  Vec axis_;              // interior direction for pointed/sampled shapes
  double half_span_ = 0;  // pointed 2D half opening angle
};

PolyCone make_zero_cone(int dim);
PolyCone make_full_cone(int dim);

// Conic hull of the given rays, each normalized to unit length in `norm`.
// Empty input yields the zero cone; a zero vector among the rays is rejected.
PolyCone conic_hull(const std::vector<Vec>& rays, const NormModel& norm);
// Euclidean hull in the dimension of the rays.
PolyCone conic_hull(const std::vector<Vec>& rays);

// Distance from v to the cone (0 inside), measured in `norm`.
double exterior_distance(const PolyCone& cone, const Vec& v, const NormModel& norm);

// Membership within relative tolerance `tol` (euclidean ambient metric).
bool contains(const PolyCone& cone, const Vec& v, double tol);

PolyCone dual_cone(const PolyCone& cone);

// Distance from an in-cone v to the cone boundary, measured in `norm`.
// Points outside the cone return 0 and set *outside if provided.
double boundary_distance(const PolyCone& cone, const Vec& v, const NormModel& norm,
                         bool* outside = nullptr);

// The subcone {v : boundary_distance(v) >= eps * norm(v)}; equals the input
// for eps = 0 and degenerates to the zero cone when eps is too large.
PolyCone epsilon_subcone(const PolyCone& cone, double eps, const NormModel& norm);

struct CompactnessResult {
  bool compact = false;
  Vec witness;     // functional with <witness, r> >= margin on all rays
  double margin = 0.0;
};

// A cone is compact iff some linear functional is strictly positive on all
// generating rays; the witness is found by maximizing the minimum ray pairing
// over sampled unit covectors (exact bisector in pointed 2D).
CompactnessResult is_compact_cone(const PolyCone& cone);

}  // namespace lab
