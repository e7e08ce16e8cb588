#pragma once

// Norm models: the exact euclidean norm, or a norm reconstructed from sampled
// boundary points of a symmetric convex unit ball (the shape in which stable
// norm estimates arrive). A sampled model stores support values over a fixed
// direction grid; the norm is the gauge of the polytope those support planes
// cut out, so symmetry and the triangle inequality hold by construction.

#include "lab/geometry.hpp"

#include <nlohmann/json_fwd.hpp>
#include <vector>

namespace lab {

class NormModel {
 public:
  enum class Kind { euclidean, sampled };

  static NormModel euclidean(int dim);
  static NormModel from_unit_ball_samples(int dim, const std::vector<Vec>& boundary_points,
                                          int directions = 0);

  double operator()(const Vec& v) const;
  // Dual norm, exact for euclidean; for sampled models the support function of
  // the inner hull of the stored boundary points (a lower bound).
  double dual(const Vec& u) const;

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  const std::vector<Vec>& unit_ball_samples() const { return ball_; }

  nlohmann::json to_json() const;
  static NormModel from_json(const nlohmann::json& j);

 private:
  NormModel(int dim, Kind kind) : dim_(dim), kind_(kind) {}

  int dim_;
  Kind kind_;
  std::vector<Vec> ball_;          // boundary samples of the unit ball
  std::vector<Vec> support_dirs_;  // unit directions u_j
  std::vector<double> support_;    // s_j = sup_ball <u_j, .>
};

}  // namespace lab
