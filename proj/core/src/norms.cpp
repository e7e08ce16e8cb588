#include "lab/norms.hpp"

#include "lab/json_io.hpp"

#include <cmath>

namespace lab {

std::vector<Vec> direction_grid(int dim, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * M_PI * k / count;
      dirs.push_back(vec2(std::cos(a), std::sin(a)));
    }
    return dirs;
  }
  // Fibonacci sphere
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = ga * k;
    dirs.push_back(vec3(r * std::cos(a), r * std::sin(a), z));
  }
  return dirs;
}

NormModel NormModel::euclidean(int dim) {
  if (dim < 1 || dim > 3) throw InvalidInput("NormModel: dim must be in {1,2,3}");
  return NormModel(dim, Kind::euclidean);
}

NormModel NormModel::from_unit_ball_samples(int dim, const std::vector<Vec>& boundary_points,
                                            int directions) {
  if (dim < 1 || dim > 3) throw InvalidInput("NormModel: dim must be in {1,2,3}");
  if (boundary_points.empty()) throw InvalidInput("NormModel: empty sample set");
  NormModel m(dim, Kind::sampled);
  m.ball_ = boundary_points;
  for (const auto& b : m.ball_) {
    if (b.size() != dim || !b.allFinite())
      throw InvalidInput("NormModel: sample with wrong dimension or non-finite entries");
  }
  m.support_dirs_ = direction_grid(dim, directions > 0 ? directions : default_direction_count(dim));
  m.support_.reserve(m.support_dirs_.size());
  for (const auto& u : m.support_dirs_) {
    double s = 0.0;
    for (const auto& b : m.ball_) s = std::max(s, std::abs(u.dot(b)));
    if (s < 1e-12)
      throw InvalidInput("NormModel: samples do not span the space (degenerate support)");
    m.support_.push_back(s);
  }
  return m;
}

double NormModel::operator()(const Vec& v) const {
  if (v.size() != dim_) throw InvalidInput("NormModel: dimension mismatch");
  if (kind_ == Kind::euclidean) return v.norm();
  double n = 0.0;
  for (std::size_t j = 0; j < support_dirs_.size(); ++j)
    n = std::max(n, std::abs(support_dirs_[j].dot(v)) / support_[j]);
  return n;
}

double NormModel::dual(const Vec& u) const {
  if (u.size() != dim_) throw InvalidInput("NormModel: dimension mismatch");
  if (kind_ == Kind::euclidean) return u.norm();
  double s = 0.0;
  for (const auto& b : ball_) s = std::max(s, std::abs(u.dot(b)));
  return s;
}

json NormModel::to_json() const {
  json j;
  j["dim"] = dim_;
  j["kind"] = kind_ == Kind::euclidean ? "euclidean" : "sampled";
  if (kind_ == Kind::sampled) j["unit_ball_samples"] = lab::to_json(ball_);
  return j;
}

NormModel NormModel::from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return euclidean(dim);
  if (kind != "sampled") throw InvalidInput("NormModel: unknown kind '" + kind + "'");
  std::vector<Vec> ball;
  for (const auto& b : j.at("unit_ball_samples")) ball.push_back(vec_from_json(b));
  return from_unit_ball_samples(dim, ball);
}

}  // namespace lab
