#include "lab/cones.hpp"

#include "lab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lab {

namespace {

constexpr double kAngleTol = 1e-10;
constexpr double kRayDedupTol = 1e-10;

Vec rot90(const Vec& v) { return vec2(-v[1], v[0]); }

double angle_of(const Vec& v) { return std::atan2(v[1], v[0]); }

// Angular distance in [0, pi].
double ang_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * M_PI);
  return d > M_PI ? 2.0 * M_PI - d : d;
}

Vec unit_at(double angle) { return vec2(std::cos(angle), std::sin(angle)); }

// Distance from v to the ray {t*e : t >= 0}, e unit in the given norm.
double ray_distance(const Vec& v, const Vec& e, const NormModel& norm) {
  if (norm.kind() == NormModel::Kind::euclidean) {
    const double t = std::max(0.0, v.dot(e) / e.squaredNorm());
    return (v - t * e).norm();
  }
  const double tmax = 4.0 * norm(v) / std::max(norm(e), 1e-300) + 1.0;
  return golden_minimize([&](double t) { return norm(v - t * e); }, 0.0, tmax);
}

// Distance from v to the full line spanned by d.
double line_distance(const Vec& v, const Vec& d, const NormModel& norm) {
  if (norm.kind() == NormModel::Kind::euclidean) {
    const double t = v.dot(d) / d.squaredNorm();
    return (v - t * d).norm();
  }
  const double tmax = 4.0 * norm(v) / std::max(norm(d), 1e-300) + 1.0;
  return golden_minimize([&](double t) { return norm(v - t * d); }, -tmax, tmax);
}

// Euclidean distance from v to cone{rays} by greedy conic projection:
// alternate an exact line-minimization step along the best ray with an
// optimal rescaling of the current iterate.
double conic_project_distance(const std::vector<Vec>& rays, const Vec& v) {
  Vec x = Vec::Zero(v.size());
  const double vn = v.norm();
  if (vn < 1e-300) return 0.0;
  for (int iter = 0; iter < 256; ++iter) {
    const Vec r = v - x;
    const double rn = r.norm();
    if (rn < 1e-14 * vn) break;
    double best = 0.0;
    const Vec* best_ray = nullptr;
    for (const auto& g : rays) {
      const double s = r.dot(g);
      if (s > best) {
        best = s;
        best_ray = &g;
      }
    }
    if (!best_ray || best <= 1e-13 * rn) break;
    x += best * (*best_ray);
    const double xx = x.squaredNorm();
    if (xx > 0) {
      const double c = std::max(0.0, v.dot(x) / xx);
      x *= c;
    }
  }
  return (v - x).norm();
}

}  // namespace

PolyCone make_zero_cone(int dim) {
  PolyCone c;
  c.dim_ = dim;
  c.shape_ = PolyCone::Shape::zero;
  c.axis_ = Vec::Zero(dim);
  return c;
}

PolyCone make_full_cone(int dim) {
  PolyCone c;
  c.dim_ = dim;
  c.shape_ = PolyCone::Shape::full;
  c.contains_line_ = true;
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    c.rays_.push_back(e);
    c.rays_.push_back(-e);
  }
  c.axis_ = Vec::Zero(dim);
  return c;
}

PolyCone conic_hull(const std::vector<Vec>& rays) {
  const int dim = rays.empty() ? 2 : static_cast<int>(rays.front().size());
  return conic_hull(rays, NormModel::euclidean(dim));
}

PolyCone conic_hull(const std::vector<Vec>& rays, const NormModel& norm) {
  if (rays.empty()) return make_zero_cone(norm.dim());
  const int dim = static_cast<int>(rays.front().size());
  if (dim < 1 || dim > 3) throw InvalidInput("conic_hull: dim must be in {1,2,3}");

  std::vector<Vec> unit;
  unit.reserve(rays.size());
  for (const auto& r : rays) {
    if (static_cast<int>(r.size()) != dim) throw InvalidInput("conic_hull: mixed dimensions");
    if (!r.allFinite()) throw InvalidInput("conic_hull: non-finite ray");
    const double n = norm(r);
    if (n < 1e-12) throw InvalidInput("conic_hull: zero vector among rays");
    Vec u = r / n;
    bool dup = false;
    for (const auto& w : unit) {
      if ((u - w).norm() < kRayDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) unit.push_back(std::move(u));
  }

  PolyCone c;
  c.dim_ = dim;
  c.rays_ = std::move(unit);

  if (dim == 1) {
    bool pos = false, neg = false;
    for (const auto& r : c.rays_) (r[0] > 0 ? pos : neg) = true;
    if (pos && neg) return make_full_cone(1);
    c.shape_ = PolyCone::Shape::pointed;
    c.axis_ = c.rays_.front();
    c.half_span_ = 0.0;
    return c;
  }

  if (dim == 2) {
    if (c.rays_.size() == 1) {
      c.shape_ = PolyCone::Shape::pointed;
      c.axis_ = c.rays_.front();
      c.half_span_ = 0.0;
      return c;
    }
    std::vector<double> ang;
    ang.reserve(c.rays_.size());
    for (const auto& r : c.rays_) ang.push_back(angle_of(r));
    std::sort(ang.begin(), ang.end());
    // largest cyclic gap
    double max_gap = 2.0 * M_PI + ang.front() - ang.back();
    std::size_t gap_at = ang.size() - 1;  // gap between ang[gap_at] and next
    for (std::size_t i = 0; i + 1 < ang.size(); ++i) {
      const double g = ang[i + 1] - ang[i];
      if (g > max_gap) {
        max_gap = g;
        gap_at = i;
      }
    }
    const double lo = ang[(gap_at + 1) % ang.size()];  // first ray after the gap
    const double hi = ang[gap_at];                      // last ray before the gap
    if (max_gap > M_PI + kAngleTol) {
      const double span = 2.0 * M_PI - max_gap;
      double mid = lo + span / 2.0;
      c.shape_ = PolyCone::Shape::pointed;
      c.axis_ = unit_at(mid);
      c.half_span_ = span / 2.0;
      std::vector<Vec> extremes = {unit_at(lo), unit_at(hi)};
      if (span < kAngleTol) extremes.resize(1);
      c.rays_ = std::move(extremes);
      return c;
    }
    if (max_gap > M_PI - kAngleTol) {
      // Exactly half the circle is free: either a line or a half-plane.
      bool all_on_line = true;
      for (double a : ang) {
        if (ang_dist(a, lo) > kAngleTol && ang_dist(a, lo + M_PI) > kAngleTol) {
          all_on_line = false;
          break;
        }
      }
      c.contains_line_ = true;
      if (all_on_line) {
        c.shape_ = PolyCone::Shape::line;
        c.axis_ = unit_at(lo);
        c.rays_ = {unit_at(lo), -unit_at(lo)};
        return c;
      }
      c.shape_ = PolyCone::Shape::halfplane;
      const Vec d = unit_at(lo);
      Vec n = rot90(d);
      // orient the normal toward the filled side
      double side = 0.0;
      for (double a : ang) side += n.dot(unit_at(a));
      if (side < 0) n = -n;
      c.axis_ = n;
      c.rays_ = {d, -d, n};
      return c;
    }
    return make_full_cone(2);
  }

  // dim == 3: keep the sampled hull.
  c.shape_ = PolyCone::Shape::sampled;
  Vec mean = Vec::Zero(dim);
  for (const auto& r : c.rays_) mean += r;
  c.axis_ = mean.norm() > 1e-12 ? Vec(mean.normalized()) : c.rays_.front();
  // line containment via antipodal membership of generators (cheap positive
  // test first: a strictly positive functional rules lines out)
  double margin = -1.0;
  for (const auto& u : direction_grid(dim, kDefaultDirectionsSphere)) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : c.rays_) m = std::min(m, u.dot(r));
    margin = std::max(margin, m);
  }
  if (margin <= 1e-6) {
    const std::size_t stride = std::max<std::size_t>(1, c.rays_.size() / 64);
    for (std::size_t i = 0; i < c.rays_.size() && !c.contains_line_; i += stride) {
      if (conic_project_distance(c.rays_, -c.rays_[i]) <= 1e-6) c.contains_line_ = true;
    }
  }
  return c;
}

double exterior_distance(const PolyCone& cone, const Vec& v, const NormModel& norm) {
  if (static_cast<int>(v.size()) != cone.dim()) throw InvalidInput("exterior_distance: dim mismatch");
  const double nv = norm(v);
  if (nv < 1e-300) return 0.0;
  switch (cone.shape()) {
    case PolyCone::Shape::zero:
      return nv;
    case PolyCone::Shape::full:
      return 0.0;
    case PolyCone::Shape::line:
      return line_distance(v, cone.axis(), norm);
    case PolyCone::Shape::halfplane: {
      if (cone.axis().dot(v) >= 0.0) return 0.0;
      const Vec d = rot90(cone.axis());
      return line_distance(v, d, norm);
    }
    case PolyCone::Shape::pointed: {
      if (cone.dim() == 1) return v[0] * cone.axis()[0] >= 0.0 ? 0.0 : nv;
      const double off = ang_dist(angle_of(v), angle_of(cone.axis()));
      if (off <= cone.half_span() + 1e-15) return 0.0;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& e : cone.rays()) d = std::min(d, ray_distance(v, e, norm));
      return d;
    }
    case PolyCone::Shape::sampled: {
      if (norm.kind() == NormModel::Kind::euclidean) return conic_project_distance(cone.rays(), v);
      // lower-accuracy path: distance to the ray skeleton (an overestimate),
      // cross-checked against the euclidean projection scaled by norm bounds
      double d = std::numeric_limits<double>::infinity();
      for (const auto& e : cone.rays()) d = std::min(d, ray_distance(v, e, norm));
      return d;
    }
  }
  return 0.0;
}

bool contains(const PolyCone& cone, const Vec& v, double tol) {
  if (static_cast<int>(v.size()) != cone.dim()) throw InvalidInput("contains: dim mismatch");
  const double nv = v.norm();
  if (nv < 1e-300) return true;
  const NormModel eu = NormModel::euclidean(cone.dim());
  return exterior_distance(cone, v, eu) <= tol * nv + 1e-14;
}

PolyCone dual_cone(const PolyCone& cone) {
  const int dim = cone.dim();
  switch (cone.shape()) {
    case PolyCone::Shape::zero:
      return make_full_cone(dim);
    case PolyCone::Shape::full:
      return make_zero_cone(dim);
    case PolyCone::Shape::line: {
      if (dim == 2) {
        const Vec w = rot90(cone.axis());
        return conic_hull({w, -w});
      }
      break;  // fall through to the sampled path
    }
    case PolyCone::Shape::halfplane:
      return conic_hull({cone.axis()});
    case PolyCone::Shape::pointed: {
      if (dim == 1) {
        return conic_hull({cone.axis()});
      }
      if (dim == 2) {
        if (cone.rays().size() == 1) {
          const Vec r = cone.rays().front();
          const Vec d = rot90(r);
          return conic_hull({d, -d, r});
        }
        const Vec& e1 = cone.rays()[0];
        const Vec& e2 = cone.rays()[1];
        Vec a = rot90(e1);
        if (a.dot(e2) < 0) a = -a;
        Vec b = rot90(e2);
        if (b.dot(e1) < 0) b = -b;
        return conic_hull({a, b});
      }
      break;
    }
    case PolyCone::Shape::sampled:
      break;
  }
  // sampled dual: directions nonnegative on all generating rays
  std::vector<Vec> duals;
  for (const auto& u : direction_grid(dim, default_direction_count(dim))) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : cone.rays()) m = std::min(m, u.dot(r));
    if (m >= -1e-9) duals.push_back(u);
  }
  if (duals.empty()) return make_zero_cone(dim);
  return conic_hull(duals);
}

double boundary_distance(const PolyCone& cone, const Vec& v, const NormModel& norm,
                         bool* outside) {
  if (outside) *outside = false;
  const double nv = norm(v);
  const double ext = exterior_distance(cone, v, norm);
  if (ext > 1e-12 * (1.0 + nv)) {
    if (outside) *outside = true;
    return 0.0;
  }
  switch (cone.shape()) {
    case PolyCone::Shape::zero:
    case PolyCone::Shape::line:
      return 0.0;
    case PolyCone::Shape::full:
      return std::numeric_limits<double>::infinity();
    case PolyCone::Shape::halfplane: {
      const Vec d = rot90(cone.axis());
      return line_distance(v, d, norm);
    }
    case PolyCone::Shape::pointed: {
      if (cone.dim() == 1) return nv;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& e : cone.rays()) d = std::min(d, ray_distance(v, e, norm));
      return d;
    }
    case PolyCone::Shape::sampled: {
      // min over dual-feasible sampled functionals u of <u,v>/||u||*;
      // each term bounds dist(v, ker u) from the inside, and the minimum over
      // a dense dual sampling converges to dist(v, boundary).
      double d = std::numeric_limits<double>::infinity();
      bool any = false;
      for (const auto& u : direction_grid(cone.dim(), default_direction_count(cone.dim()))) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& r : cone.rays()) m = std::min(m, u.dot(r));
        if (m >= -1e-9) {
          any = true;
          const double du = norm.kind() == NormModel::Kind::euclidean ? 1.0 : norm.dual(u);
          d = std::min(d, std::max(0.0, u.dot(v)) / std::max(du, 1e-300));
        }
      }
      return any ? d : std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

PolyCone epsilon_subcone(const PolyCone& cone, double eps, const NormModel& norm) {
  if (eps < 0.0) throw InvalidInput("epsilon_subcone: eps must be nonnegative");
  if (eps == 0.0) return cone;
  const int dim = cone.dim();
  switch (cone.shape()) {
    case PolyCone::Shape::zero:
      return make_zero_cone(dim);
    case PolyCone::Shape::full:
      return cone;
    case PolyCone::Shape::line:
      return make_zero_cone(dim);
    case PolyCone::Shape::halfplane:
    case PolyCone::Shape::pointed: {
      if (dim == 1) return cone;
      // depth ratio along the unit arc of the sector
      const double axis_angle = angle_of(cone.axis());
      const double span = cone.shape() == PolyCone::Shape::halfplane ? M_PI / 2.0
                                                                     : cone.half_span();
      auto ratio = [&](double off) {
        const Vec v = unit_at(axis_angle + off);
        return boundary_distance(cone, v, norm) - eps * norm(v);
      };
      // locate the deepest direction (exact center for euclidean norms)
      double best_off = 0.0;
      if (norm.kind() == NormModel::Kind::sampled) {
        double best = ratio(0.0);
        const int k = 65;
        for (int i = -k; i <= k; ++i) {
          const double off = span * i / (k + 1.0);
          const double g = ratio(off);
          if (g > best) {
            best = g;
            best_off = off;
          }
        }
      }
      if (ratio(best_off) < -1e-12) return make_zero_cone(dim);
      auto bisect = [&](double good, double bad) {
        for (int i = 0; i < 80; ++i) {
          const double mid = 0.5 * (good + bad);
          (ratio(mid) >= -1e-12 ? good : bad) = mid;
        }
        return good;
      };
      const double lo = bisect(best_off, -span);
      const double hi = bisect(best_off, span);
      return conic_hull({unit_at(axis_angle + lo), unit_at(axis_angle + hi)});
    }
    case PolyCone::Shape::sampled: {
      std::vector<Vec> kept;
      for (const auto& r : cone.rays()) {
        if (boundary_distance(cone, r, norm) >= eps * norm(r) - 1e-12) kept.push_back(r);
      }
      if (kept.empty()) return make_zero_cone(dim);
      return conic_hull(kept, norm);
    }
  }
  return make_zero_cone(dim);
}

CompactnessResult is_compact_cone(const PolyCone& cone) {
  CompactnessResult res;
  res.witness = Vec::Zero(cone.dim());
  if (cone.is_zero()) {
    res.compact = true;
    res.margin = std::numeric_limits<double>::infinity();
    if (cone.dim() > 0) res.witness[0] = 1.0;
    return res;
  }
  switch (cone.shape()) {
    case PolyCone::Shape::full:
    case PolyCone::Shape::line:
    case PolyCone::Shape::halfplane:
      res.compact = false;
      res.margin = 0.0;
      return res;
    case PolyCone::Shape::pointed: {
      res.compact = true;
      res.witness = cone.axis();
      res.margin = cone.dim() == 1 ? 1.0 : std::cos(cone.half_span());
      return res;
    }
    default:
      break;
  }
  auto min_pairing = [&](const Vec& u) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : cone.rays()) m = std::min(m, u.dot(r));
    return m;
  };
  double best = min_pairing(cone.axis());
  res.witness = cone.axis();
  for (const auto& u : direction_grid(cone.dim(), default_direction_count(cone.dim()))) {
    const double m = min_pairing(u);
    if (m > best) {
      best = m;
      res.witness = u;
    }
  }
  res.margin = best;
  res.compact = best > 1e-6;
  return res;
}

json PolyCone::to_json() const {
  json j;
  j["dim"] = dim_;
  j["rays"] = lab::to_json(rays_);
  j["contains_line"] = contains_line_;
  j["is_zero"] = is_zero();
  return j;
}

json PolyCone::to_json(const NormModel& norm) const {
  json j = to_json();
  j["norm"] = norm.to_json();
  return j;
}

PolyCone PolyCone::from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  if (j.value("is_zero", false)) return make_zero_cone(dim);
  std::vector<Vec> rays;
  for (const auto& r : j.at("rays")) rays.push_back(vec_from_json(r));
  NormModel norm = j.contains("norm") ? NormModel::from_json(j["norm"]) : NormModel::euclidean(dim);
  return conic_hull(rays, norm);
}

}  // namespace lab
