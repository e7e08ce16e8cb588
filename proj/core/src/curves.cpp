#include "lab/curves.hpp"

#include <cmath>
#include <ostream>

namespace lab {

void PolygonalWorldline::validate() const {
  if (vertices.size() < 2) throw InvalidInput("worldline: needs at least two vertices");
  for (const auto& v : vertices)
    if (!v.allFinite()) throw InvalidInput("worldline: non-finite vertex");
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
    if ((vertices[i + 1] - vertices[i]).norm() < 1e-300)
      throw InvalidInput("worldline: consecutive vertices coincide");
}

CurveLengths curve_lengths(const MetricField& m, const PolygonalWorldline& c, int subdiv) {
  c.validate();
  if (subdiv < 1) throw InvalidInput("curve_lengths: subdiv must be >= 1");
  CurveLengths out;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
    const Vec a = c.vertices[i];
    const Vec d = (c.vertices[i + 1] - a) / subdiv;
    for (int s = 0; s < subdiv; ++s) {
      const Vec mid = a + (s + 0.5) * d;
      const double q = m.q(mid, d);
      const double qr = m.qr(mid, d);
      out.riemannian += std::sqrt(std::max(0.0, qr));
      if (q < 0.0)
        out.lorentzian += std::sqrt(-q);
      else
        ++out.spacelike_pieces;
    }
  }
  return out;
}

FutureCheck is_future_pointing(const MetricField& m, const PolygonalWorldline& c, int subdiv) {
  c.validate();
  FutureCheck out;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
    const Vec a = c.vertices[i];
    const Vec d = c.vertices[i + 1] - a;
    for (int s = 0; s <= subdiv; ++s) {
      const Vec at = a + (static_cast<double>(s) / subdiv) * d;
      if (!is_future_causal(causal_character(m, at, d))) {
        out.ok = false;
        out.offending_segment = static_cast<int>(i);
        return out;
      }
    }
  }
  return out;
}

Vec rotation_vector(const MetricField& m, const PolygonalWorldline& c, int subdiv) {
  const double len = curve_lengths(m, c, subdiv).riemannian;
  if (len <= 0.0) throw InvalidInput("rotation_vector: zero g_R length");
  return (c.vertices.back() - c.vertices.front()) / len;
}

namespace {

// acceleration a^i = -Gamma^i_jk v^j v^k with finite-difference Christoffels
Vec geodesic_accel(const MetricField& m, const Vec& x, const Vec& v, double h) {
  const int n = m.dim();
  Mat M = Mat::Zero(n, n);  // sum_j v_j d_j g
  Vec w(n);
  std::array<Mat, 3> dg;
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = h;
    dg[k] = (m.metric(x + e) - m.metric(x - e)) / (2.0 * h);
    M += v[k] * dg[k];
  }
  for (int l = 0; l < n; ++l) w[l] = 2.0 * (M * v)[l] - v.dot(dg[l] * v);
  const Mat ginv = m.metric(x).inverse();
  return Vec(-0.5 * (ginv * w));
}

}  // namespace

GeodesicTrace geodesic_shoot(const MetricField& m, const Vec& p, const Vec& v, double T,
                             double dt, double fd_step) {
  if (dt <= 0.0) throw InvalidInput("geodesic_shoot: dt must be positive");
  if (v.norm() < 1e-300) throw InvalidInput("geodesic_shoot: zero initial velocity");
  GeodesicTrace out;
  Vec x = p, u = v;
  out.path.vertices.push_back(x);
  out.energy.push_back(m.q(x, u));
  const int steps = static_cast<int>(std::ceil(T / dt));
  for (int s = 0; s < steps; ++s) {
    const double step = std::min(dt, T - s * dt);
    const Vec k1x = u, k1v = geodesic_accel(m, x, u, fd_step);
    const Vec k2x = u + 0.5 * step * k1v,
              k2v = geodesic_accel(m, x + 0.5 * step * k1x, Vec(u + 0.5 * step * k1v), fd_step);
    const Vec k3x = u + 0.5 * step * k2v,
              k3v = geodesic_accel(m, x + 0.5 * step * k2x, Vec(u + 0.5 * step * k2v), fd_step);
    const Vec k4x = u + step * k3v,
              k4v = geodesic_accel(m, x + step * k3x, Vec(u + step * k3v), fd_step);
    const Vec nx = x + (step / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    const Vec nu = u + (step / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!nx.allFinite() || !nu.allFinite()) {
      out.truncated = true;
      break;
    }
    x = nx;
    u = nu;
    out.path.vertices.push_back(x);
    out.energy.push_back(m.q(x, u));
  }
  return out;
}

PolygonalWorldline random_causal_walk(const MetricField& m, const Vec& p, int steps,
                                      double step_len, std::uint64_t seed) {
  if (steps < 1) throw InvalidInput("random_causal_walk: steps must be >= 1");
  std::mt19937_64 rng(seed);
  PolygonalWorldline walk;
  walk.vertices.reserve(steps + 1);
  walk.vertices.push_back(p);
  Vec x = p;
  const int n = m.dim();

  auto segment_ok = [&](const Vec& from, const Vec& d) {
    for (int s = 0; s <= 2; ++s) {
      const Vec at = from + (s / 2.0) * d;
      if (!is_future_causal(causal_character(m, at, d))) return false;
    }
    return true;
  };

  for (int s = 0; s < steps; ++s) {
    const Vec X = m.orientation(x);
    const Vec T = X / std::sqrt(m.qr(x, X));
    Vec dir = T;
    const bool near_null = u01(rng) < 0.3;
    bool ok = false;
    for (int attempt = 0; attempt < 24 && !ok; ++attempt) {
      const Vec U = random_unit_vector(rng, n);
      double lam = uniform(rng, 0.0, 1.0);
      Vec cand = T + lam * U;
      // pull back until strictly timelike future
      int halvings = 0;
      while (halvings < 12 &&
             causal_character(m, x, cand).kind != CausalKind::timelike) {
        lam *= 0.5;
        cand = T + lam * U;
        ++halvings;
      }
      if (causal_character(m, x, cand).kind != CausalKind::timelike) continue;
      if (near_null) {
        // march toward the cone boundary, then keep a small interior margin
        double lo = lam, hi = lam;
        for (int k = 0; k < 12; ++k) {
          hi = hi * 2.0 + 0.05;
          if (causal_character(m, x, Vec(T + hi * U)).kind != CausalKind::timelike) break;
          lo = hi;
        }
        for (int k = 0; k < 16; ++k) {
          const double mid = 0.5 * (lo + hi);
          (causal_character(m, x, Vec(T + mid * U)).kind == CausalKind::timelike ? lo : hi) = mid;
        }
        const double inward = uniform(rng, 0.03, 0.15);
        cand = T + lo * (1.0 - inward) * U;
      }
      const Vec unit = cand / std::sqrt(m.qr(x, cand));
      const Vec d = step_len * unit;
      if (segment_ok(x, d)) {
        dir = unit;
        ok = true;
      }
    }
    if (!ok) dir = T;  // the orientation direction is always admissible
    x = x + step_len * dir;
    walk.vertices.push_back(x);
  }
  return walk;
}

void write_csv(const PolygonalWorldline& c, std::ostream& os) {
  const int n = c.dim();
  for (int i = 0; i < n; ++i) os << (i ? ",x" : "x") << i;
  os << "\n";
  for (const auto& v : c.vertices) {
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << v[i];
    os << "\n";
  }
}

}  // namespace lab
