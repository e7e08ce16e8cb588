#include "lab/stable.hpp"

#include "lab/curves.hpp"
#include "lab/json_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <numeric>

namespace lab {

namespace {

// distance from a point to the segment [0, b]
double point_segment_distance(const Vec& p, const Vec& b) {
  const double bb = b.squaredNorm();
  const double t = bb > 0 ? std::clamp(p.dot(b) / bb, 0.0, 1.0) : 0.0;
  return (p - t * b).norm();
}

}  // namespace

double stencil_calibration(int dim, int stencil_radius) {
  // worst stencil-graph-vs-euclidean overshoot, measured once on a flat grid
  // (scale invariance makes a small window exact up to direction granularity)
  static std::map<std::pair<int, int>, double> cache;
  const auto key = std::make_pair(dim, stencil_radius);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const MetricField flat = make_preset(
      PresetSpec::make("flat", nlohmann::json{{"dim", dim}}));
  const int res = 24;
  const GridGeom geom = GridGeom::over_window(flat, res, VecI::Constant(dim, -1),
                                              VecI::Constant(dim, 1));
  const std::int64_t src = geom.index(geom.snap(Vec::Zero(dim)));
  const auto dist = graph_distance_from_node(flat, geom, src, {}, stencil_radius);
  double worst = 0.0;
  for (std::int64_t i = 0; i < geom.total; ++i) {
    const Vec p = geom.point(geom.unindex(i));
    const double e = p.norm();
    if (e < 0.5) continue;  // far nodes sample directions finely
    worst = std::max(worst, dist[i] / e - 1.0);
  }
  cache[key] = worst;
  return worst;
}

StableNormResult stable_norm(const MetricField& m, const VecI& h, int n_max,
                             const StableNormOptions& opt) {
  if (n_max < 8) throw InvalidInput("stable_norm: n_max must be >= 8");
  if (h.cwiseAbs().maxCoeff() == 0) throw InvalidInput("stable_norm: zero class");
  const int dim = m.dim();
  const Vec& L = m.lattice();
  Vec target(dim);
  for (int i = 0; i < dim; ++i) target[i] = n_max * h[i] * L[i];

  // corridor window around the segment 0 -> n_max*h
  VecI wlo(dim), whi(dim);
  const double margin = opt.corridor_margin;
  for (int i = 0; i < dim; ++i) {
    wlo[i] = static_cast<int>(std::floor(std::min(0.0, target[i]) / L[i] - margin));
    whi[i] = static_cast<int>(std::ceil(std::max(0.0, target[i]) / L[i] + margin));
  }
  const GridGeom geom = GridGeom::over_window(m, opt.resolution, wlo, whi);
  std::vector<std::uint8_t> corridor(static_cast<std::size_t>(geom.total), 0);
  const double tube = margin * L.maxCoeff();
  for (std::int64_t i = 0; i < geom.total; ++i) {
    const Vec p = geom.point(geom.unindex(i));
    if (point_segment_distance(p, target) <= tube) corridor[i] = 1;
  }
  const std::int64_t source = geom.index(geom.snap(Vec::Zero(dim)));
  const auto dist = graph_distance_from_node(m, geom, source, corridor, opt.stencil_radius);

  StableNormResult out;
  for (int n = 1; n <= n_max; ++n) {
    Vec pn(dim);
    for (int i = 0; i < dim; ++i) pn[i] = n * h[i] * L[i];
    const VecI idx = geom.snap(pn);
    if (!geom.inside(idx) || !std::isfinite(dist[geom.index(idx)]))
      throw WindowOverflow("stable_norm: corridor too narrow for the requested class");
    out.dists.push_back(dist[geom.index(idx)]);
    out.trace.push_back(out.dists.back() / n);
  }
  out.norm = out.dists.back() / n_max;
  double dev = 0.0;
  for (int n = 1; n <= n_max; ++n)
    dev = std::max(dev, std::abs(out.dists[n - 1] - n * out.norm));
  const double calib = m.riemannian_is_identity() ? stencil_calibration(dim, opt.stencil_radius)
                                                  : 2.0 * stencil_calibration(dim, opt.stencil_radius);
  out.std_est = dev + calib * out.dists.back();
  return out;
}

StableNormEstimate estimate_stable_norm(const MetricField& m, int dir_radius, int n_max,
                                        const StableNormOptions& opt) {
  StableNormEstimate est;
  est.dim = m.dim();
  // half-space representatives of the gcd-reduced directions
  for (const auto& o : reduced_offsets(m.dim(), dir_radius)) {
    bool positive = false;
    for (int i = 0; i < m.dim(); ++i) {
      if (o[i] > 0) {
        positive = true;
        break;
      }
      if (o[i] < 0) break;
    }
    if (!positive) continue;
    const auto r = stable_norm(m, o, n_max, opt);
    est.directions.push_back(o);
    est.values.push_back(r.norm);
    est.plateau_traces.push_back(r.trace);
    est.std_est = std::max(est.std_est, r.std_est);
  }
  return est;
}

NormModel StableNormEstimate::to_norm_model(int support_directions) const {
  std::vector<Vec> ball;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    Vec v(dim);
    for (int c = 0; c < dim; ++c) v[c] = directions[i][c];
    ball.push_back(v / values[i]);
    ball.push_back(-v / values[i]);
  }
  return NormModel::from_unit_ball_samples(dim, ball, support_directions);
}

nlohmann::json StableNormEstimate::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["std_est"] = std_est;
  nlohmann::json dirs = nlohmann::json::array(), vals = nlohmann::json::array(),
                 traces = nlohmann::json::array();
  for (std::size_t i = 0; i < directions.size(); ++i) {
    dirs.push_back(lab::to_json(directions[i]));
    vals.push_back(values[i]);
    traces.push_back(plateau_traces[i]);
  }
  j["directions"] = dirs;
  j["values"] = vals;
  j["plateau_traces"] = traces;
  return j;
}

namespace {

// scale the displacement class of a lattice vector into cover coordinates
Vec class_vector(const MetricField& m, const VecI& h) {
  Vec v(m.dim());
  for (int i = 0; i < m.dim(); ++i) v[i] = h[i] * m.lattice()[i];
  return v;
}

// Unit-speed pregeodesic shooting for the cone sampler: the tangent is
// renormalized to unit g_R length after every step (an affine
// reparameterization of the same geodesic), which keeps null shots stable
// over long arcs where the affine velocity would otherwise run away.
struct UnitShot {
  Vec displacement;
  double length = 0.0;
};

UnitShot shoot_unit_speed(const MetricField& m, const Vec& x0, const Vec& v0, double length,
                          double dt) {
  const int n = m.dim();
  Vec x = x0;
  Vec v = v0 / std::sqrt(m.qr(x0, v0));
  const double fd = 1e-4;
  auto accel = [&](const Vec& xx, const Vec& vv) -> Vec {
    Mat M = Mat::Zero(n, n);
    std::array<Mat, 3> dg;
    for (int k = 0; k < n; ++k) {
      Vec e = Vec::Zero(n);
      e[k] = fd;
      dg[k] = (m.metric(xx + e) - m.metric(xx - e)) / (2.0 * fd);
      M += vv[k] * dg[k];
    }
    Vec w(n);
    for (int l = 0; l < n; ++l) w[l] = 2.0 * (M * vv)[l] - vv.dot(dg[l] * vv);
    return Vec(-0.5 * (m.metric(xx).inverse() * w));
  };
  UnitShot shot;
  while (shot.length < length) {
    const double h = dt;
    const Vec k1x = v, k1v = accel(x, v);
    const Vec k2x = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h * k1x, Vec(v + 0.5 * h * k1v));
    const Vec k3x = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h * k2x, Vec(v + 0.5 * h * k2v));
    const Vec k4x = v + h * k3v, k4v = accel(x + h * k3x, Vec(v + h * k3v));
    const Vec nx = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x);
    Vec nv = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!nx.allFinite() || !nv.allFinite()) break;
    const double sp = std::sqrt(m.qr(nx, nv));
    if (!(sp > 1e-12)) break;
    nv /= sp;
    shot.length += std::sqrt(m.qr(Vec(0.5 * (x + nx)), Vec(nx - x)));
    x = nx;
    v = nv;
  }
  shot.displacement = x - x0;
  return shot;
}

}  // namespace

StableConeEstimate estimate_stable_cone(const MetricField& m, const SamplingBudget& budget,
                                        std::uint64_t seed) {
  const int n = m.dim();
  StableConeEstimate est;
  StableNormOptions nopt;
  if (n == 3) {  // diagnostic accuracy suffices off the acceptance presets
    nopt.stencil_radius = 2;
    nopt.corridor_margin = 1.0;
  }
  est.norm = estimate_stable_norm(m, budget.norm_dir_radius, budget.norm_n_max, nopt);
  const NormModel N = est.norm.to_norm_model();

  std::vector<Vec> samples;
  std::mt19937_64 rng(seed ^ 0xa02b7f31ull);

  // geodesic shots: half along sampled null boundary directions, half interior
  for (int i = 0; i < budget.geodesics; ++i) {
    Vec x0(n);
    for (int c = 0; c < n; ++c) x0[c] = uniform(rng, 0.0, m.lattice()[c]);
    const auto rays = sample_cone_rays(m, x0, n == 2 ? 2 : 16, 8);
    Vec v0;
    if (i % 2 == 0 && !rays.boundary.empty()) {
      v0 = rays.boundary[static_cast<std::size_t>(rng() % rays.boundary.size())];
    } else {
      v0 = rays.interior[static_cast<std::size_t>(rng() % rays.interior.size())];
    }
    const UnitShot shot = shoot_unit_speed(m, x0, v0, budget.geodesic_length, budget.geodesic_dt);
    if (shot.length < budget.l_min) continue;
    samples.push_back(shot.displacement / shot.length);
    ++est.sources.geodesic;
  }

  // random causal walks
  for (int i = 0; i < budget.walks; ++i) {
    Vec x0(n);
    for (int c = 0; c < n; ++c) x0[c] = uniform(rng, 0.0, m.lattice()[c]);
    const auto walk = random_causal_walk(m, x0, budget.walk_steps, budget.walk_step_len,
                                         seed * 1000003ull + 17ull * i);
    const auto len = curve_lengths(m, walk, 1);
    if (len.riemannian < budget.l_min) continue;
    samples.push_back((walk.vertices.back() - walk.vertices.front()) / len.riemannian);
    ++est.sources.walk;
  }

  // lattice classes with vanishing frak-f, normalized by the stable norm
  // (hmax <= 0 disables the scan; done for 3D diagnostics where the table
  // window would dominate the budget)
  if (budget.frak_scan_hmax > 0) {
    FrakFOptions fopt;
    fopt.hmax = budget.frak_scan_hmax;
    const FrakFTable table = build_frak_f_table(m, budget.frak_resolution, fopt);
    VecI h(n);
    std::int64_t slots = 1;
    const int side = 2 * fopt.hmax + 1;
    for (int i = 0; i < n; ++i) slots *= side;
    for (std::int64_t t = 0; t < slots; ++t) {
      std::int64_t r = t;
      bool zero = true;
      for (int i = n - 1; i >= 0; --i) {
        h[i] = static_cast<int>(r % side) - fopt.hmax;
        if (h[i] != 0) zero = false;
        r /= side;
      }
      if (zero) continue;
      if (table.at(h).f_of_h <= 2.0 * table.cell()) {
        const Vec v = class_vector(m, h);
        samples.push_back(v / N(v));
        ++est.sources.frak_zero;
      }
    }
  }

  if (samples.empty()) throw Error("estimate_stable_cone: empty sample set");
  est.cone = conic_hull(samples);
  est.cross_section.reserve(samples.size());
  for (const auto& s : samples) est.cross_section.push_back(s / N(s));
  return est;
}

double a_of_h(const StableConeEstimate& est, const NormModel& norm, const Vec& h) {
  if (est.cone.is_zero() && est.cross_section.empty())
    throw InvalidInput("a_of_h: empty cone estimate");
  return exterior_distance(est.cone, h, norm);
}

P01aReport check_p01a(const MetricField& m, const StableConeEstimate& est, int samples,
                      std::uint64_t seed, int resolution, double h_norm_range) {
  const int n = m.dim();
  const NormModel N = est.norm.to_norm_model(n == 2 ? 256 : 512);
  P01aReport rep;
  std::mt19937_64 rng(seed ^ 0x5bd1e995ull);

  // norm-vs-euclid comparability bounds for pruned nearest-point search
  double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
  for (const auto& u : direction_grid(n, 64)) {
    const double r = N(u);
    ratio_lo = std::min(ratio_lo, r);
    ratio_hi = std::max(ratio_hi, r);
  }

  const int sources = std::max(2, samples / 16);
  // the window has to contain every candidate class plus the reach margin
  const int reach_copies = std::max(
      2, static_cast<int>(std::ceil(h_norm_range / (ratio_lo * m.lattice().minCoeff()))) + 1);
  for (int s = 0; s < sources; ++s) {
    Vec x(n);
    for (int c = 0; c < n; ++c) x[c] = uniform(rng, 0.0, m.lattice()[c]);
    const VecI wlo = VecI::Constant(n, -reach_copies), whi = VecI::Constant(n, reach_copies);
    ReachOptions ropt;
    ropt.step_cells = n == 2 ? 4 : 2;
    const ReachGrid reach = forward_reach(m, x, wlo, whi, resolution, ropt);

    std::vector<std::int64_t> reached_idx;
    for (std::int64_t i = 0; i < reach.geom.total; ++i)
      if (reach.reached[i]) reached_idx.push_back(i);
    if (reached_idx.empty()) continue;

    // (a) forward: reached displacements must hug the cone
    for (int k = 0; k < samples / sources; ++k) {
      const std::int64_t zi = reached_idx[static_cast<std::size_t>(rng() % reached_idx.size())];
      const Vec z = reach.geom.point(reach.geom.unindex(zi));
      rep.forward_samples.push_back(exterior_distance(est.cone, Vec(z - x), N));
    }

    // (b) backward: moderate-norm cone classes must hug J+(x) - x
    for (int k = 0; k < samples / sources; ++k) {
      // a random direction inside the estimated cone, scaled to moderate norm
      const auto& rays = est.cone.rays();
      if (rays.empty()) break;
      Vec dir = rays[static_cast<std::size_t>(rng() % rays.size())];
      if (rays.size() >= 2) {
        const Vec other = rays[static_cast<std::size_t>(rng() % rays.size())];
        const double t = u01(rng);
        dir = ((1.0 - t) * dir + t * other);
        dir /= dir.norm();
      }
      const double target_norm = uniform(rng, 0.5, h_norm_range);
      const Vec h = dir * (target_norm / N(dir));
      // nearest reached displacement in the stable norm, euclid-pruned
      double best_e = std::numeric_limits<double>::infinity();
      for (const std::int64_t zi : reached_idx) {
        const Vec z = reach.geom.point(reach.geom.unindex(zi));
        best_e = std::min(best_e, (z - x - h).norm());
      }
      const double cutoff = best_e * ratio_hi / ratio_lo + 1e-12;
      double best = std::numeric_limits<double>::infinity();
      for (const std::int64_t zi : reached_idx) {
        const Vec z = reach.geom.point(reach.geom.unindex(zi));
        const Vec d = z - x - h;
        if (d.norm() > cutoff) continue;
        best = std::min(best, N(d));
      }
      rep.backward_samples.push_back(best);
    }
  }
  double err = 0.0;
  for (double v : rep.forward_samples) err = std::max(err, v);
  for (double v : rep.backward_samples) err = std::max(err, v);
  rep.err_est = err;
  return rep;
}

VectorFieldSpec VectorFieldSpec::from_json(const nlohmann::json& j) {
  VectorFieldSpec s;
  s.kind = j.value("kind", std::string("orientation"));
  if (s.kind == "constant") {
    if (!j.contains("v")) throw InvalidInput("flow field: constant kind requires 'v'");
    s.v = vec_from_json(j["v"]);
  } else if (s.kind != "orientation") {
    throw InvalidInput("flow field: unknown kind '" + s.kind + "'");
  }
  return s;
}

nlohmann::json VectorFieldSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  if (kind == "constant") j["v"] = lab::to_json(v);
  return j;
}

Vec flow_rotation_vector(const MetricField& m, const VectorFieldSpec& field, const Vec& x0,
                         double T, double dt) {
  if (T <= 0 || dt <= 0) throw InvalidInput("flow_rotation_vector: T and dt must be positive");
  auto eval = [&](const Vec& p) -> Vec {
    Vec f = field.kind == "constant" ? field.v : m.orientation(p);
    const double q = m.q(p, f);
    if (q >= 0.0) {
      std::ostringstream os;
      os << "flow field fails the timelike check at (";
      for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
      os << ")";
      throw Error(os.str());
    }
    return Vec(f / std::sqrt(m.qr(p, f)));  // g_R arclength parameterization
  };
  Vec x = x0;
  const int steps = static_cast<int>(std::ceil(T / dt));
  for (int s = 0; s < steps; ++s) {
    const double h = std::min(dt, T - s * dt);
    const Vec k1 = eval(x);
    const Vec k2 = eval(x + 0.5 * h * k1);
    const Vec k3 = eval(x + 0.5 * h * k2);
    const Vec k4 = eval(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return (x - x0) / T;
}

nlohmann::json StableConeEstimate::to_json() const {
  nlohmann::json j;
  j["cone"] = cone.to_json();
  j["err_est"] = err_est;
  j["sources"] = {{"geodesic", sources.geodesic},
                  {"walk", sources.walk},
                  {"frak_zero", sources.frak_zero}};
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& v : cross_section) cs.push_back(lab::to_json(v));
  j["cross_section"] = cs;
  j["norm"] = norm.to_json();
  return j;
}

}  // namespace lab
