#include "lab/timesep.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

namespace {

// Quadrature bookkeeping: every stage uses the same total number of sample
// points (legs * subdiv == segments * final_subdiv), so inserting midpoints
// between stages preserves the value exactly and refinement is monotone.
struct Objective {
  const MetricField& m;
  double causal_tol;

  double leg_length(const Vec& a, const Vec& b, int subdiv) const {
    const Vec d = (b - a) / subdiv;
    double len = 0.0;
    for (int s = 0; s < subdiv; ++s) {
      const Vec mid = a + (s + 0.5) * d;
      const double q = m.q(mid, d);
      if (q < 0.0) len += std::sqrt(-q);
    }
    return len;
  }
  bool leg_feasible(const Vec& a, const Vec& b, int subdiv) const {
    const Vec d = b - a;
    if (d.squaredNorm() < 1e-300) return false;
    for (int s = 0; s <= subdiv; ++s) {
      const Vec at = a + (static_cast<double>(s) / subdiv) * d;
      const Mat g = m.metric(at);
      const double q = d.dot(g * d);
      if (q > causal_tol * m.qr(at, d)) return false;
      if (d.dot(g * m.orientation(at)) >= 0.0) return false;
    }
    return true;
  }
  double total(const std::vector<Vec>& v, int subdiv) const {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) len += leg_length(v[i], v[i + 1], subdiv);
    return len;
  }
  bool feasible(const std::vector<Vec>& v, int subdiv) const {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (!leg_feasible(v[i], v[i + 1], subdiv)) return false;
    return true;
  }
};

struct AscentResult {
  std::vector<Vec> path;
  double value = 0.0;
  bool converged = false;
  int projections = 0;
};

// coordinate ascent over interior vertices with pull-back onto the cone
AscentResult ascend(const Objective& obj, std::vector<Vec> path, int subdiv,
                    const TimeSepOptions& opt) {
  AscentResult res;
  const int n = static_cast<int>(path.front().size());
  const double scale = (path.back() - path.front()).norm() / (path.size() - 1);
  const double fd = 1e-6 * scale;
  double value = obj.total(path, subdiv);
  std::vector<double> step(path.size(), 0.25 * scale);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double before = value;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      const Vec a = path[i - 1], b = path[i + 1];
      auto local = [&](const Vec& v) {
        return obj.leg_length(a, v, subdiv) + obj.leg_length(v, b, subdiv);
      };
      auto local_ok = [&](const Vec& v) {
        return obj.leg_feasible(a, v, subdiv) && obj.leg_feasible(v, b, subdiv);
      };
      Vec grad(n);
      for (int c = 0; c < n; ++c) {
        Vec e = Vec::Zero(n);
        e[c] = fd;
        grad[c] = (local(path[i] + e) - local(path[i] - e)) / (2.0 * fd);
      }
      const double gn = grad.norm();
      if (gn < 1e-14) continue;
      grad /= gn;
      const double base = local(path[i]);
      bool accepted = false;
      for (int attempt = 0; attempt < 3 && !accepted; ++attempt) {
        Vec cand = path[i] + step[i] * grad;
        if (!local_ok(cand)) {
          // pull the step back along its own line onto the cone
          double lo = 0.0, hi = 1.0;
          for (int k = 0; k < 10; ++k) {
            const double mid = 0.5 * (lo + hi);
            (local_ok(Vec(path[i] + mid * step[i] * grad)) ? lo : hi) = mid;
          }
          ++res.projections;
          if (lo == 0.0) {
            step[i] *= 0.4;
            continue;
          }
          cand = path[i] + lo * step[i] * grad;
        }
        const double cv = local(cand);
        if (cv > base + 1e-15) {
          value += cv - base;
          path[i] = cand;
          step[i] *= 1.4;
          accepted = true;
        } else {
          step[i] *= 0.4;
        }
      }
    }
    value = obj.total(path, subdiv);  // refresh accumulated roundoff
    if (value - before <= opt.rel_tol * (1.0 + std::abs(value))) {
      res.converged = true;
      break;
    }
  }
  res.path = std::move(path);
  res.value = value;
  return res;
}

std::vector<Vec> straight_path(const Vec& p, const Vec& q, int legs) {
  std::vector<Vec> v;
  v.reserve(legs + 1);
  for (int i = 0; i <= legs; ++i) v.push_back(p + (static_cast<double>(i) / legs) * (q - p));
  return v;
}

std::vector<Vec> subdivide(const std::vector<Vec>& v) {
  std::vector<Vec> out;
  out.reserve(2 * v.size());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    out.push_back(v[i]);
    out.push_back(0.5 * (v[i] + v[i + 1]));
  }
  out.push_back(v.back());
  return out;
}

// resample a polyline to `legs` legs by euclidean arclength
std::vector<Vec> resample(const std::vector<Vec>& v, int legs) {
  std::vector<double> acc(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) acc[i] = acc[i - 1] + (v[i] - v[i - 1]).norm();
  const double total = acc.back();
  std::vector<Vec> out;
  out.push_back(v.front());
  std::size_t j = 1;
  for (int i = 1; i < legs; ++i) {
    const double target = total * i / legs;
    while (j + 1 < v.size() && acc[j] < target) ++j;
    const double seg = acc[j] - acc[j - 1];
    const double t = seg > 0 ? (target - acc[j - 1]) / seg : 0.0;
    out.push_back(v[j - 1] + t * (v[j] - v[j - 1]));
  }
  out.push_back(v.back());
  return out;
}

}  // namespace

MaxPathResult time_separation(const MetricField& m, const Vec& p, const Vec& q, int segments,
                              int restarts, std::uint64_t seed, const TimeSepOptions& opt) {
  if (segments < 2) throw InvalidInput("time_separation: segments must be >= 2");
  if (!p.allFinite() || !q.allFinite())
    throw InvalidInput("time_separation: non-finite endpoints");
  MaxPathResult out;
  if ((q - p).norm() < 1e-300) {
    out.converged = true;
    return out;
  }
  const Objective obj{m, opt.causal_tol};
  const int n = m.dim();

  // stage plan: leg counts doubling up to `segments`, constant total quadrature
  std::vector<int> stages;
  for (int k = 2; k < segments; k *= 2) stages.push_back(k);
  stages.push_back(segments);
  auto stage_subdiv = [&](int legs) {
    return std::max(1, segments * opt.subdiv / legs);
  };

  const bool straight_ok = obj.feasible(straight_path(p, q, 2), stage_subdiv(2));
  std::optional<PolygonalWorldline> guide;
  if (!straight_ok) {
    // reach check: is q inside the window approximation of J^+(p)?
    const Vec& L = m.lattice();
    VecI wlo(n), whi(n);
    for (int i = 0; i < n; ++i) {
      wlo[i] = static_cast<int>(std::floor(std::min(p[i], q[i]) / L[i])) - 1;
      whi[i] = static_cast<int>(std::ceil(std::max(p[i], q[i]) / L[i])) + 1;
    }
    ReachOptions ropt;
    ropt.step_cells = opt.zero_check_step_cells;
    const ReachGrid reach = forward_reach(m, p, wlo, whi, opt.zero_check_resolution, ropt);
    if (!reach.reached_point(q)) {
      out.converged = true;  // supremum over the empty set
      return out;
    }
    guide = reach.chain_to(q);
  }

  double best = 0.0;
  std::vector<Vec> best_path;
  bool best_converged = false;
  bool any_feasible = false;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x51ab2cd1 + r);
    // initial path at the earliest stage that admits a feasible resampling
    std::vector<Vec> path;
    std::size_t start_stage = stages.size();
    for (std::size_t si = 0; si < stages.size(); ++si) {
      std::vector<Vec> cand = guide ? resample(guide->vertices, stages[si])
                                    : straight_path(p, q, stages[si]);
      if (obj.feasible(cand, stage_subdiv(stages[si]))) {
        path = std::move(cand);
        start_stage = si;
        break;
      }
      if (!guide) break;  // a straight line infeasible at 2 legs stays infeasible
    }
    if (start_stage == stages.size()) continue;
    if (r > 0) {  // jitter interior vertices, shrinking until feasible
      const double sigma = 0.15 * (q - p).norm() / (path.size() - 1);
      std::vector<Vec> jit(path.size(), Vec::Zero(n));
      for (std::size_t i = 1; i + 1 < path.size(); ++i)
        for (int c = 0; c < n; ++c) jit[i][c] = gauss(rng) * sigma;
      for (int shrink = 0; shrink < 10; ++shrink) {
        std::vector<Vec> cand = path;
        for (std::size_t i = 1; i + 1 < cand.size(); ++i) cand[i] += jit[i];
        if (obj.feasible(cand, stage_subdiv(stages[start_stage]))) {
          path = cand;
          break;
        }
        for (auto& jv : jit) jv *= 0.5;
      }
    }
    any_feasible = true;
    double rv = 0.0;
    bool conv = false;
    for (std::size_t si = start_stage; si < stages.size(); ++si) {
      const int legs = stages[si];
      while (static_cast<int>(path.size()) - 1 < legs) path = subdivide(path);
      AscentResult ar = ascend(obj, path, stage_subdiv(legs), opt);
      path = std::move(ar.path);
      rv = ar.value;
      conv = ar.converged;
      out.projection_events += ar.projections;
      if (out.refinement_trace.size() <= si)
        out.refinement_trace.push_back({legs, rv});
      else
        out.refinement_trace[si].second = std::max(out.refinement_trace[si].second, rv);
    }
    ++out.restarts_used;
    if (rv > best) {
      best = rv;
      best_path = path;
      best_converged = conv;
    }
  }
  out.value = best;
  out.converged = best_converged || (best == 0.0 && !any_feasible && !guide);
  if (!best_path.empty()) out.path.vertices = std::move(best_path);
  return out;
}

double time_separation_oracle(const MetricField& m, const Vec& p, const Vec& q, int resolution,
                              const OracleOptions& opt) {
  const int n = m.dim();
  const Vec& L = m.lattice();
  VecI wlo(n), whi(n);
  for (int i = 0; i < n; ++i) {
    wlo[i] = static_cast<int>(std::floor(std::min(p[i], q[i]) / L[i])) - 1;
    whi[i] = static_cast<int>(std::ceil(std::max(p[i], q[i]) / L[i])) + 1;
  }
  const GridGeom geom = GridGeom::over_window(m, resolution, wlo, whi);
  const VecI pidx = geom.snap(p), qidx = geom.snap(q);
  if (!geom.inside(pidx) || !geom.inside(qidx))
    throw WindowOverflow("time_separation_oracle: endpoints outside the grid window");

  const int axis = m.time_axis();
  auto offsets = box_offsets(n, opt.step_cells);
  offsets.erase(std::remove_if(offsets.begin(), offsets.end(),
                               [&](const VecI& o) { return o[axis] <= 0; }),
                offsets.end());
  std::vector<Vec> deltas(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    Vec d(n);
    for (int a = 0; a < n; ++a) d[a] = offsets[i][a] * geom.cell[a];
    deltas[i] = d;
  }

  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> value(static_cast<std::size_t>(geom.total), ninf);
  value[geom.index(pidx)] = 0.0;

  const Objective obj{m, opt.causal_tol};
  // process nodes slice by slice along the time axis
  VecI idx(n);
  const std::int64_t per_slice = geom.total / geom.n[axis];
  for (int t = geom.lo[axis]; t <= geom.hi[axis]; ++t) {
    for (std::int64_t s = 0; s < per_slice; ++s) {
      // decode the non-time coordinates from s
      std::int64_t rem = s;
      for (int a = n - 1; a >= 0; --a) {
        if (a == axis) continue;
        idx[a] = geom.lo[a] + static_cast<int>(rem % geom.n[a]);
        rem /= geom.n[a];
      }
      idx[axis] = t;
      const std::int64_t vi = geom.index(idx);
      double bestv = value[vi];
      const Vec at = geom.point(idx);
      for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        const VecI sidx = idx - offsets[oi];
        if (!geom.inside(sidx)) continue;
        const double sv = value[geom.index(sidx)];
        if (!(sv > ninf)) continue;
        const Vec from = geom.point(sidx);
        if (!obj.leg_feasible(from, at, std::max(2, opt.subdiv))) continue;
        const double cand = sv + obj.leg_length(from, at, opt.subdiv);
        if (cand > bestv) bestv = cand;
      }
      value[vi] = bestv;
    }
  }
  const double vq = value[geom.index(qidx)];
  return vq > ninf ? vq : 0.0;
}

double min_leg_margin(const MetricField& m, const PolygonalWorldline& path) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const Vec d = path.vertices[i + 1] - path.vertices[i];
    const Vec mid = 0.5 * (path.vertices[i] + path.vertices[i + 1]);
    margin = std::min(margin, timecone_margin(m, mid, d));
  }
  return margin;
}

}  // namespace lab
