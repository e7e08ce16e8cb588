#include "lab/certify.hpp"

#include "lab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lab {

namespace {

int default_grid(const MetricField& m) { return m.dim() == 2 ? 16 : 14; }
int default_rays(const MetricField& m) { return m.dim() == 2 ? 16 : 32; }

std::vector<Vec> sample_grid_points(const MetricField& m, int per_axis) {
  const int n = m.dim();
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  std::vector<Vec> pts;
  pts.reserve(total);
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t r = t;
    Vec p(n);
    for (int i = 0; i < n; ++i) {
      p[i] = m.lattice()[i] * (r % per_axis) / per_axis;
      r /= per_axis;
    }
    pts.push_back(p);
  }
  return pts;
}

// future causal unit samples over a fundamental-domain grid, shared by every
// candidate covector
struct CausalSamples {
  std::vector<Vec> points;
  std::vector<std::vector<Vec>> rays;  // per point
};

CausalSamples collect_causal_samples(const MetricField& m, int grid, int rays) {
  CausalSamples cs;
  cs.points = sample_grid_points(m, grid);
  cs.rays.reserve(cs.points.size());
  for (const auto& p : cs.points) {
    const auto sample = sample_cone_rays(m, p, m.dim() == 2 ? 2 : std::max(8, rays / 2),
                                         std::max(2, rays / 2));
    cs.rays.push_back(sample.all());
  }
  return cs;
}

// min over the cached samples of alpha.v, tracking the minimizing sample
double min_causal_pairing(const CausalSamples& cs, const Vec& alpha, Vec* wpoint, Vec* wray) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cs.points.size(); ++i) {
    for (const auto& v : cs.rays[i]) {
      const double pairing = alpha.dot(v);
      if (pairing < c) {
        c = pairing;
        if (wpoint) *wpoint = cs.points[i];
        if (wray) *wray = v;
      }
    }
  }
  return c;
}

}  // namespace

std::optional<TransversalForm> find_transversal_form(const MetricField& m,
                                                     const StableConeEstimate& est,
                                                     const CertifyBudget& budget) {
  const int n = m.dim();
  const int grid = budget.grid_per_axis > 0 ? budget.grid_per_axis : default_grid(m);
  const int rays = budget.rays_per_point > 0 ? budget.rays_per_point : default_rays(m);

  const PolyCone dual = dual_cone(est.cone);
  if (dual.is_zero()) return std::nullopt;

  // candidate covectors: dual interior samples, deepest (w.r.t. the primal
  // rays) first; coordinate axes are appended so exact axis-aligned forms are
  // found exactly when they qualify
  std::vector<Vec> candidates;
  if (!dual.rays().empty() && !dual.contains_line()) {
    Vec axis = Vec::Zero(n);
    for (const auto& r : dual.rays()) axis += r;
    if (axis.norm() > 1e-12) candidates.push_back(axis.normalized());
  }
  for (const auto& r : dual.rays()) candidates.push_back(r);
  if (n == 2 && dual.shape() == PolyCone::Shape::pointed && dual.rays().size() == 2) {
    const double a0 = std::atan2(dual.rays()[0][1], dual.rays()[0][0]);
    const double a1 = std::atan2(dual.rays()[1][1], dual.rays()[1][0]);
    double delta = a1 - a0;
    while (delta > M_PI) delta -= 2 * M_PI;
    while (delta < -M_PI) delta += 2 * M_PI;
    for (int k = 1; k < 32; ++k) {
      const double a = a0 + delta * k / 32.0;
      candidates.push_back(vec2(std::cos(a), std::sin(a)));
    }
  }
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    candidates.push_back(e);
    candidates.push_back(-e);
  }
  // depth-sorted: deepest pairing with the estimated cone first
  auto depth = [&](const Vec& u) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& r : est.cone.rays()) d = std::min(d, u.dot(r));
    return d;
  };
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Vec& a, const Vec& b) { return depth(a) > depth(b); });

  const CausalSamples cs = collect_causal_samples(m, grid, rays);
  for (const auto& alpha : candidates) {
    if (depth(alpha) <= 0) break;  // remaining candidates leave the dual interior
    const double c = min_causal_pairing(cs, alpha, nullptr, nullptr);
    if (c >= budget.margin) return TransversalForm{alpha, c};
  }
  return std::nullopt;
}

TemporalCheck temporal_function_probe(const MetricField& m, const Vec& alpha,
                                      const CertifyBudget& budget) {
  const int grid = budget.grid_per_axis > 0 ? budget.grid_per_axis : default_grid(m);
  const int rays = budget.rays_per_point > 0 ? budget.rays_per_point : default_rays(m);
  TemporalCheck out;
  const CausalSamples cs = collect_causal_samples(m, grid, rays);
  out.c = min_causal_pairing(cs, alpha, &out.witness_point, &out.witness_ray);
  if (out.c <= 0) return out;
  double dual_sup = 0.0;
  for (const auto& p : sample_grid_points(m, grid)) {
    const Mat gr_inv = m.riemannian(p).inverse();
    dual_sup = std::max(dual_sup, std::sqrt(alpha.dot(gr_inv * alpha)));
  }
  out.cor110_constant = dual_sup / out.c;
  // chain check on random causal walks
  std::mt19937_64 rng(budget.seed ^ 0x1234abcdull);
  out.chains_ok = true;
  const int chains = 100;
  for (int i = 0; i < chains; ++i) {
    Vec x0(m.dim());
    for (int c2 = 0; c2 < m.dim(); ++c2) x0[c2] = uniform(rng, 0.0, m.lattice()[c2]);
    const auto walk = random_causal_walk(m, x0, 200, 0.05, budget.seed * 131ull + i);
    const auto len = curve_lengths(m, walk, 2);
    const double dist = (walk.vertices.back() - walk.vertices.front()).norm();
    if (len.riemannian > out.cor110_constant * dist + 0.05 * len.riemannian + 0.1)
      out.chains_ok = false;
  }
  out.chains_checked = chains;
  return out;
}

TemporalCheck temporal_function_check(const MetricField& m, const Vec& alpha,
                                      const CertifyBudget& budget) {
  TemporalCheck probe = temporal_function_probe(m, alpha, budget);
  // the boundary rays carry the null-classification tolerance, so a pairing
  // at that scale counts as a vanishing temporal constant
  if (probe.c <= 1e-9) {
    std::ostringstream os;
    os << "temporal_function_check: rejected form, c = " << probe.c << " at point (";
    for (int i = 0; i < probe.witness_point.size(); ++i)
      os << (i ? ", " : "") << probe.witness_point[i];
    os << ")";
    throw RejectedForm(os.str());
  }
  return probe;
}

Certificate certify_class_a(const MetricField& m, const CertifyBudget& budget) {
  Certificate cert;
  const int vres = budget.vicious_resolution > 0 ? budget.vicious_resolution
                                                 : (m.dim() == 2 ? 48 : 24);
  const ViciousnessReport vic = is_vicious(m, vres);
  cert.vicious.vicious = vic.vicious;
  cert.vicious.resolution = vres;
  for (auto b : vic.on_loop) cert.vicious.failing += b ? 0 : 1;
  cert.vicious.failing_points = vic.failing_points;

  cert.cone_estimate = estimate_stable_cone(m, budget.cone, budget.seed);
  cert.cone_estimate.err_est =
      check_p01a(m, cert.cone_estimate, budget.p01a_samples, budget.seed,
                 m.dim() == 2 ? 32 : 16)
          .err_est;

  const auto comp = is_compact_cone(cert.cone_estimate.cone);
  cert.zero_excluded.excluded = comp.compact;
  cert.zero_excluded.margin = comp.margin;
  cert.zero_excluded.witness = comp.witness;

  cert.transversal = find_transversal_form(m, cert.cone_estimate, budget);
  if (cert.transversal) cert.temporal = temporal_function_probe(m, cert.transversal->alpha, budget);

  if (cert.vicious.vicious && (cert.zero_excluded.excluded || cert.transversal)) {
    cert.verdict = Certificate::Verdict::class_a;
    cert.reason = "vicious with compact stable cone";
  } else if (!cert.vicious.vicious && m.known_nonvicious()) {
    // numerics alone never decide a negative; the preset carries the
    // paper-level witness (trapped slabs)
    cert.verdict = Certificate::Verdict::not_class_a;
    cert.reason = "viciousness";
  } else if (!cert.vicious.vicious) {
    cert.verdict = Certificate::Verdict::inconclusive;
    cert.reason = "no timelike loops found at this resolution";
  } else {
    cert.verdict = Certificate::Verdict::inconclusive;
    cert.reason = "no constant transversal representative found";
  }
  return cert;
}

SctpReport sctp_check(const MetricField& m, const Vec& alpha, const SctpOptions& opt) {
  const int n = m.dim();
  const Vec& L = m.lattice();
  // rational-pairing requirement: alpha_i * L_i within 1e-9 of p/q, q <= 64
  Vec pairings(n);
  for (int i = 0; i < n; ++i) {
    pairings[i] = alpha[i] * L[i];
    bool rational = false;
    for (int q = 1; q <= 64 && !rational; ++q)
      rational = std::abs(pairings[i] * q - std::llround(pairings[i] * q)) < 1e-9 * q;
    if (!rational)
      throw InvalidInput("sctp_check: alpha has an irrational lattice pairing on axis " +
                         std::to_string(i));
  }
  // minimal positive pairing over small lattice classes, used to normalize;
  // among the minimizers keep the euclidean-shortest representative
  double minpos = std::numeric_limits<double>::infinity();
  VecI kmin = VecI::Zero(n);
  const auto classes = box_offsets(n, 3);
  for (const auto& k : classes) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += pairings[i] * k[i];
    if (v <= 1e-12) continue;
    if (v < minpos - 1e-12 ||
        (v < minpos + 1e-12 && to_vec(k).norm() < to_vec(kmin).norm())) {
      minpos = v;
      kmin = k;
    }
  }
  if (!std::isfinite(minpos)) throw InvalidInput("sctp_check: alpha vanishes on the lattice");
  // fiber classes: lattice vectors the Z-quotient identifies away
  std::vector<VecI> fiber_classes = {VecI::Zero(n)};
  for (const auto& k : classes) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += pairings[i] * k[i];
    if (std::abs(v) < 1e-12) fiber_classes.push_back(k);
  }

  SctpReport rep;
  rep.alpha = alpha / minpos;  // tau(psi x) = tau(x) + 1 for the generator
  rep.translation = kmin;

  // (1) each level set is a section over the fiber directions: for a linear
  // tau this is the statement that alpha does not vanish, checked by walking
  // fiber lines and counting crossings
  const int axis = [&] {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(rep.alpha[i]) > std::abs(rep.alpha[best])) best = i;
    return best;
  }();
  rep.level_sets_graphs = std::abs(rep.alpha[axis]) > 1e-12;

  // sampled fiber points on Sigma_0 = {tau = 0}
  std::vector<Vec> sigma0;
  {
    std::mt19937_64 rng(0x7777);
    for (int s = 0; s < opt.fiber_samples; ++s) {
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = uniform(rng, 0.0, L[i]);
      // project onto the level set along the axis
      const double tau = rep.alpha.dot(p);
      p[axis] -= tau / rep.alpha[axis];
      sigma0.push_back(p);
    }
  }

  // (2) Sigma_n in I^-(Sigma_{n+1}): from every sample of Sigma_0 some point
  // with tau >= 1 is chronologically reached
  ReachOptions ropt;
  ropt.causal_tol = -opt.eps_t;  // strictly timelike steps
  rep.chronology = true;
  const VecI wlo = VecI::Constant(n, -2), whi = VecI::Constant(n, 2 + opt.max_n0);
  for (const auto& p : sigma0) {
    const ReachGrid reach = forward_reach(m, p, wlo, whi, opt.resolution, ropt);
    bool crossed = false;
    for (std::int64_t i = 0; i < reach.geom.total && !crossed; ++i) {
      if (!reach.reached[i]) continue;
      const Vec z = reach.geom.point(reach.geom.unindex(i));
      if (rep.alpha.dot(z) >= 1.0) crossed = true;
    }
    if (!crossed) rep.chronology = false;

    // (3) smallest n0 with psi_n0(p) in I^+(p); in the Z-quotient the point
    // psi_n0(p) is p + n0*k up to any fiber-lattice translate
    int found = -1;
    for (int n0 = 1; n0 <= opt.max_n0 && found < 0; ++n0) {
      for (const auto& f : fiber_classes) {
        Vec target = p;
        for (int i = 0; i < n; ++i) target[i] += (n0 * kmin[i] + f[i]) * L[i];
        if (reach.reached_point(target)) {
          found = n0;
          break;
        }
      }
    }
    rep.minimal_n0 = std::max(rep.minimal_n0, found >= 0 ? found : opt.max_n0 + 1);
  }
  if (rep.minimal_n0 > opt.max_n0) rep.minimal_n0 = -1;
  return rep;
}

LipschitzReport coarse_lipschitz(const MetricField& m, const StableConeEstimate& est, double eps,
                                 int samples, std::uint64_t seed, const LipschitzOptions& opt) {
  if (eps <= 0.0) throw InvalidInput("coarse_lipschitz: eps must be positive");
  const NormModel N = est.norm.to_norm_model();
  const PolyCone sub = epsilon_subcone(est.cone, eps, N);
  if (sub.is_zero())
    throw InvalidInput("coarse_lipschitz: the eps-subcone is empty at this eps");
  const auto& rays = sub.rays();
  if (rays.empty()) throw InvalidInput("coarse_lipschitz: subcone has no rays");

  LipschitzReport rep;
  rep.eps = eps;
  rep.samples = samples;
  rep.noise_bound = opt.noise_bound;
  std::mt19937_64 rng(seed ^ 0xc0a7e5ull);
  TimeSepOptions topt;
  topt.max_sweeps = opt.max_sweeps;
  topt.rel_tol = 3e-6;

  auto sample_pair = [&](std::uint64_t pair_seed) {
    std::mt19937_64 prng(pair_seed);
    Vec x(m.dim());
    for (int i = 0; i < m.dim(); ++i)
      x[i] = uniform(prng, 0.0, opt.base_window * m.lattice()[i]);
    Vec dir = rays[static_cast<std::size_t>(prng() % rays.size())];
    if (rays.size() >= 2) {
      const Vec other = rays[static_cast<std::size_t>(prng() % rays.size())];
      const double t = u01(prng);
      dir = (1.0 - t) * dir + t * other;
      dir /= dir.norm();
    }
    const double target = uniform(prng, opt.norm_lo, opt.norm_hi);
    const Vec y = x + dir * (target / N(dir));
    return std::make_pair(x, y);
  };

  for (int s = 0; s < samples; ++s) {
    const auto [x, y] = sample_pair(seed * 7919ull + 2 * s);
    const auto [z, w] = sample_pair(seed * 7919ull + 2 * s + 1);
    const double dxy =
        time_separation(m, x, y, opt.segments, opt.restarts, seed + 31 * s, topt).value;
    const double dzw =
        time_separation(m, z, w, opt.segments, opt.restarts, seed + 31 * s + 17, topt).value;
    const double denom = (x - z).norm() + (y - w).norm() + 1.0;
    rep.ratios.push_back(std::abs(dxy - dzw) / denom);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
  }
  // histogram over [0, max]
  const int bins = 20;
  rep.hist_edges.resize(bins + 1);
  rep.hist_counts.assign(bins, 0);
  const double top = rep.max_ratio > 0 ? rep.max_ratio : 1.0;
  for (int b = 0; b <= bins; ++b) rep.hist_edges[b] = top * b / bins;
  for (double r : rep.ratios) {
    int b = std::min(bins - 1, static_cast<int>(r / top * bins));
    rep.hist_counts[b]++;
  }
  return rep;
}

Certificate perturbation_smoke_test(const PresetSpec& base, double amplitude,
                                    const CertifyBudget& budget) {
  const MetricField field = make_preset(base);
  const MetricField perturbed = perturb_metric(field, amplitude);
  return certify_class_a(perturbed, budget);
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["verdict"] = verdict == Verdict::class_a      ? "class_a"
                 : verdict == Verdict::not_class_a ? "not_class_a"
                                                   : "inconclusive";
  j["reason"] = reason;
  j["vicious"] = {{"vicious", vicious.vicious},
                  {"resolution", vicious.resolution},
                  {"failing_nodes", vicious.failing}};
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& p : vicious.failing_points) fails.push_back(lab::to_json(p));
  j["vicious"]["failing_points"] = fails;
  j["zero_excluded"] = {{"excluded", zero_excluded.excluded},
                        {"margin", zero_excluded.margin},
                        {"witness", lab::to_json(zero_excluded.witness)}};
  if (transversal) {
    j["transversal_form"] = {{"alpha", lab::to_json(transversal->alpha)},
                             {"margin", transversal->margin}};
  } else {
    j["transversal_form"] = nullptr;
  }
  if (temporal) {
    j["temporal"] = {{"c", temporal->c},
                     {"cor110_constant", temporal->cor110_constant},
                     {"chains_checked", temporal->chains_checked},
                     {"chains_ok", temporal->chains_ok}};
  } else {
    j["temporal"] = nullptr;
  }
  j["cone_estimate"] = cone_estimate.to_json();
  return j;
}

nlohmann::json SctpReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = lab::to_json(alpha);
  j["translation"] = lab::to_json(translation);
  j["level_sets_graphs"] = level_sets_graphs;
  j["chronology"] = chronology;
  j["minimal_n0"] = minimal_n0;
  j["passed"] = passed();
  return j;
}

nlohmann::json LipschitzReport::to_json() const {
  nlohmann::json j;
  j["eps"] = eps;
  j["samples"] = samples;
  j["max_ratio"] = max_ratio;
  j["noise_bound"] = noise_bound;
  j["ratios"] = ratios;
  j["hist_edges"] = hist_edges;
  j["hist_counts"] = hist_counts;
  return j;
}

}  // namespace lab
