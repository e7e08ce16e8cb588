#include "lab/reach.hpp"

#include "lab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

namespace lab {

namespace {

// Causal test for a whole straight step, sampled every ~cell along the way.
// In strict mode every sample must classify future causal. In integrated mode
// the trapezoid average of g(d,d) along the step is compared against the
// tolerance instead (the future pairing stays pointwise); this keeps the
// marked set within a cell of J^+ without the systematic inward bias that a
// pointwise test produces on variable metrics.
// Returns the trapezoid-averaged ratio g(d,d)/g_R(d,d) along the step, or
// +inf when the step fails a pointwise requirement (future pairing always;
// causality itself in strict mode). The step passes iff the result <= tol.
double step_causal_ratio(const MetricField& m, const Vec& from, const Vec& d, int extent,
                         double tol, int samples_per_cell, bool strict) {
  // strict inner approximation samples every cell; the integrated test keeps
  // quadrature error negligible with a capped sample count
  const int k = strict ? std::max(2, extent * samples_per_cell + 1)
                       : std::max(2, std::min(extent * samples_per_cell, 24) + 1);
  double qsum = 0.0, qrsum = 0.0;
  for (int j = 0; j < k; ++j) {
    const double t = static_cast<double>(j) / (k - 1);
    const Vec at = from + t * d;
    const Mat g = m.metric(at);
    const double q = d.dot(g * d);
    const double qr = m.qr(at, d);
    if (strict && q > tol * qr) return std::numeric_limits<double>::infinity();
    if (d.dot(g * m.orientation(at)) >= 0.0) return std::numeric_limits<double>::infinity();
    const double w = (j == 0 || j == k - 1) ? 0.5 : 1.0;
    qsum += w * q;
    qrsum += w * qr;
  }
  return qsum / std::max(qrsum, 1e-300);
}

bool step_future_causal(const MetricField& m, const Vec& from, const Vec& d, int extent,
                        double tol, int samples_per_cell, bool strict) {
  return step_causal_ratio(m, from, d, extent, tol, samples_per_cell, strict) <= tol;
}

bool step_timelike_margin(const MetricField& m, const Vec& from, const Vec& d, int extent,
                          double eps_t, int samples_per_cell) {
  const int k = std::max(2, extent * samples_per_cell + 1);
  for (int j = 0; j < k; ++j) {
    const double t = static_cast<double>(j) / (k - 1);
    const Vec at = from + t * d;
    const Mat g = m.metric(at);
    const double q = d.dot(g * d);
    const double qr = m.qr(at, d);
    if (q > -eps_t * qr) return false;
    if (d.dot(g * m.orientation(at)) >= 0.0) return false;
  }
  return true;
}

int offset_extent(const VecI& o) {
  int e = 0;
  for (int i = 0; i < o.size(); ++i) e = std::max(e, std::abs(o[i]));
  return e;
}

// Straight chord first; if that fails for a long step, try a two-leg path
// with one interior vertex shifted along the local future direction (the
// shift is continuous, so no new quantization enters). Both certificates are
// genuinely causal polygonal paths.
bool step_reachable(const MetricField& m, const Vec& from, const Vec& d, int extent, double tol,
                    int samples_per_cell, bool strict) {
  const double ratio = step_causal_ratio(m, from, d, extent, tol, samples_per_cell, strict);
  if (ratio <= tol) return true;
  // bends only help marginal chords; deeply spacelike directions stay out
  if (strict || extent < 8 || !(ratio <= 0.5)) return false;
  const Vec mid = from + 0.5 * d;
  Vec T = m.orientation(mid);
  T /= std::sqrt(m.qr(mid, T));
  const double scale = std::sqrt(m.qr(mid, d));
  const int half = extent / 2 + 1;
  for (double frac : {0.01, 0.02, 0.04, 0.07, 0.12, 0.2}) {
    for (double sgn : {1.0, -1.0}) {
      const Vec shift = (sgn * frac * scale) * T;
      const Vec leg1 = 0.5 * d + shift;
      if (!step_future_causal(m, from, leg1, half, tol, samples_per_cell, strict)) continue;
      const Vec leg2 = 0.5 * d - shift;
      if (step_future_causal(m, Vec(from + leg1), leg2, half, tol, samples_per_cell, strict))
        return true;
    }
  }
  return false;
}

// Drops step directions that are nowhere near causal (resp. nowhere near the
// timelike margin band) on a coarse sample grid of the fundamental domain.
// Pruning only skips candidate steps, so the inner-approximation guarantee is
// unaffected; the slack keeps directions that could turn causal between
// samples.
std::vector<std::size_t> plausible_offsets(const MetricField& m, const std::vector<Vec>& deltas,
                                           double ratio_bound) {
  const int n = m.dim();
  const int K = n == 2 ? 25 : 9;
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(std::pow(K, n)));
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= K;
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t r = t;
    Vec p(n);
    for (int i = 0; i < n; ++i) {
      p[i] = m.lattice()[i] * ((r % K) + 0.37) / K;
      r /= K;
    }
    pts.push_back(p);
  }
  const double slack = 0.35;
  std::vector<std::size_t> keep;
  for (std::size_t oi = 0; oi < deltas.size(); ++oi) {
    const Vec& d = deltas[oi];
    for (const auto& p : pts) {
      const Mat g = m.metric(p);
      const double q = d.dot(g * d);
      const double qr = m.qr(p, d);
      if (q > (ratio_bound + slack) * qr) continue;
      const Vec X = m.orientation(p);
      const double pair = d.dot(g * X) / std::sqrt(qr * m.qr(p, X));
      if (pair < slack) {
        keep.push_back(oi);
        break;
      }
    }
  }
  return keep;
}

std::vector<VecI> step_offsets(int dim, int radius) {
  // beyond a small radius, composite directions are redundant: a 2k-step in
  // the same direction is two k-steps through an existing grid node
  return radius >= 8 ? reduced_offsets(dim, radius) : box_offsets(dim, radius);
}

}  // namespace

// ---------------------------------------------------------------------------
// forward reach

bool ReachGrid::reached_point(const Vec& p) const {
  const VecI idx = geom.snap(p);
  if (!geom.inside(idx)) return false;
  return reached[geom.index(idx)] != 0;
}

std::int64_t ReachGrid::reached_count() const {
  std::int64_t c = 0;
  for (auto b : reached) c += b;
  return c;
}

PolygonalWorldline ReachGrid::chain_to(const Vec& q) const {
  if (parent.empty()) throw Unavailable("reach: parents were not recorded");
  const VecI idx = geom.snap(q);
  if (!geom.inside(idx) || !reached[geom.index(idx)])
    throw Unavailable("reach: point was not reached");
  PolygonalWorldline chain;
  std::int64_t at = geom.index(idx);
  while (at >= 0) {
    chain.vertices.push_back(geom.point(geom.unindex(at)));
    at = parent[at];
  }
  std::reverse(chain.vertices.begin(), chain.vertices.end());
  return chain;
}

void ReachGrid::write_csv(std::ostream& os, int stride) const {
  for (int i = 0; i < geom.dim; ++i) os << (i ? ",x" : "x") << i;
  os << "\n";
  for (std::int64_t i = 0; i < geom.total; i += stride) {
    if (!reached[i]) continue;
    const Vec p = geom.point(geom.unindex(i));
    for (int a = 0; a < geom.dim; ++a) os << (a ? "," : "") << p[a];
    os << "\n";
  }
}

ReachGrid forward_reach(const MetricField& m, const Vec& x, const VecI& window_lo,
                        const VecI& window_hi, int resolution, const ReachOptions& options) {
  if (resolution < 16) throw InvalidInput("forward_reach: resolution must be >= 16");
  ReachGrid r;
  r.geom = GridGeom::over_window(m, resolution, window_lo, window_hi);
  r.options = options;
  const VecI sidx = r.geom.snap(x);
  if (!r.geom.inside(sidx))
    throw InvalidInput("forward_reach: window does not contain the source point");
  r.source = r.geom.point(sidx);
  r.reached.assign(static_cast<std::size_t>(r.geom.total), 0);
  if (options.record_parents) r.parent.assign(static_cast<std::size_t>(r.geom.total), -1);

  auto offsets = step_offsets(r.geom.dim, options.step_cells);
  std::sort(offsets.begin(), offsets.end(),
            [](const VecI& a, const VecI& b) { return offset_extent(a) < offset_extent(b); });
  std::vector<int> extents;
  std::vector<Vec> deltas;
  {
    std::vector<Vec> all_deltas(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      Vec d(r.geom.dim);
      for (int a = 0; a < r.geom.dim; ++a) d[a] = offsets[i][a] * r.geom.cell[a];
      all_deltas[i] = d;
    }
    std::vector<VecI> kept;
    for (std::size_t i : plausible_offsets(m, all_deltas, options.causal_tol)) {
      kept.push_back(offsets[i]);
      deltas.push_back(all_deltas[i]);
      extents.push_back(offset_extent(offsets[i]));
    }
    offsets = std::move(kept);
  }

  std::vector<std::int64_t> queue;
  queue.reserve(1024);
  const std::int64_t s = r.geom.index(sidx);
  r.reached[s] = 1;
  queue.push_back(s);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::int64_t pi = queue[qi];
    const VecI idx = r.geom.unindex(pi);
    const Vec p = r.geom.point(idx);
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
      const VecI jdx = idx + offsets[oi];
      if (!r.geom.inside(jdx)) continue;
      const std::int64_t ji = r.geom.index(jdx);
      if (r.reached[ji]) continue;
      if (!step_reachable(m, p, deltas[oi], extents[oi], options.causal_tol,
                          options.samples_per_cell, options.strict_causality))
        continue;
      r.reached[ji] = 1;
      if (options.record_parents) r.parent[ji] = pi;
      queue.push_back(ji);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// quotient graph of strictly timelike steps

namespace {

struct QuotientGraph {
  int dim = 0;
  int res = 0;
  std::int64_t nnodes = 0;
  Vec cell;
  std::vector<std::int64_t> head;  // CSR offsets, size nnodes+1
  std::vector<std::int32_t> to;
  std::vector<std::int8_t> wrap;     // dim entries per edge
  std::vector<float> weight;         // g_R length per edge (optional)

  VecI unindex(std::int64_t flat) const {
    VecI idx(dim);
    for (int i = dim - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(flat % res);
      flat /= res;
    }
    return idx;
  }
  std::int64_t index(const VecI& idx) const {
    std::int64_t r = 0;
    for (int i = 0; i < dim; ++i) r = r * res + idx[i];
    return r;
  }
  Vec point(const VecI& idx) const {
    Vec p(dim);
    for (int i = 0; i < dim; ++i) p[i] = idx[i] * cell[i];
    return p;
  }
};

QuotientGraph build_quotient_graph(const MetricField& m, int resolution, int step_cells,
                                   double eps_t, int samples_per_cell, bool with_weights) {
  QuotientGraph g;
  g.dim = m.dim();
  g.res = resolution;
  g.cell = Vec(m.lattice() / resolution);
  g.nnodes = 1;
  for (int i = 0; i < g.dim; ++i) g.nnodes *= resolution;

  auto offsets = step_offsets(g.dim, step_cells);
  std::vector<int> extents;
  std::vector<Vec> deltas;
  {
    std::vector<Vec> all_deltas(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      Vec d(g.dim);
      for (int a = 0; a < g.dim; ++a) d[a] = offsets[i][a] * g.cell[a];
      all_deltas[i] = d;
    }
    std::vector<VecI> kept;
    for (std::size_t i : plausible_offsets(m, all_deltas, -eps_t)) {
      kept.push_back(offsets[i]);
      deltas.push_back(all_deltas[i]);
      extents.push_back(offset_extent(offsets[i]));
    }
    offsets = std::move(kept);
  }

  g.head.assign(g.nnodes + 1, 0);
  std::vector<std::int32_t> to;
  std::vector<std::int8_t> wrap;
  std::vector<float> weight;
  for (std::int64_t ni = 0; ni < g.nnodes; ++ni) {
    const VecI idx = g.unindex(ni);
    const Vec p = g.point(idx);
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
      if (!step_timelike_margin(m, p, deltas[oi], extents[oi], eps_t, samples_per_cell))
        continue;
      VecI jdx = idx + offsets[oi];
      VecI w(g.dim);
      for (int a = 0; a < g.dim; ++a) {
        w[a] = static_cast<int>(std::floor(static_cast<double>(jdx[a]) / resolution));
        jdx[a] -= w[a] * resolution;
      }
      to.push_back(static_cast<std::int32_t>(g.index(jdx)));
      for (int a = 0; a < g.dim; ++a) wrap.push_back(static_cast<std::int8_t>(w[a]));
      if (with_weights) {
        const Vec mid = p + 0.5 * deltas[oi];
        weight.push_back(static_cast<float>(std::sqrt(m.qr(mid, deltas[oi]))));
      }
    }
    g.head[ni + 1] = static_cast<std::int64_t>(to.size());
  }
  g.to = std::move(to);
  g.wrap = std::move(wrap);
  g.weight = std::move(weight);
  return g;
}

VecI edge_wrap(const QuotientGraph& g, std::int64_t e) {
  VecI w(g.dim);
  for (int a = 0; a < g.dim; ++a) w[a] = g.wrap[e * g.dim + a];
  return w;
}

struct SccResult {
  std::vector<std::int32_t> comp;
  std::vector<std::int64_t> comp_size;
};

// iterative Tarjan
SccResult strongly_connected_components(const QuotientGraph& g) {
  const std::int64_t n = g.nnodes;
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<std::int64_t> low(n, 0), num(n, -1), stack;
  std::vector<std::uint8_t> on_stack(n, 0);
  std::int64_t counter = 0;
  struct Frame {
    std::int64_t v;
    std::int64_t edge;
  };
  std::vector<Frame> call;
  for (std::int64_t root = 0; root < n; ++root) {
    if (num[root] >= 0) continue;
    call.push_back({root, g.head[root]});
    num[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < g.head[f.v + 1]) {
        const std::int64_t e = f.edge++;
        const std::int64_t w = g.to[e];
        if (num[w] < 0) {
          num[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.head[w]});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], num[w]);
        }
      } else {
        const std::int64_t v = f.v;
        call.pop_back();
        if (low[v] == num[v]) {
          const std::int32_t cid = static_cast<std::int32_t>(res.comp_size.size());
          std::int64_t size = 0;
          while (true) {
            const std::int64_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.comp[w] = cid;
            ++size;
            if (w == v) break;
          }
          res.comp_size.push_back(size);
        }
        if (!call.empty()) {
          low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
      }
    }
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// viciousness

ViciousnessReport is_vicious(const MetricField& m, int resolution, const ViciousOptions& opt) {
  if (resolution < 8) throw InvalidInput("is_vicious: resolution must be >= 8");
  const QuotientGraph g =
      build_quotient_graph(m, resolution, opt.step_cells, opt.eps_t, opt.samples_per_cell, false);
  const SccResult scc = strongly_connected_components(g);

  ViciousnessReport rep;
  rep.resolution = resolution;
  rep.on_loop.assign(g.nnodes, 0);
  rep.witness_class.assign(g.nnodes, VecI::Zero(g.dim));
  rep.vicious = true;
  for (std::int64_t i = 0; i < g.nnodes; ++i) {
    rep.on_loop[i] = scc.comp_size[scc.comp[i]] >= 2 ? 1 : 0;
    if (!rep.on_loop[i]) {
      rep.vicious = false;
      if (static_cast<int>(rep.failing_points.size()) < opt.max_failing_points)
        rep.failing_points.push_back(g.point(g.unindex(i)));
    }
  }

  // reverse adjacency for backward walks
  std::vector<std::int64_t> rhead(g.nnodes + 1, 0);
  for (std::size_t e = 0; e < g.to.size(); ++e) rhead[g.to[e] + 1]++;
  for (std::int64_t i = 0; i < g.nnodes; ++i) rhead[i + 1] += rhead[i];
  std::vector<std::int64_t> redge(g.to.size());
  std::vector<std::int32_t> rfrom(g.to.size());
  {
    std::vector<std::int64_t> fill = rhead;
    for (std::int64_t v = 0; v < g.nnodes; ++v)
      for (std::int64_t e = g.head[v]; e < g.head[v + 1]; ++e) {
        const std::int64_t slot = fill[g.to[e]]++;
        redge[slot] = e;
        rfrom[slot] = static_cast<std::int32_t>(v);
      }
  }

  std::vector<VecI> fwd(g.nnodes, VecI::Zero(g.dim)), bwd(g.nnodes, VecI::Zero(g.dim));
  std::vector<std::int32_t> seen(g.nnodes, -1);
  std::vector<std::int64_t> fwd_parent_edge(g.nnodes, -1);
  std::vector<std::int32_t> done_comp(scc.comp_size.size(), 0);
  int chains = 0;

  for (std::int64_t base = 0; base < g.nnodes; ++base) {
    const std::int32_t c = scc.comp[base];
    if (scc.comp_size[c] < 2 || done_comp[c]) continue;
    done_comp[c] = 1;
    // forward BFS within the component
    std::vector<std::int64_t> order;
    order.push_back(base);
    seen[base] = c;
    fwd[base].setZero();
    fwd_parent_edge[base] = -1;
    for (std::size_t qi = 0; qi < order.size(); ++qi) {
      const std::int64_t v = order[qi];
      for (std::int64_t e = g.head[v]; e < g.head[v + 1]; ++e) {
        const std::int64_t w = g.to[e];
        if (scc.comp[w] != c || seen[w] == c) continue;
        seen[w] = c;
        fwd[w] = fwd[v] + edge_wrap(g, e);
        fwd_parent_edge[w] = e;
        order.push_back(w);
      }
    }
    // backward BFS within the component (accumulates path-to-base wraps)
    std::vector<std::int64_t> border;
    border.push_back(base);
    bwd[base].setZero();
    std::vector<std::int32_t> bmark(g.nnodes, -1);
    bmark[base] = c;
    for (std::size_t qi = 0; qi < border.size(); ++qi) {
      const std::int64_t w = border[qi];
      for (std::int64_t s = rhead[w]; s < rhead[w + 1]; ++s) {
        const std::int64_t u = rfrom[s];
        if (scc.comp[u] != c || bmark[u] == c) continue;
        bmark[u] = c;
        bwd[u] = edge_wrap(g, redge[s]) + bwd[w];
        border.push_back(u);
      }
    }
    // a loop class through the base: close any in-component edge into base
    VecI base_loop = VecI::Zero(g.dim);
    std::int64_t closing_from = -1, closing_edge = -1;
    for (std::int64_t s = rhead[base]; s < rhead[base + 1]; ++s) {
      const std::int64_t u = rfrom[s];
      if (scc.comp[u] == c && seen[u] == c) {
        base_loop = fwd[u] + edge_wrap(g, redge[s]);
        closing_from = u;
        closing_edge = redge[s];
        break;
      }
    }
    for (const std::int64_t v : order) {
      VecI k = fwd[v] + bwd[v];
      if (k.cwiseAbs().maxCoeff() == 0) k += base_loop;
      rep.witness_class[v] = k;
    }
    // record one witness chain per component (base -> ... -> base + k)
    if (chains < opt.max_witness_chains && closing_from >= 0) {
      // walk forward-parent edges from closing_from back to base; the source
      // of edge e is recovered from the CSR offsets by binary search
      std::vector<std::int64_t> rev_edges;
      std::int64_t v = closing_from;
      bool complete = true;
      while (v != base) {
        const std::int64_t e = fwd_parent_edge[v];
        if (e < 0) {
          complete = false;
          break;
        }
        rev_edges.push_back(e);
        std::int64_t lo = 0, hi = g.nnodes;
        while (hi - lo > 1) {
          const std::int64_t mid = (lo + hi) / 2;
          (g.head[mid] <= e ? lo : hi) = mid;
        }
        v = lo;
      }
      if (complete) {
        std::reverse(rev_edges.begin(), rev_edges.end());
        PolygonalWorldline chain;
        Vec at = g.point(g.unindex(base));
        chain.vertices.push_back(at);
        std::int64_t cur = base;
        auto append_edge = [&](std::int64_t e) {
          const VecI fidx = g.unindex(cur);
          const VecI tidx = g.unindex(g.to[e]);
          const VecI w = edge_wrap(g, e);
          Vec step(g.dim);
          for (int a = 0; a < g.dim; ++a)
            step[a] = (tidx[a] + w[a] * g.res - fidx[a]) * g.cell[a];
          at = at + step;
          chain.vertices.push_back(at);
          cur = g.to[e];
        };
        for (const std::int64_t e : rev_edges) append_edge(e);
        if (closing_edge >= 0) append_edge(closing_edge);
        if (chain.vertices.size() >= 2) {
          rep.witness_chains.push_back(std::move(chain));
          ++chains;
        }
      }
    }
  }
  return rep;
}

nlohmann::json ViciousnessReport::to_json() const {
  nlohmann::json j;
  j["vicious"] = vicious;
  j["resolution"] = resolution;
  j["nodes"] = on_loop.size();
  std::size_t on = 0;
  for (auto b : on_loop) on += b;
  j["nodes_on_loops"] = on;
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& p : failing_points) fails.push_back(lab::to_json(p));
  j["failing_points"] = fails;
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& c : witness_chains) {
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& v : c.vertices) ch.push_back(lab::to_json(v));
    chains.push_back(ch);
  }
  j["witness_chains"] = chains;
  return j;
}

// ---------------------------------------------------------------------------
// fill constant

double fill_constant(const MetricField& m, int resolution, const FillOptions& opt) {
  const QuotientGraph g =
      build_quotient_graph(m, resolution, opt.step_cells, opt.eps_t, opt.samples_per_cell, true);
  const SccResult scc = strongly_connected_components(g);
  for (std::int64_t i = 0; i < g.nnodes; ++i)
    if (scc.comp_size[scc.comp[i]] < 2)
      throw Unavailable("fill_constant: spacetime is not vicious at this resolution");

  int per_axis = 1;
  while (std::pow(per_axis + 1, g.dim) <= opt.max_sources && per_axis < g.res) ++per_axis;
  const int stride = std::max(1, g.res / per_axis);

  double fil = 0.0;
  std::vector<double> dist(g.nnodes);
  using Item = std::pair<double, std::int64_t>;
  for (std::int64_t src = 0; src < g.nnodes; ++src) {
    const VecI idx = g.unindex(src);
    bool sampled = true;
    for (int a = 0; a < g.dim; ++a) sampled = sampled && (idx[a] % stride == 0);
    if (!sampled) continue;
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      for (std::int64_t e = g.head[v]; e < g.head[v + 1]; ++e) {
        const double nd = d + g.weight[e];
        if (nd < dist[g.to[e]]) {
          dist[g.to[e]] = nd;
          heap.push({nd, g.to[e]});
        }
      }
    }
    for (std::int64_t v = 0; v < g.nnodes; ++v) {
      if (v == src) continue;
      if (!std::isfinite(dist[v]))
        throw Unavailable("fill_constant: timelike step graph not strongly connected");
      fil = std::max(fil, dist[v]);
    }
  }
  return fil;
}

// ---------------------------------------------------------------------------
// frak f

std::int64_t FrakFTable::slot(const VecI& h) const {
  const int side = 2 * hmax_ + 1;
  std::int64_t r = 0;
  for (int i = 0; i < dim_; ++i) {
    if (std::abs(h[i]) > hmax_)
      throw WindowOverflow("frak_f: class outside the table window, need hmax >= " +
                           std::to_string(std::abs(h[i])));
    r = r * side + (h[i] + hmax_);
  }
  return r;
}

FrakFEntry FrakFTable::at(const VecI& h) const { return entries_[slot(h)]; }

FrakFTable build_frak_f_table(const MetricField& m, int resolution, const FrakFOptions& opt) {
  const int dim = m.dim();
  FrakFTable table;
  table.dim_ = dim;
  table.hmax_ = opt.hmax;
  table.resolution_ = resolution;
  table.cell_ = (m.lattice() / resolution).maxCoeff();
  const int side = 2 * opt.hmax + 1;
  std::int64_t slots = 1;
  for (int i = 0; i < dim; ++i) slots *= side;
  table.entries_.assign(slots, FrakFEntry{std::numeric_limits<double>::infinity(), Vec(), false});

  const int w = opt.hmax + opt.margin_copies;
  const VecI wlo = VecI::Constant(dim, -w);
  const VecI whi = VecI::Constant(dim, w + 1);
  ReachOptions ropt = opt.reach;
  ropt.record_parents = false;

  const int stride = opt.source_stride > 0 ? opt.source_stride : std::max(1, resolution / 4);
  std::int64_t fd_nodes = 1;
  for (int i = 0; i < dim; ++i) fd_nodes *= resolution;

  for (std::int64_t s = 0; s < fd_nodes; ++s) {
    VecI idx(dim);
    std::int64_t r = s;
    bool sampled = true;
    for (int i = dim - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(r % resolution);
      sampled = sampled && (idx[i] % stride == 0);
      r /= resolution;
    }
    if (!sampled) continue;
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = idx[i] * m.lattice()[i] / resolution;

    const ReachGrid reach = forward_reach(m, x, wlo, whi, resolution, ropt);
    const std::vector<double> dist =
        m.riemannian_is_identity()
            ? euclidean_distance_transform(reach.geom, reach.reached)
            : graph_distance_from_mask(m, reach.geom, reach.reached);

    // read off f_x(h) at every lattice class in the table
    VecI h(dim);
    for (std::int64_t t = 0; t < slots; ++t) {
      std::int64_t rr = t;
      for (int i = dim - 1; i >= 0; --i) {
        h[i] = static_cast<int>(rr % side) - opt.hmax;
        rr /= side;
      }
      Vec ph(dim);
      for (int i = 0; i < dim; ++i) ph[i] = x[i] + h[i] * m.lattice()[i];
      const VecI pidx = reach.geom.snap(ph);
      if (!reach.geom.inside(pidx)) continue;
      const double fx = dist[reach.geom.index(pidx)];
      FrakFEntry& entry = table.entries_[t];
      if (fx < entry.f_of_h) {
        entry.f_of_h = fx;
        entry.minimizing_x = x;
        // a closer witness could hide beyond the window edge
        double edge = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dim; ++i) {
          edge = std::min(edge, ph[i] - reach.geom.lo[i] * reach.geom.cell[i]);
          edge = std::min(edge, reach.geom.hi[i] * reach.geom.cell[i] - ph[i]);
        }
        entry.boundary_active = edge <= fx + 2.0 * table.cell_;
      }
    }
  }
  for (auto& e : table.entries_) {
    if (!std::isfinite(e.f_of_h))
      throw WindowOverflow("frak_f: table window too small; increase margin_copies");
  }
  return table;
}

FrakFEntry frak_f(const MetricField& m, const VecI& h, int resolution) {
  FrakFOptions opt;
  opt.hmax = std::max(1, h.cwiseAbs().maxCoeff());
  const auto table = build_frak_f_table(m, resolution, opt);
  FrakFEntry e = table.at(h);
  if (e.boundary_active) {
    opt.margin_copies *= 2;
    return build_frak_f_table(m, resolution, opt).at(h);
  }
  return e;
}

}  // namespace lab
