#include "lab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace lab {

GridGeom GridGeom::over_window(const MetricField& m, int resolution, const VecI& lo_copies,
                               const VecI& hi_copies) {
  if (resolution < 1) throw InvalidInput("grid: resolution must be positive");
  GridGeom g;
  g.dim = m.dim();
  g.cell = Vec(m.lattice() / resolution);
  g.lo = VecI(g.dim);
  g.hi = VecI(g.dim);
  g.n = VecI(g.dim);
  g.total = 1;
  for (int i = 0; i < g.dim; ++i) {
    g.lo[i] = lo_copies[i] * resolution;
    g.hi[i] = hi_copies[i] * resolution;
    if (g.hi[i] <= g.lo[i]) throw InvalidInput("grid: empty window");
    g.n[i] = g.hi[i] - g.lo[i] + 1;
    g.total *= g.n[i];
  }
  return g;
}

std::vector<VecI> box_offsets(int dim, int radius) {
  std::vector<VecI> out;
  const int w = 2 * radius + 1;
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= w;
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t r = t;
    VecI o(dim);
    bool zero = true;
    for (int i = 0; i < dim; ++i) {
      o[i] = static_cast<int>(r % w) - radius;
      if (o[i] != 0) zero = false;
      r /= w;
    }
    if (!zero) out.push_back(o);
  }
  return out;
}

std::vector<VecI> reduced_offsets(int dim, int radius) {
  std::vector<VecI> out;
  for (const auto& o : box_offsets(dim, radius)) {
    int g = 0;
    for (int i = 0; i < dim; ++i) g = std::gcd(g, std::abs(o[i]));
    if (g == 1) out.push_back(o);
  }
  return out;
}

namespace {

// Felzenszwalb 1D squared-distance transform along positions x[i].
void dt_1d(const std::vector<double>& x, std::vector<double>& f, std::vector<double>& d,
           std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto sq = [](double a) { return a * a; };
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + sq(x[q])) - (f[p] + sq(x[p]))) / (2.0 * x[q] - 2.0 * x[p]);
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < x[q]) ++k;
    d[q] = sq(x[q] - x[v[k]]) + f[v[k]];
  }
}

}  // namespace

std::vector<double> euclidean_distance_transform(const GridGeom& g,
                                                 const std::vector<std::uint8_t>& mask) {
  const double big = 1e100;
  std::vector<double> dist(static_cast<std::size_t>(g.total));
  for (std::int64_t i = 0; i < g.total; ++i) dist[i] = mask[i] ? 0.0 : big;

  // strides for row-major indexing as in GridGeom::index
  std::vector<std::int64_t> stride(g.dim, 1);
  for (int i = g.dim - 2; i >= 0; --i) stride[i] = stride[i + 1] * g.n[i + 1];

  for (int axis = 0; axis < g.dim; ++axis) {
    const int len = g.n[axis];
    std::vector<double> x(len), f(len), d(len), z(len + 1);
    std::vector<int> v(len);
    for (int i = 0; i < len; ++i) x[i] = i * g.cell[axis];
    const std::int64_t lines = g.total / len;
    for (std::int64_t line = 0; line < lines; ++line) {
      // base index of this line: distribute `line` over the other axes
      std::int64_t base = 0, rem = line;
      for (int i = g.dim - 1; i >= 0; --i) {
        if (i == axis) continue;
        const std::int64_t c = rem % g.n[i];
        rem /= g.n[i];
        base += c * stride[i];
      }
      for (int i = 0; i < len; ++i) f[i] = dist[base + i * stride[axis]];
      dt_1d(x, f, d, v, z);
      for (int i = 0; i < len; ++i) dist[base + i * stride[axis]] = d[i];
    }
  }
  for (auto& e : dist) e = e >= big ? std::numeric_limits<double>::infinity() : std::sqrt(e);
  return dist;
}

namespace {

std::vector<double> dijkstra(const MetricField& m, const GridGeom& g,
                             const std::vector<std::pair<std::int64_t, double>>& seeds,
                             const std::vector<std::uint8_t>& corridor, int stencil_radius) {
  const auto offsets = reduced_offsets(g.dim, stencil_radius);
  std::vector<double> dist(static_cast<std::size_t>(g.total),
                           std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (const auto& [i, d0] : seeds) {
    if (d0 < dist[i]) {
      dist[i] = d0;
      heap.push({d0, i});
    }
  }
  const bool use_corridor = !corridor.empty();
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    const VecI idx = g.unindex(i);
    const Vec p = g.point(idx);
    for (const auto& o : offsets) {
      const VecI jdx = idx + o;
      if (!g.inside(jdx)) continue;
      const std::int64_t j = g.index(jdx);
      if (use_corridor && !corridor[j]) continue;
      Vec step(g.dim);
      for (int a = 0; a < g.dim; ++a) step[a] = o[a] * g.cell[a];
      const Vec mid = p + 0.5 * step;
      const double w = std::sqrt(m.qr(mid, step));
      const double nd = d + w;
      if (nd < dist[j]) {
        dist[j] = nd;
        heap.push({nd, j});
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> graph_distance_from_mask(const MetricField& m, const GridGeom& g,
                                             const std::vector<std::uint8_t>& mask,
                                             int stencil_radius) {
  std::vector<std::pair<std::int64_t, double>> seeds;
  for (std::int64_t i = 0; i < g.total; ++i)
    if (mask[i]) seeds.push_back({i, 0.0});
  return dijkstra(m, g, seeds, {}, stencil_radius);
}

std::vector<double> graph_distance_from_node(const MetricField& m, const GridGeom& g,
                                             std::int64_t source,
                                             const std::vector<std::uint8_t>& corridor,
                                             int stencil_radius) {
  return dijkstra(m, g, {{source, 0.0}}, corridor, stencil_radius);
}

}  // namespace lab
