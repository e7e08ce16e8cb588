#pragma once

// Regular grids over windows of fundamental-domain copies, shared by the
// reachability and stable-norm machinery: indexing, integer step stencils,
// exact euclidean distance transforms and multi-source Dijkstra with g_R
// edge weights.

#include "lab/geometry.hpp"
#include "lab/spacetime.hpp"

#include <cstdint>
#include <vector>

namespace lab {

struct GridGeom {
  int dim = 0;
  Vec cell;       // physical cell size per axis
  VecI lo, hi;    // inclusive node index range
  VecI n;         // node counts per axis
  std::int64_t total = 0;

  // window given in fundamental-domain copies: [lo_copies, hi_copies] per axis
  static GridGeom over_window(const MetricField& m, int resolution, const VecI& lo_copies,
                              const VecI& hi_copies);

  std::int64_t index(const VecI& idx) const {
    std::int64_t r = 0;
    for (int i = 0; i < dim; ++i) r = r * n[i] + (idx[i] - lo[i]);
    return r;
  }
  VecI unindex(std::int64_t flat) const {
    VecI idx(dim);
    for (int i = dim - 1; i >= 0; --i) {
      idx[i] = lo[i] + static_cast<int>(flat % n[i]);
      flat /= n[i];
    }
    return idx;
  }
  Vec point(const VecI& idx) const {
    Vec p(dim);
    for (int i = 0; i < dim; ++i) p[i] = idx[i] * cell[i];
    return p;
  }
  bool inside(const VecI& idx) const {
    for (int i = 0; i < dim; ++i)
      if (idx[i] < lo[i] || idx[i] > hi[i]) return false;
    return true;
  }
  VecI snap(const Vec& p) const {
    VecI idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = static_cast<int>(std::llround(p[i] / cell[i]));
    return idx;
  }
};

// All nonzero integer offsets with max-norm <= radius.
std::vector<VecI> box_offsets(int dim, int radius);
// Offsets reduced to coprime direction representatives (stencil metrics).
std::vector<VecI> reduced_offsets(int dim, int radius);

// Exact euclidean distance (not squared) from every node to the nearest
// mask!=0 node, with per-axis spacing; unreachable stays +inf.
std::vector<double> euclidean_distance_transform(const GridGeom& g,
                                                 const std::vector<std::uint8_t>& mask);

// Multi-source Dijkstra over the lattice graph with g_R step weights;
// sources are the mask!=0 nodes. Documented lower-accuracy path for
// non-identity g_R (stencil metrication error).
std::vector<double> graph_distance_from_mask(const MetricField& m, const GridGeom& g,
                                             const std::vector<std::uint8_t>& mask,
                                             int stencil_radius = 3);

// Single-source Dijkstra restricted to nodes where corridor!=0 (empty
// corridor means the whole grid).
std::vector<double> graph_distance_from_node(const MetricField& m, const GridGeom& g,
                                             std::int64_t source,
                                             const std::vector<std::uint8_t>& corridor,
                                             int stencil_radius = 3);

}  // namespace lab
