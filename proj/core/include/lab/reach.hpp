#pragma once

// Grid-based causal reachability in the cover. forward_reach is an inner
// approximation of J^+(x): a grid point is marked only when a whole straight
// step to it classifies future causal, so "reached" is trustworthy while
// "not reached" means not found at this resolution. Viciousness is decided
// by cycle detection on the strictly-timelike step graph of the quotient.

#include "lab/curves.hpp"
#include "lab/grid.hpp"

#include <nlohmann/json_fwd.hpp>
#include <iosfwd>
#include <vector>

namespace lab {

struct ReachOptions {
  int step_cells = 4;        // max-norm radius of grid steps, in cells
  double causal_tol = 1e-9;  // null classification tolerance
  int samples_per_cell = 1;  // causal samples per cell of step extent
  // strict: every sample along a step must classify future causal (pure inner
  // approximation). Otherwise the trapezoid-averaged quadratic form decides,
  // which removes the inward bias on variable metrics at <= 1 cell slack.
  bool strict_causality = false;
  bool record_parents = true;
};

class ReachGrid {
 public:
  GridGeom geom;
  Vec source;  // snapped source point
  ReachOptions options;
  std::vector<std::uint8_t> reached;
  std::vector<std::int32_t> parent;  // predecessor flat index, -1 at the source

  bool reached_point(const Vec& p) const;
  std::int64_t reached_count() const;
  // recorded chain of future causal steps from the source to q's grid node
  PolygonalWorldline chain_to(const Vec& q) const;
  void write_csv(std::ostream& os, int stride = 1) const;
};

ReachGrid forward_reach(const MetricField& m, const Vec& x, const VecI& window_lo,
                        const VecI& window_hi, int resolution,
                        const ReachOptions& options = {});

struct ViciousOptions {
  int step_cells = 2;
  double eps_t = 0.05;       // strict timelike margin: g(v,v) <= -eps_t*g_R(v,v)
  int samples_per_cell = 2;
  int max_witness_chains = 4;
  int max_failing_points = 64;
};

struct ViciousnessReport {
  bool vicious = false;  // false means "no loop found at this resolution"
  int resolution = 0;
  std::vector<std::uint8_t> on_loop;  // per fundamental-domain grid node
  std::vector<VecI> witness_class;    // homology class of a loop through the node
  std::vector<Vec> failing_points;
  std::vector<PolygonalWorldline> witness_chains;
  nlohmann::json to_json() const;
};

ViciousnessReport is_vicious(const MetricField& m, int resolution,
                             const ViciousOptions& options = {});

struct FillOptions {
  int step_cells = 3;
  double eps_t = 0.05;
  int samples_per_cell = 2;
  int max_sources = 256;  // sources are subsampled beyond this budget
};

// Grid estimate of fil(g, g_R): the largest over fundamental-domain pairs
// (p,q) of the shortest recorded timelike chain from p to some lift of q.
// Throws Unavailable when viciousness fails at this resolution.
double fill_constant(const MetricField& m, int resolution, const FillOptions& options = {});

struct FrakFOptions {
  int hmax = 8;           // table covers |h|_inf <= hmax
  int margin_copies = 2;  // window margin beyond hmax, in lattice copies
  int source_stride = 0;  // 0 -> resolution/4
  ReachOptions reach;
};

struct FrakFEntry {
  double f_of_h = 0.0;
  Vec minimizing_x;
  bool boundary_active = false;  // window edge may hide a closer point
};

// Precomputed f(h) = min_x dist(x+h, J^+(x)) over all lattice classes with
// |h|_inf <= hmax; one reach sweep per sampled source serves every h.
class FrakFTable {
 public:
  FrakFEntry at(const VecI& h) const;  // throws WindowOverflow beyond hmax
  int hmax() const { return hmax_; }
  int resolution() const { return resolution_; }
  double cell() const { return cell_; }
  int dim() const { return dim_; }

 private:
  friend FrakFTable build_frak_f_table(const MetricField&, int, const FrakFOptions&);
  std::int64_t slot(const VecI& h) const;
  int dim_ = 0, hmax_ = 0, resolution_ = 0;
  double cell_ = 0.0;
  std::vector<FrakFEntry> entries_;
};

FrakFTable build_frak_f_table(const MetricField& m, int resolution,
                              const FrakFOptions& options = {});

// Single-class convenience: builds a window sized for h (doubling the margin
// once if the minimization touches the window boundary).
FrakFEntry frak_f(const MetricField& m, const VecI& h, int resolution);

}  // namespace lab
