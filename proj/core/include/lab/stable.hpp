#pragma once

// Stable norm and stable time cone estimation. The norm backend is a
// lattice-graph shortest path on the cover (deterministic, independent of the
// curve optimizer); the cone estimate fuses geodesic shots, random causal
// walks and lattice classes with vanishing frak-f, with provenance counts so
// a degenerate sampler stays visible.

#include "lab/cones.hpp"
#include "lab/reach.hpp"

#include <nlohmann/json_fwd.hpp>
#include <vector>

namespace lab {

struct StableNormOptions {
  int resolution = 8;          // lattice-graph resolution (scale-free when g_R = id)
  int stencil_radius = 3;
  double corridor_margin = 2.0;  // tube half-width around the segment, in lattice units
};

struct StableNormResult {
  double norm = 0.0;
  std::vector<double> dists;  // dist(0, n h), n = 1..n_max
  std::vector<double> trace;  // dist(0, n h)/n
  double std_est = 0.0;       // max_n |dist - n*norm| plus the stencil calibration
};

StableNormResult stable_norm(const MetricField& m, const VecI& h, int n_max = 64,
                             const StableNormOptions& options = {});

// Worst-case stencil-vs-euclidean overshoot for the given radius (the
// metrication error folded into std_est).
double stencil_calibration(int dim, int stencil_radius);

class StableNormEstimate {
 public:
  std::vector<VecI> directions;
  std::vector<double> values;  // ||h|| estimates, aligned with directions
  std::vector<std::vector<double>> plateau_traces;
  double std_est = 0.0;
  int dim = 0;

  NormModel to_norm_model(int support_directions = 0) const;
  nlohmann::json to_json() const;
};

StableNormEstimate estimate_stable_norm(const MetricField& m, int dir_radius = 2, int n_max = 16,
                                        const StableNormOptions& options = {});

struct SamplingBudget {
  int geodesics = 512;
  double geodesic_length = 200.0;  // target g_R arclength
  double geodesic_dt = 0.02;
  int walks = 512;
  int walk_steps = 10000;
  double walk_step_len = 0.05;
  double l_min = 100.0;  // admissibility threshold for rotation vectors
  int frak_scan_hmax = 4;
  int frak_resolution = 32;
  int norm_dir_radius = 2;
  int norm_n_max = 16;
};

struct StableConeEstimate {
  PolyCone cone;                   // estimated stable time cone
  std::vector<Vec> cross_section;  // samples scaled to unit stable norm
  double err_est = -1.0;           // filled by check_p01a
  struct Provenance {
    int geodesic = 0;
    int walk = 0;
    int frak_zero = 0;
  } sources;
  StableNormEstimate norm;

  nlohmann::json to_json() const;
};

StableConeEstimate estimate_stable_cone(const MetricField& m, const SamplingBudget& budget = {},
                                        std::uint64_t seed = 0);

// dist in the stable norm from h to the estimated cone (0 inside).
double a_of_h(const StableConeEstimate& est, const NormModel& norm, const Vec& h);

struct P01aReport {
  double err_est = 0.0;
  std::vector<double> forward_samples;   // dist(z - x, T) for reached z
  std::vector<double> backward_samples;  // dist(h, J+(x) - x) for h in T
};

// Two-sided sampled check of the bounded-distance property between J^+(x)-x
// and the estimated cone, in the stable norm.
P01aReport check_p01a(const MetricField& m, const StableConeEstimate& est, int samples,
                      std::uint64_t seed, int resolution = 32, double h_norm_range = 2.5);

struct VectorFieldSpec {
  std::string kind = "orientation";  // orientation | constant
  Vec v;                             // for constant fields

  static VectorFieldSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Rotation vector of the g_R-arclength flow of a future timelike field,
// integrated for time T from x0; throws if the field fails the timelike check
// at any flow point.
Vec flow_rotation_vector(const MetricField& m, const VectorFieldSpec& field, const Vec& x0,
                         double T, double dt = 0.02);

}  // namespace lab
