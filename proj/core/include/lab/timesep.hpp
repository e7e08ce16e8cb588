#pragma once

// Time separation d(p,q) on the Abelian cover by direct maximization of the
// Lorentzian length over causal polygonal paths. All reported values are
// certified lower bounds; the refinement trace makes convergence visible.

#include "lab/curves.hpp"
#include "lab/reach.hpp"

#include <optional>
#include <vector>

namespace lab {

struct TimeSepOptions {
  int subdiv = 8;            // quadrature points per leg at the final stage
  int max_sweeps = 160;      // coordinate-ascent sweeps per stage
  double rel_tol = 1e-7;     // sweep improvement stop threshold
  double causal_tol = 1e-9;
  int zero_check_resolution = 24;  // reach grid for the "no causal path" test
  int zero_check_step_cells = 5;
};

struct MaxPathResult {
  double value = 0.0;
  PolygonalWorldline path;  // empty when no causal connection was found
  int restarts_used = 0;
  bool converged = false;
  int projection_events = 0;  // ascent steps pulled back onto the cone
  std::vector<std::pair<int, double>> refinement_trace;  // (legs, best value)
};

// Maximizes over `segments`-leg paths from p to q with every leg future
// causal. Progressive refinement doubles the leg count stage by stage, so
// enlarging `segments` or `restarts` never decreases the value (best kept,
// restart seeds shared). Returns value 0 with converged=true when the reach
// check finds no causal connection inside its window.
MaxPathResult time_separation(const MetricField& m, const Vec& p, const Vec& q,
                              int segments = 8, int restarts = 16, std::uint64_t seed = 0,
                              const TimeSepOptions& options = {});

struct OracleOptions {
  int step_cells = 6;
  int subdiv = 2;  // quadrature per grid step
  double causal_tol = 1e-9;
};

// Independent check: dynamic program over the reach grid, processing nodes
// along the preset time axis; a lower bound converging from below.
double time_separation_oracle(const MetricField& m, const Vec& p, const Vec& q, int resolution,
                              const OracleOptions& options = {});

// Smallest timecone margin over the legs of a path (the delta of the
// maximizer-confinement check).
double min_leg_margin(const MetricField& m, const PolygonalWorldline& path);

}  // namespace lab
