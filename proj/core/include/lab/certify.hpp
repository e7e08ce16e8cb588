#pragma once

// Class A certification: viciousness, zero-exclusion of the stable cone,
// transversal-form search, temporal-function constants, SCTP level-set
// checks and the coarse-Lipschitz harness for the time separation.
// Negative verdicts are never claimed from numerics alone; they require the
// preset's declared ground truth.

#include "lab/stable.hpp"
#include "lab/timesep.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

namespace lab {

struct TransversalForm {
  Vec alpha;
  double margin = 0.0;  // min over sampled points and causal rays of alpha.v
};

struct TemporalCheck {
  double c = 0.0;                // min alpha.v over unit future causal samples
  double cor110_constant = 0.0;  // sup_x |alpha|* / c
  Vec witness_point;             // location of the minimizing sample
  Vec witness_ray;
  int chains_checked = 0;
  bool chains_ok = false;  // L^gR(chain) <= cor110 * dist(endpoints) + slack
};

struct ViciousnessSummary {
  bool vicious = false;
  int resolution = 0;
  std::int64_t failing = 0;
  std::vector<Vec> failing_points;
};

struct Certificate {
  enum class Verdict { class_a, not_class_a, inconclusive };

  ViciousnessSummary vicious;
  struct ZeroExcluded {
    bool excluded = false;
    double margin = 0.0;
    Vec witness;
  } zero_excluded;
  std::optional<TransversalForm> transversal;
  std::optional<TemporalCheck> temporal;
  StableConeEstimate cone_estimate;
  Verdict verdict = Verdict::inconclusive;
  std::string reason;

  nlohmann::json to_json() const;
};

struct CertifyBudget {
  int vicious_resolution = 0;  // 0 -> 48 in 2D, 24 in 3D
  SamplingBudget cone;
  int grid_per_axis = 0;   // transversal sampling grid; 0 -> 16 (2D), 14 (3D)
  int rays_per_point = 0;  // 0 -> 16 (2D), 32 (3D)
  double margin = 1e-3;    // transversal acceptance margin
  int p01a_samples = 64;
  std::uint64_t seed = 0;
};

Certificate certify_class_a(const MetricField& m, const CertifyBudget& budget = {});

// Constant-coefficient candidates from the interior of the dual cone,
// deepest first; accepted iff alpha.v >= margin |v| on every sampled future
// causal direction at every grid point.
std::optional<TransversalForm> find_transversal_form(const MetricField& m,
                                                     const StableConeEstimate& est,
                                                     const CertifyBudget& budget = {});

// Non-throwing variant: always returns the achieved constants and witness.
TemporalCheck temporal_function_probe(const MetricField& m, const Vec& alpha,
                                      const CertifyBudget& budget = {});

// Throws RejectedForm when the temporal constant c is not positive.
TemporalCheck temporal_function_check(const MetricField& m, const Vec& alpha,
                                      const CertifyBudget& budget = {});

struct SctpOptions {
  int resolution = 32;
  double eps_t = 0.02;  // chronology margin for the level-set checks
  int fiber_samples = 12;
  int max_n0 = 4;
};

struct SctpReport {
  Vec alpha;             // rescaled so the minimal positive lattice pairing is 1
  VecI translation;      // lattice class k with alpha.k = 1
  bool level_sets_graphs = false;  // each level set is a section over the fiber
  bool chronology = false;         // Sigma_n subset I^-(Sigma_{n+1})
  int minimal_n0 = -1;             // smallest n with psi_n(p) in I^+(p), -1 if none
  bool passed() const { return level_sets_graphs && chronology && minimal_n0 >= 1; }

  nlohmann::json to_json() const;
};

// Def DSCTP at the data level for the temporal function tau(x) = alpha.x;
// requires rational lattice pairings.
SctpReport sctp_check(const MetricField& m, const Vec& alpha, const SctpOptions& options = {});

struct LipschitzOptions {
  int segments = 8;  // fixed d budget so ratios compare like with like
  int restarts = 8;
  int max_sweeps = 60;
  double norm_lo = 1.0;  // stable-norm range of sampled displacements
  double norm_hi = 4.0;
  double base_window = 2.0;  // base points sampled in [0, base_window * L)
  double noise_bound = 0.02;  // declared relative optimizer noise on flat
};

struct LipschitzReport {
  double eps = 0.0;
  int samples = 0;
  double max_ratio = 0.0;
  std::vector<double> ratios;
  std::vector<double> hist_edges;
  std::vector<int> hist_counts;
  double noise_bound = 0.0;

  nlohmann::json to_json() const;
};

LipschitzReport coarse_lipschitz(const MetricField& m, const StableConeEstimate& est, double eps,
                                 int samples, std::uint64_t seed,
                                 const LipschitzOptions& options = {});

// Re-certification after a smooth periodic C^0 perturbation of the metric.
Certificate perturbation_smoke_test(const PresetSpec& base, double amplitude,
                                    const CertifyBudget& budget = {});

}  // namespace lab
