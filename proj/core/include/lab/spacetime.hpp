#pragma once

// Periodic Lorentzian metric fields on R^n, n in {2,3}, viewed as the Abelian
// cover of the n-torus. Signature convention (-,+,...,+). Every preset closes
// over smooth periodic coefficient functions, so evaluation anywhere on the
// cover is exact.

#include "lab/geometry.hpp"

#include <nlohmann/json.hpp>
#include <memory>
#include <string>
#include <vector>

namespace lab {

struct PresetSpec {
  std::string name;  // flat | conformal_flat | product_circle | e1_counterexample
  nlohmann::json params = nlohmann::json::object();

  static PresetSpec make(const std::string& name,
                         const nlohmann::json& params = nlohmann::json::object());
  static PresetSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  double param(const std::string& key, double fallback) const;
};

class MetricModel;

class MetricField {
 public:
  int dim() const;
  // Diagonal lattice of deck transformations; entry i is the period along
  // axis i (1 for the standard torus, 7 for the E1 example).
  const Vec& lattice() const;
  Mat metric(const Vec& p) const;       // g(p)
  Vec orientation(const Vec& p) const;  // time orientation X(p), g(X,X) < 0
  Mat riemannian(const Vec& p) const;   // auxiliary g_R(p), positive definite

  double q(const Vec& p, const Vec& v) const;   // g_p(v,v)
  double qr(const Vec& p, const Vec& v) const;  // g_R,p(v,v)

  bool riemannian_is_identity() const;
  bool known_vicious() const;
  bool known_nonvicious() const;
  int time_axis() const;  // coordinate axis roughly aligned with the future

  Vec wrap(const Vec& p) const;  // representative in the fundamental domain
  const PresetSpec& spec() const { return spec_; }

  MetricField() = default;
  MetricField(PresetSpec spec, std::shared_ptr<const MetricModel> model);

 private:
  PresetSpec spec_;
  std::shared_ptr<const MetricModel> model_;
};

// Builds a preset field and verifies the type invariants (periodicity,
// signature and time orientation on sampled grids). Invalid parameters throw
// InvalidInput; a blend with broken signature throws ConstructionError naming
// the offending point.
MetricField make_preset(const PresetSpec& spec);

// Additive C^0 perturbation by a smooth periodic bump pattern; throws
// ConstructionError if the perturbed field loses Lorentzian signature.
MetricField perturb_metric(const MetricField& base, double amplitude);

enum class CausalKind { timelike, null_like, spacelike };
enum class CausalDirection { future, past, none };

struct CausalCharacter {
  CausalKind kind = CausalKind::spacelike;
  CausalDirection direction = CausalDirection::none;
  double q = 0.0;   // g(v,v)
  double qr = 0.0;  // g_R(v,v)
};

CausalCharacter causal_character(const MetricField& m, const Vec& p, const Vec& v,
                                 double tol = 1e-9);

inline bool is_future_causal(const CausalCharacter& c) {
  return c.kind != CausalKind::spacelike && c.direction == CausalDirection::future;
}

struct ConeRaySample {
  std::vector<Vec> boundary;  // null directions, unit g_R length
  std::vector<Vec> interior;  // strictly timelike samples, unit g_R length
  std::vector<Vec> all() const;
};

// Samples the future cone at p: a ring of null boundary directions found by
// bisection along great-circle arcs plus interior timelike fills.
ConeRaySample sample_cone_rays(const MetricField& m, const Vec& p, int boundary_count,
                               int interior_count);

// Spec operation: `count` future causal rays, boundary samples first.
std::vector<Vec> cone_rays(const MetricField& m, const Vec& p, int count);

// True iff v is future timelike with g_R-distance to the sampled null cone at
// p at least eps*|v|.
bool epsilon_timecone_member(const MetricField& m, const Vec& p, const Vec& v, double eps);

// g_R-distance from v to the sampled null cone at p, divided by |v|_{g_R};
// the margin epsilon_timecone_member compares against eps.
double timecone_margin(const MetricField& m, const Vec& p, const Vec& v);

}  // namespace lab
