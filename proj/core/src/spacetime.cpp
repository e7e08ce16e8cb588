#include "lab/spacetime.hpp"

#include "lab/json_io.hpp"

#include <cmath>
#include <sstream>

namespace lab {

namespace {

double qform(const Mat& g, const Vec& v) { return v.dot(g * v); }

bool lorentzian_signature(const Mat& g) {
  const int n = static_cast<int>(g.rows());
  if (n == 2) return g.determinant() < 0.0;
  if (g.determinant() >= 0.0) return false;
  // exclude the (-,-,-) branch: -g positive definite by Sylvester
  const Mat mg = -g;
  const bool neg_def = mg(0, 0) > 0.0 && mg.topLeftCorner(2, 2).determinant() > 0.0 &&
                       mg.determinant() > 0.0;
  return !neg_def;
}

std::string point_str(const Vec& p) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// metric models

class MetricModel {
 public:
  virtual ~MetricModel() = default;
  virtual int dim() const = 0;
  virtual const Vec& lattice() const = 0;
  virtual Mat metric(const Vec& p) const = 0;
  virtual Vec orientation(const Vec& p) const = 0;
  virtual Mat riemannian(const Vec& p) const { return Mat::Identity(dim(), dim()); }
  virtual bool riemannian_is_identity() const { return true; }
  virtual bool known_vicious() const { return false; }
  virtual bool known_nonvicious() const { return false; }
  virtual int time_axis() const { return 0; }
};

namespace {

class FlatModel : public MetricModel {
 public:
  FlatModel(int dim, double scale) : dim_(dim), lattice_(Vec::Constant(dim, scale)) {
    eta_ = Mat::Identity(dim, dim);
    eta_(0, 0) = -1.0;
    x_ = Vec::Zero(dim);
    x_[0] = 1.0;
  }
  int dim() const override { return dim_; }
  const Vec& lattice() const override { return lattice_; }
  Mat metric(const Vec&) const override { return eta_; }
  Vec orientation(const Vec&) const override { return x_; }
  bool known_vicious() const override { return true; }

 private:
  int dim_;
  Vec lattice_;
  Mat eta_;
  Vec x_;
};

class ConformalFlatModel : public MetricModel {
 public:
  ConformalFlatModel(double base, double amp, double gr_amp)
      : base_(base), amp_(amp), gr_amp_(gr_amp), lattice_(Vec::Constant(2, 1.0)) {
    eta_ = Mat::Identity(2, 2);
    eta_(0, 0) = -1.0;
    x_ = Vec::Zero(2);
    x_[0] = 1.0;
  }
  int dim() const override { return 2; }
  const Vec& lattice() const override { return lattice_; }
  double factor(const Vec& p) const {
    return base_ + amp_ * std::sin(2.0 * M_PI * p[0]) * std::sin(2.0 * M_PI * p[1]);
  }
  Mat metric(const Vec& p) const override {
    const double f = factor(p);
    return (f * f) * eta_;
  }
  Vec orientation(const Vec&) const override { return x_; }
  Mat riemannian(const Vec& p) const override {
    if (gr_amp_ == 0.0) return Mat::Identity(2, 2);
    const double h = 1.0 + gr_amp_ * std::sin(2.0 * M_PI * p[1]);
    return (h * h) * Mat::Identity(2, 2);
  }
  bool riemannian_is_identity() const override { return gr_amp_ == 0.0; }
  bool known_vicious() const override { return true; }

 private:
  double base_, amp_, gr_amp_;
  Vec lattice_;
  Mat eta_;
  Vec x_;
};

class ProductCircleModel : public MetricModel {
 public:
  ProductCircleModel(double mean, double amp)
      : mean_(mean), amp_(amp), lattice_(Vec::Constant(2, 1.0)) {
    x_ = Vec::Zero(2);
    x_[0] = 1.0;
  }
  int dim() const override { return 2; }
  const Vec& lattice() const override { return lattice_; }
  double rho(double x) const { return mean_ + amp_ * std::sin(2.0 * M_PI * x); }
  Mat metric(const Vec& p) const override {
    Mat g = Mat::Zero(2, 2);
    const double r = rho(p[1]);
    g(0, 0) = -1.0;
    g(1, 1) = r * r;
    return g;
  }
  Vec orientation(const Vec&) const override { return x_; }
  bool known_vicious() const override { return true; }

 private:
  double mean_, amp_;
  Vec lattice_;
  Vec x_;
};

// Example E1 blend. The four slab metrics are interpolated by disjoint smooth
// bumps in x; a -s(x) dz^2 term keeps the metric Lorentzian between the slabs
// and provides the vertical timelike period at x = 0.
class E1Model : public MetricModel {
 public:
  E1Model(double width, double depth)
      : width_(width), depth_(depth), lattice_(Vec::Constant(3, 7.0)) {}
  int dim() const override { return 3; }
  const Vec& lattice() const override { return lattice_; }

  static double bump(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
  }
  double phi(double x, int center) const {
    double d = std::fmod(x - center, 7.0);
    if (d < -3.5) d += 7.0;
    if (d > 3.5) d -= 7.0;
    return bump(d / width_);
  }
  struct Coeffs {
    double b, c, e, d;
  };
  Coeffs coeffs(double x) const {
    const double p1 = phi(x, 1), p2 = phi(x, 2), p3 = phi(x, 3);
    const double p4 = phi(x, 4), p5 = phi(x, 5), p6 = phi(x, 6);
    Coeffs co;
    co.b = 1.0 - p2 - p5;
    co.c = 0.5 * (p5 - p2);
    co.e = 0.5 * (p1 + p4) - 0.5 * (p3 + p6);
    co.d = -depth_ * (1.0 - (p1 + p2 + p3 + p4 + p5 + p6));
    return co;
  }
  Mat metric(const Vec& p) const override {
    const Coeffs co = coeffs(p[0]);
    Mat g = Mat::Zero(3, 3);
    g(0, 0) = 1.0;
    g(1, 1) = co.b;
    g(1, 2) = g(2, 1) = co.c;
    g(0, 2) = g(2, 0) = co.e;
    g(2, 2) = co.d;
    return g;
  }
  // future pointing timelike everywhere, with dz(X) = 1 >= 0
  Vec orientation(const Vec& p) const override {
    const Coeffs co = coeffs(p[0]);
    return vec3(-co.e, -co.c, 1.0);
  }
  bool known_nonvicious() const override { return true; }
  int time_axis() const override { return 2; }

 private:
  double width_, depth_;
  Vec lattice_;
};

class PerturbedModel : public MetricModel {
 public:
  PerturbedModel(std::shared_ptr<const MetricModel> base, double amplitude)
      : base_(std::move(base)), amp_(amplitude) {
    const int n = base_->dim();
    pattern_ = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pattern_(i, j) = 1.0 / (1.0 + i + j);
    pattern_ /= pattern_.operatorNorm();
  }
  int dim() const override { return base_->dim(); }
  const Vec& lattice() const override { return base_->lattice(); }
  double bump(const Vec& p) const {
    double s = 1.0;
    const Vec& L = base_->lattice();
    for (int i = 0; i < p.size(); ++i)
      s *= std::sin(2.0 * M_PI * p[i] / L[i] + 0.3 + 0.37 * i);
    return s;
  }
  Mat metric(const Vec& p) const override {
    return base_->metric(p) + (amp_ * bump(p)) * pattern_;
  }
  Vec orientation(const Vec& p) const override { return base_->orientation(p); }
  Mat riemannian(const Vec& p) const override { return base_->riemannian(p); }
  bool riemannian_is_identity() const override { return base_->riemannian_is_identity(); }
  bool known_vicious() const override { return false; }  // perturbation voids preset knowledge
  bool known_nonvicious() const override { return false; }
  int time_axis() const override { return base_->time_axis(); }

 private:
  std::shared_ptr<const MetricModel> base_;
  double amp_;
  Mat pattern_;
};

void verify_field(const MetricModel& m, int grid_per_axis) {
  const int n = m.dim();
  const Vec& L = m.lattice();
  // signature + time orientation on a grid of the fundamental domain
  VecI idx = VecI::Zero(n);
  const int N = grid_per_axis;
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= N;
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t r = t;
    Vec p(n);
    for (int i = 0; i < n; ++i) {
      p[i] = L[i] * ((r % N) + 0.31) / N;
      r /= N;
    }
    const Mat g = m.metric(p);
    if (!lorentzian_signature(g))
      throw ConstructionError("metric loses Lorentzian signature at " + point_str(p));
    const Vec X = m.orientation(p);
    if (qform(g, X) >= 0.0)
      throw ConstructionError("time orientation fails g(X,X)<0 at " + point_str(p));
    const Mat gr = m.riemannian(p);
    if (gr(0, 0) <= 0.0 || gr.determinant() <= 0.0)
      throw ConstructionError("auxiliary metric not positive definite at " + point_str(p));
  }
  // periodicity at random points
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  for (int trial = 0; trial < 64; ++trial) {
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = uniform(rng, -3.0 * L[i], 3.0 * L[i]);
    Vec k(n);
    for (int i = 0; i < n; ++i) k[i] = L[i] * uniform_int(rng, -3, 3);
    const Mat a = m.metric(p), b = m.metric(p + k);
    if ((a - b).cwiseAbs().maxCoeff() > 1e-10)
      throw ConstructionError("metric not lattice periodic at " + point_str(p));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PresetSpec

PresetSpec PresetSpec::make(const std::string& name, const nlohmann::json& params) {
  PresetSpec s;
  s.name = name;
  s.params = params.is_null() ? nlohmann::json::object() : params;
  return s;
}

PresetSpec PresetSpec::from_json(const nlohmann::json& j) {
  if (!j.contains("name") || !j["name"].is_string())
    throw InvalidInput("preset: missing string field 'name'");
  return make(j["name"].get<std::string>(), j.value("params", nlohmann::json::object()));
}

nlohmann::json PresetSpec::to_json() const {
  return nlohmann::json{{"name", name}, {"params", params}};
}

double PresetSpec::param(const std::string& key, double fallback) const {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number())
    throw InvalidInput("preset params." + key + ": expected a number");
  return params[key].get<double>();
}

// ---------------------------------------------------------------------------
// MetricField

MetricField::MetricField(PresetSpec spec, std::shared_ptr<const MetricModel> model)
    : spec_(std::move(spec)), model_(std::move(model)) {}

int MetricField::dim() const { return model_->dim(); }
const Vec& MetricField::lattice() const { return model_->lattice(); }
Mat MetricField::metric(const Vec& p) const { return model_->metric(p); }
Vec MetricField::orientation(const Vec& p) const { return model_->orientation(p); }
Mat MetricField::riemannian(const Vec& p) const { return model_->riemannian(p); }
double MetricField::q(const Vec& p, const Vec& v) const { return qform(model_->metric(p), v); }
double MetricField::qr(const Vec& p, const Vec& v) const {
  if (model_->riemannian_is_identity()) return v.squaredNorm();
  return qform(model_->riemannian(p), v);
}
bool MetricField::riemannian_is_identity() const { return model_->riemannian_is_identity(); }
bool MetricField::known_vicious() const { return model_->known_vicious(); }
bool MetricField::known_nonvicious() const { return model_->known_nonvicious(); }
int MetricField::time_axis() const { return model_->time_axis(); }

Vec MetricField::wrap(const Vec& p) const {
  const Vec& L = model_->lattice();
  Vec w = p;
  for (int i = 0; i < w.size(); ++i) w[i] -= L[i] * std::floor(w[i] / L[i]);
  return w;
}

MetricField make_preset(const PresetSpec& spec) {
  std::shared_ptr<const MetricModel> model;
  if (spec.name == "flat") {
    const int dim = static_cast<int>(spec.param("dim", 2));
    if (dim < 2 || dim > 3) throw InvalidInput("preset params.dim: flat dim must be 2 or 3");
    const double scale = spec.param("scale", 1.0);
    if (scale <= 0) throw InvalidInput("preset params.scale: must be positive");
    model = std::make_shared<FlatModel>(dim, scale);
  } else if (spec.name == "conformal_flat") {
    const double base = spec.param("base", 1.0);
    const double amp = spec.param("amp", 0.5);
    const double gr_amp = spec.param("gr_amp", 0.0);
    auto cf = std::make_shared<ConformalFlatModel>(base, amp, gr_amp);
    for (int i = 0; i <= 64; ++i)
      for (int j = 0; j <= 64; ++j)
        if (cf->factor(vec2(i / 64.0, j / 64.0)) <= 0.0)
          throw InvalidInput("preset params: conformal factor must stay positive");
    model = cf;
  } else if (spec.name == "product_circle") {
    const double mean = spec.param("rho_mean", 1.5);
    const double amp = spec.param("rho_amp", 0.5);
    auto pc = std::make_shared<ProductCircleModel>(mean, amp);
    for (int i = 0; i <= 256; ++i)
      if (pc->rho(i / 256.0) <= 0.0)
        throw InvalidInput("preset params: circle profile rho must stay positive");
    model = pc;
  } else if (spec.name == "e1_counterexample") {
    const double width = spec.param("width", 0.5);
    const double depth = spec.param("depth", 1.0);
    if (width <= 0 || width > 1.0) throw InvalidInput("preset params.width: must be in (0,1]");
    if (depth <= 0) throw InvalidInput("preset params.depth: must be positive");
    model = std::make_shared<E1Model>(width, depth);
  } else {
    throw InvalidInput("preset name: unknown preset '" + spec.name + "'");
  }
  verify_field(*model, model->dim() == 3 ? 64 : 48);
  return MetricField(spec, std::move(model));
}

MetricField perturb_metric(const MetricField& base, double amplitude) {
  // rewrap the base field so stacked perturbations compose
  class Rewrap : public MetricModel {
   public:
    explicit Rewrap(MetricField f) : f_(std::move(f)) {}
    int dim() const override { return f_.dim(); }
    const Vec& lattice() const override { return f_.lattice(); }
    Mat metric(const Vec& p) const override { return f_.metric(p); }
    Vec orientation(const Vec& p) const override { return f_.orientation(p); }
    Mat riemannian(const Vec& p) const override { return f_.riemannian(p); }
    bool riemannian_is_identity() const override { return f_.riemannian_is_identity(); }
    bool known_vicious() const override { return f_.known_vicious(); }
    bool known_nonvicious() const override { return f_.known_nonvicious(); }
    int time_axis() const override { return f_.time_axis(); }

   private:
    MetricField f_;
  };
  auto wrapped = std::make_shared<Rewrap>(base);
  auto model = std::make_shared<PerturbedModel>(wrapped, amplitude);
  verify_field(*model, model->dim() == 3 ? 48 : 48);
  PresetSpec spec = base.spec();
  spec.params["perturb_amplitude"] = amplitude;
  return MetricField(spec, std::move(model));
}

// ---------------------------------------------------------------------------
// pointwise causal classification and cone sampling

CausalCharacter causal_character(const MetricField& m, const Vec& p, const Vec& v, double tol) {
  if (!v.allFinite()) throw InvalidInput("causal_character: non-finite vector");
  CausalCharacter c;
  c.q = m.q(p, v);
  c.qr = m.qr(p, v);
  if (c.qr <= 0.0) {  // zero vector
    c.kind = CausalKind::null_like;
    c.direction = CausalDirection::none;
    return c;
  }
  if (std::abs(c.q) <= tol * c.qr)
    c.kind = CausalKind::null_like;
  else if (c.q < 0.0)
    c.kind = CausalKind::timelike;
  else
    c.kind = CausalKind::spacelike;
  if (c.kind == CausalKind::spacelike) {
    c.direction = CausalDirection::none;
  } else {
    const double pair = v.dot(m.metric(p) * m.orientation(p));
    c.direction = pair < 0.0 ? CausalDirection::future : CausalDirection::past;
  }
  return c;
}

namespace {

struct Frame {
  Vec T;                // future timelike, unit g_R
  std::vector<Vec> S;   // g_R-orthonormal spacelike-ish completion
  Mat gr;
};

Frame orthoframe(const MetricField& m, const Vec& p) {
  Frame f;
  f.gr = m.riemannian(p);
  const Vec X = m.orientation(p);
  f.T = X / std::sqrt(X.dot(f.gr * X));
  const int n = m.dim();
  for (int axis = 0; axis < n && static_cast<int>(f.S.size()) < n - 1; ++axis) {
    Vec e = Vec::Zero(n);
    e[axis] = 1.0;
    Vec r = e - (e.dot(f.gr * f.T)) * f.T;
    for (const auto& s : f.S) r -= (r.dot(f.gr * s)) * s;
    const double nn = r.dot(f.gr * r);
    if (nn > 1e-12) f.S.push_back(r / std::sqrt(nn));
  }
  return f;
}

// Null direction on the arc cos(t)T + sin(t)S by bisection on the sign of
// g(v,v); 64 steps per the preset smoothness budget.
Vec null_on_arc(const MetricField& m, const Vec& p, const Frame& f, const Vec& S) {
  auto arc = [&](double t) { return Vec(std::cos(t) * f.T + std::sin(t) * S); };
  double lo = 0.0;
  double hi = M_PI / 2.0;
  if (m.q(p, arc(hi)) <= 0.0) {
    bool found = false;
    for (int k = 1; k <= 64; ++k) {
      const double t = M_PI / 2.0 + (M_PI / 2.0) * k / 65.0;
      if (m.q(p, arc(t)) > 0.0) {
        hi = t;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error("cone_rays: no spacelike seed on arc at " + point_str(p) +
                  " seed " + point_str(S));
  }
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    (m.q(p, arc(mid)) < 0.0 ? lo : hi) = mid;
  }
  // keep the causal side of the tolerance band
  Vec v = arc(lo);
  return v / std::sqrt(m.qr(p, v));
}

}  // namespace

ConeRaySample sample_cone_rays(const MetricField& m, const Vec& p, int boundary_count,
                               int interior_count) {
  ConeRaySample out;
  const Frame f = orthoframe(m, p);
  const int n = m.dim();
  if (n == 2) {
    const Vec n_plus = null_on_arc(m, p, f, f.S[0]);
    const Vec n_minus = null_on_arc(m, p, f, Vec(-f.S[0]));
    out.boundary = {n_plus, n_minus};
    // angles of the null rays relative to (T, S)
    auto theta = [&](const Vec& v) {
      return std::atan2(v.dot(f.gr * f.S[0]), v.dot(f.gr * f.T));
    };
    const double tp = theta(n_plus), tm = theta(n_minus);
    for (int j = 1; j <= interior_count; ++j) {
      const double t = tm + (tp - tm) * j / (interior_count + 1.0);
      Vec v = std::cos(t) * f.T + std::sin(t) * f.S[0];
      out.interior.push_back(v / std::sqrt(m.qr(p, v)));
    }
    return out;
  }
  const int nb = std::max(boundary_count, 3);
  std::vector<Vec> ring;
  std::vector<double> ring_theta;
  for (int k = 0; k < nb; ++k) {
    const double a = 2.0 * M_PI * k / nb;
    const Vec S = std::cos(a) * f.S[0] + std::sin(a) * f.S[1];
    Vec v = null_on_arc(m, p, f, S);
    ring_theta.push_back(std::atan2(v.dot(f.gr * S), v.dot(f.gr * f.T)));
    ring.push_back(std::move(v));
  }
  out.boundary = ring;
  int placed = 0;
  for (int s = 1; placed < interior_count; ++s) {
    for (int k = 0; k < nb && placed < interior_count; ++k) {
      const double frac = 1.0 / (1.0 + s);
      const double a = 2.0 * M_PI * (k + 0.5 * (s % 2)) / nb;
      const Vec S = std::cos(a) * f.S[0] + std::sin(a) * f.S[1];
      const double t = ring_theta[k] * frac;
      Vec v = std::cos(t) * f.T + std::sin(t) * S;
      out.interior.push_back(v / std::sqrt(m.qr(p, v)));
      ++placed;
    }
  }
  return out;
}

std::vector<Vec> ConeRaySample::all() const {
  std::vector<Vec> v = boundary;
  v.insert(v.end(), interior.begin(), interior.end());
  return v;
}

std::vector<Vec> cone_rays(const MetricField& m, const Vec& p, int count) {
  if (count < 2 * m.dim()) throw InvalidInput("cone_rays: count must be at least 2*dim");
  const int nb = m.dim() == 2 ? 2 : std::max(4, count / 2);
  return sample_cone_rays(m, p, nb, count - nb).all();
}

double timecone_margin(const MetricField& m, const Vec& p, const Vec& v) {
  const CausalCharacter cc = causal_character(m, p, v);
  if (cc.kind != CausalKind::timelike || cc.direction != CausalDirection::future) return 0.0;
  const int nb = m.dim() == 2 ? 2 : 48;
  const ConeRaySample cs = sample_cone_rays(m, p, nb, 0);
  const Mat gr = m.riemannian(p);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& nray : cs.boundary) {
    const double t = std::max(0.0, v.dot(gr * nray) / nray.dot(gr * nray));
    const Vec r = v - t * nray;
    best = std::min(best, std::sqrt(std::max(0.0, r.dot(gr * r))));
  }
  return best / std::sqrt(cc.qr);
}

bool epsilon_timecone_member(const MetricField& m, const Vec& p, const Vec& v, double eps) {
  if (eps < 0.0) throw InvalidInput("epsilon_timecone_member: eps must be nonnegative");
  const CausalCharacter cc = causal_character(m, p, v);
  if (cc.kind != CausalKind::timelike || cc.direction != CausalDirection::future) return false;
  return timecone_margin(m, p, v) >= eps;
}

}  // namespace lab
