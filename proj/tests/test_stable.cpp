#include <doctest.h>

#include "lab/stable.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lab;

namespace {

MetricField flat2() { return make_preset(PresetSpec::make("flat")); }
MetricField conformal() { return make_preset(PresetSpec::make("conformal_flat")); }
MetricField product() { return make_preset(PresetSpec::make("product_circle")); }

// half opening angles of a pointed 2D cone, relative to the axis angle
std::pair<double, double> extreme_angles(const PolyCone& c) {
  REQUIRE(c.shape() == PolyCone::Shape::pointed);
  REQUIRE(c.rays().size() == 2);
  return {std::atan2(c.rays()[0][1], c.rays()[0][0]),
          std::atan2(c.rays()[1][1], c.rays()[1][0])};
}

SamplingBudget small_budget() {
  SamplingBudget b;
  b.geodesics = 96;
  b.geodesic_length = 120.0;
  b.walks = 64;
  b.walk_steps = 3000;
  b.l_min = 100.0;
  b.frak_resolution = 24;
  return b;
}

}  // namespace

TEST_CASE("stable_norm: flat euclidean values within 1 percent") {
  const MetricField m = flat2();
  const auto r34 = stable_norm(m, veci2(3, 4), 16);
  CHECK(r34.norm == doctest::Approx(5.0).epsilon(0.01));
  const auto r10 = stable_norm(m, veci2(1, 0), 16);
  CHECK(r10.norm == doctest::Approx(1.0).epsilon(1e-9));
  const auto r11 = stable_norm(m, veci2(1, 1), 16);
  CHECK(r11.norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // plateau: |dist(0,nh) - n*norm| <= std_est for every n
  for (std::size_t n = 1; n <= r34.dists.size(); ++n)
    CHECK(std::abs(r34.dists[n - 1] - n * r34.norm) <= r34.std_est + 1e-12);
  // subadditivity of the distance sequence
  for (std::size_t a = 1; a + 2 <= r34.dists.size(); ++a)
    for (std::size_t b = 1; a + b <= r34.dists.size(); ++b)
      CHECK(r34.dists[a + b - 1] <= r34.dists[a - 1] + r34.dists[b - 1] + 1e-9);
}

TEST_CASE("stable_norm: homogeneity on lattice multiples") {
  const MetricField m = flat2();
  const auto r = stable_norm(m, veci2(2, 1), 16);
  const auto r2 = stable_norm(m, veci2(4, 2), 8);
  CHECK(std::abs(r2.norm - 2.0 * r.norm) <= 2.0 * r.std_est / 8 + 1e-9);
}

TEST_CASE("stable_norm: conformal auxiliary metric is self-consistent") {
  const MetricField m = make_preset(PresetSpec::make("conformal_flat", {{"gr_amp", 0.25}}));
  REQUIRE(!m.riemannian_is_identity());
  StableNormOptions lo;
  lo.resolution = 64;
  StableNormOptions hi;
  hi.resolution = 128;
  const auto a = stable_norm(m, veci2(1, 0), 8, lo);
  const auto b = stable_norm(m, veci2(1, 0), 8, hi);
  CHECK(std::abs(a.norm - b.norm) <= 0.02 * b.norm);
}

TEST_CASE("estimate_stable_norm: triangle inequality on sampled triples") {
  const MetricField m = flat2();
  const auto est = estimate_stable_norm(m, 2, 16);
  const NormModel N = est.to_norm_model();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Vec u = vec2(uniform(rng, -3, 3), uniform(rng, -3, 3));
    const Vec w = vec2(uniform(rng, -3, 3), uniform(rng, -3, 3));
    CHECK(N(Vec(u + w)) <= N(u) + N(w) + 1e-9);
    CHECK(N(u) == doctest::Approx(N(Vec(-u))).epsilon(1e-12));
  }
  // flat stable norm is euclidean up to the stencil calibration
  CHECK(N(vec2(1, 0)) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(N(vec2(0.6, 0.8)) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("estimate_stable_cone: flat cone recovered") {
  const MetricField m = flat2();
  const auto est = estimate_stable_cone(m, small_budget(), 7);
  CHECK(est.sources.geodesic > 40);
  CHECK(est.sources.walk > 30);
  CHECK(est.sources.frak_zero > 4);
  const auto [a1, a2] = extreme_angles(est.cone);
  CHECK(std::abs(std::abs(a1) - M_PI / 4) < 0.05);
  CHECK(std::abs(std::abs(a2) - M_PI / 4) < 0.05);
  // every collected sample is causal for the true cone, so the hull cannot
  // leak outside it
  for (const auto& s : est.cross_section) CHECK(s[0] >= std::abs(s[1]) - 0.02);
}

TEST_CASE("estimate_stable_cone: conformal matches flat") {
  const auto est = estimate_stable_cone(conformal(), small_budget(), 7);
  const auto [a1, a2] = extreme_angles(est.cone);
  CHECK(std::abs(std::abs(a1) - M_PI / 4) < 0.05);
  CHECK(std::abs(std::abs(a2) - M_PI / 4) < 0.05);
}

TEST_CASE("estimate_stable_cone: product cone slope") {
  const auto est = estimate_stable_cone(product(), small_budget(), 7);
  const auto [a1, a2] = extreme_angles(est.cone);
  const double s1 = 1.0 / std::abs(std::tan(a1));
  const double s2 = 1.0 / std::abs(std::tan(a2));
  CHECK(s1 == doctest::Approx(1.5).epsilon(0.02));
  CHECK(s2 == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("cross-section convexity and open interior") {
  const auto est = estimate_stable_cone(flat2(), small_budget(), 11);
  std::mt19937_64 rng(5);
  const auto& cs = est.cross_section;
  REQUIRE(cs.size() > 10);
  for (int i = 0; i < 1000; ++i) {
    const Vec a = cs[static_cast<std::size_t>(rng() % cs.size())];
    const Vec b = cs[static_cast<std::size_t>(rng() % cs.size())];
    CHECK(exterior_distance(est.cone, Vec(0.5 * (a + b)), NormModel::euclidean(2)) <= 0.02);
  }
  // open interior: the cone contains a basis and a strictly positive witness
  const auto comp = is_compact_cone(est.cone);
  CHECK(comp.compact);
  CHECK(comp.margin > 0.1);
  REQUIRE(est.cone.rays().size() >= 2);
  const double det = est.cone.rays()[0][0] * est.cone.rays()[1][1] -
                     est.cone.rays()[0][1] * est.cone.rays()[1][0];
  CHECK(std::abs(det) > 1e-3);
}

TEST_CASE("a_of_h: flat values") {
  const auto est = estimate_stable_cone(flat2(), small_budget(), 13);
  const NormModel N = est.norm.to_norm_model();
  CHECK(a_of_h(est, N, vec2(2, 1)) == doctest::Approx(0.0));
  CHECK(a_of_h(est, N, vec2(0, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("check_p01a: flat error within two cells and stable under doubling") {
  const MetricField m = flat2();
  auto est = estimate_stable_cone(m, small_budget(), 17);
  const int res = 32;
  const auto rep = check_p01a(m, est, 64, 23, res);
  CHECK(rep.err_est <= 2.0 / res + 0.02);
  const auto rep2 = check_p01a(m, est, 128, 23, res);
  CHECK(std::abs(rep2.err_est - rep.err_est) <= 0.1 * std::max(rep.err_est, 2.0 / res));
  // boundedness: doubling the h-norm range does not grow the error
  const auto rep3 = check_p01a(m, est, 64, 23, res, 5.0);
  CHECK(rep3.err_est <= rep.err_est + 0.1 * std::max(rep.err_est, 2.0 / res) + 2.0 / res);
}

TEST_CASE("flow_rotation_vector: flat flows land in the cone") {
  const MetricField m = flat2();
  const Vec r1 = flow_rotation_vector(m, VectorFieldSpec{"orientation", {}}, Vec::Zero(2), 50.0);
  CHECK((r1 - vec2(1, 0)).norm() < 1e-9);
  VectorFieldSpec c;
  c.kind = "constant";
  c.v = vec2(2, 1) / std::sqrt(5.0);
  const Vec r2 = flow_rotation_vector(m, c, vec2(0.2, 0.7), 50.0);
  CHECK((r2 - c.v).norm() < 1e-9);
  // spacelike constant field fails the timelike check with a located error
  VectorFieldSpec bad;
  bad.kind = "constant";
  bad.v = vec2(1, 2);
  CHECK_THROWS_AS(flow_rotation_vector(m, bad, Vec::Zero(2), 1.0), Error);
}

TEST_CASE("flow_rotation_vector: conformal orientation flow stays in the estimate") {
  const MetricField m = conformal();
  const auto est = estimate_stable_cone(m, small_budget(), 19);
  const Vec rho = flow_rotation_vector(m, VectorFieldSpec{"orientation", {}}, vec2(0.3, 0.1),
                                       1000.0, 0.05);
  CHECK(exterior_distance(est.cone, rho, NormModel::euclidean(2)) <= 0.02);
}

TEST_CASE("subset-sum concentration (deep families admit deep subsets)") {
  const auto est = estimate_stable_cone(flat2(), small_budget(), 29);
  const NormModel eu = NormModel::euclidean(2);
  const PolyCone sub = epsilon_subcone(est.cone, 0.2, eu);
  std::mt19937_64 rng(31);
  double eta = std::numeric_limits<double>::infinity();
  int families = 0;
  for (int trial = 0; trial < 500 && families < 50; ++trial) {
    // comparable-norm samples in the cone
    std::vector<Vec> h;
    Vec sum = Vec::Zero(2);
    for (int i = 0; i < 6; ++i) {
      const double ang = uniform(rng, -M_PI / 4, M_PI / 4);
      const double len = uniform(rng, 1.0, 2.0);
      h.push_back(len * vec2(std::cos(ang), std::sin(ang)));
      sum += h.back();
    }
    if (!contains(sub, sum, 1e-9)) continue;
    ++families;
    // some pair (b = dim = 2) of the family lands deep as well
    double best = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j) {
        const Vec s = h[i] + h[j];
        best = std::max(best, boundary_distance(est.cone, s, eu) / eu(s));
      }
    eta = std::min(eta, best);
  }
  REQUIRE(families == 50);
  CHECK(eta > 0.0);
}

TEST_CASE("deep displacements force ball inclusion (B_R(q) in I+(p))") {
  for (const auto& m : {flat2(), product()}) {
    const double R = 1.0;
    std::mt19937_64 rng(37);
    double K_est = 0.0;
    const int res = 24;
    for (double K : {1.2, 1.8, 2.5, 3.5}) {
      bool all_ok = true;
      for (int pair = 0; pair < 100 && all_ok; ++pair) {
        const Vec p = vec2(uniform(rng, 0, 1), uniform(rng, 0, 1));
        // deep displacement: K above the flat/product cone boundary margin
        const double along = uniform(rng, 1.5 * K, 2.5 * K);
        const Vec q = p + vec2(along + K, uniform(rng, -0.2, 0.2) * along);
        VecI wlo(2), whi(2);
        for (int i = 0; i < 2; ++i) {
          wlo[i] = static_cast<int>(std::floor(std::min(p[i], q[i]))) - 2;
          whi[i] = static_cast<int>(std::ceil(std::max(p[i], q[i]))) + 2;
        }
        const auto reach = forward_reach(m, p, wlo, whi, res);
        for (int s = 0; s < 32 && all_ok; ++s) {
          const Vec b = q + R * random_unit_vector(rng, 2) * u01(rng);
          if (!reach.reached_point(b)) all_ok = false;
        }
      }
      if (all_ok) {
        K_est = K;
        break;
      }
    }
    CHECK(K_est > 0.0);
  }
}
