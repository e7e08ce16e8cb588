#include <doctest.h>

#include "lab/spacetime.hpp"

#include <cmath>
#include <random>

using namespace lab;

namespace {

MetricField flat2() { return make_preset(PresetSpec::make("flat")); }
MetricField conformal() { return make_preset(PresetSpec::make("conformal_flat")); }
MetricField product(double mean = 1.5, double amp = 0.5) {
  return make_preset(PresetSpec::make("product_circle", {{"rho_mean", mean}, {"rho_amp", amp}}));
}
MetricField e1() { return make_preset(PresetSpec::make("e1_counterexample")); }

Vec random_point(std::mt19937_64& rng, const MetricField& m, double range = 3.0) {
  Vec p(m.dim());
  for (int i = 0; i < m.dim(); ++i) p[i] = uniform(rng, -range, range) * m.lattice()[i];
  return p;
}

}  // namespace

TEST_CASE("presets: construction and validation") {
  CHECK_NOTHROW(flat2());
  CHECK_NOTHROW(conformal());
  CHECK_NOTHROW(product());
  CHECK_NOTHROW(e1());
  CHECK_THROWS_AS(make_preset(PresetSpec::make("klein")), InvalidInput);
  CHECK_THROWS_AS(make_preset(PresetSpec::make("conformal_flat", {{"amp", 2.0}})), InvalidInput);
  CHECK_THROWS_AS(make_preset(PresetSpec::make("product_circle", {{"rho_mean", 0.2}})),
                  InvalidInput);
}

TEST_CASE("flat: signature and causal classification") {
  const MetricField m = flat2();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec p = random_point(rng, m);
    const Mat g = m.metric(p);
    CHECK(g(0, 0) == -1.0);
    CHECK(g(1, 1) == 1.0);
  }
  const Vec origin = Vec::Zero(2);
  auto c1 = causal_character(m, origin, vec2(1, 0));
  CHECK(c1.kind == CausalKind::timelike);
  CHECK(c1.direction == CausalDirection::future);
  auto c2 = causal_character(m, origin, vec2(1, 1));
  CHECK(c2.kind == CausalKind::null_like);
  CHECK(c2.direction == CausalDirection::future);
  auto c3 = causal_character(m, origin, vec2(1, 2));
  CHECK(c3.kind == CausalKind::spacelike);
  CHECK(c3.direction == CausalDirection::none);
  auto c4 = causal_character(m, origin, vec2(-1, 0));
  CHECK(c4.direction == CausalDirection::past);
}

TEST_CASE("conformal invariance of causal characters") {
  const MetricField mc = conformal();
  const MetricField mf = flat2();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Vec p = random_point(rng, mc);
    Vec v = vec2(uniform(rng, -2, 2), uniform(rng, -2, 2));
    if (v.norm() < 1e-6) continue;
    const auto a = causal_character(mc, p, v, 1e-12);
    const auto b = causal_character(mf, p, v, 1e-12);
    CHECK(a.kind == b.kind);
    CHECK(a.direction == b.direction);
  }
}

TEST_CASE("periodicity of causal character under lattice translation") {
  for (const auto& m : {conformal(), product(), e1()}) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      const Vec p = random_point(rng, m);
      Vec k(m.dim());
      for (int j = 0; j < m.dim(); ++j) k[j] = m.lattice()[j] * uniform_int(rng, -2, 2);
      const Vec v = random_unit_vector(rng, m.dim());
      const auto a = causal_character(m, p, v);
      const auto b = causal_character(m, Vec(p + k), v);
      CHECK(a.kind == b.kind);
      CHECK(a.direction == b.direction);
    }
  }
}

TEST_CASE("cone_rays: flat null directions") {
  const MetricField m = flat2();
  const auto rays = sample_cone_rays(m, Vec::Zero(2), 2, 6);
  REQUIRE(rays.boundary.size() == 2);
  for (const auto& n : rays.boundary) {
    CHECK(std::abs(std::abs(n[0]) - std::abs(n[1])) < 1e-12);
    CHECK(n[0] > 0);
  }
  for (const auto& v : rays.all()) {
    const auto cc = causal_character(m, Vec::Zero(2), v);
    CHECK(is_future_causal(cc));
    CHECK(v.dot(m.metric(Vec::Zero(2)) * m.orientation(Vec::Zero(2))) < 0);
  }
  for (const auto& n : rays.boundary) CHECK(std::abs(m.q(Vec::Zero(2), n)) <= 1e-6);
}

TEST_CASE("cone_rays: product circle slope") {
  // rho = 2 at the sampled point: null rays proportional to (1, +-1/2)
  const MetricField m = product(2.0, 0.0);
  const auto rays = sample_cone_rays(m, vec2(0.0, 0.25), 2, 0);
  for (const auto& n : rays.boundary) {
    CHECK(std::abs(n[1] / n[0]) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("e1: slab metrics match the construction") {
  const MetricField m = e1();
  // at x = 2 the metric is -dy dz + dx^2
  const Mat g2 = m.metric(vec3(2.0, 0.3, -1.2));
  CHECK(g2(0, 0) == doctest::Approx(1.0));
  CHECK(g2(1, 1) == doctest::Approx(0.0));
  CHECK(g2(2, 2) == doctest::Approx(0.0));
  CHECK(g2(1, 2) == doctest::Approx(-0.5));
  CHECK(g2(0, 2) == doctest::Approx(0.0));
  // at x = 1 it is (dx+dz)dx + dy^2
  const Mat g1 = m.metric(vec3(1.0, 0.0, 0.5));
  CHECK(g1(0, 0) == doctest::Approx(1.0));
  CHECK(g1(1, 1) == doctest::Approx(1.0));
  CHECK(g1(0, 2) == doctest::Approx(0.5));
  CHECK(g1(2, 2) == doctest::Approx(0.0));
  // partial_y is null on the x=2 slab and dz annihilates it
  const auto cc = causal_character(m, vec3(2.0, 0.0, 0.0), vec3(0, 1, 0));
  CHECK(cc.kind == CausalKind::null_like);
  // vertical period: partial_z is timelike at x = 0 (condition (vi) carrier)
  const auto cz = causal_character(m, vec3(0.0, 1.0, 2.0), vec3(0, 0, 1));
  CHECK(cz.kind == CausalKind::timelike);
  CHECK(cz.direction == CausalDirection::future);
}

TEST_CASE("e1: ker dz is spacelike off the slabs") {
  const MetricField m = e1();
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    Vec p = random_point(rng, m, 1.0);
    const double x = m.wrap(p)[0];
    double dmin = 10;
    for (int s = 1; s <= 6; ++s) dmin = std::min(dmin, std::abs(x - s));
    if (dmin < 0.05) continue;
    ++checked;
    // v in ker dz: v = (a, b, 0)
    const Vec v = vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 0.0);
    if (v.norm() < 1e-3) continue;
    CHECK(m.q(p, v) > 0.0);
  }
  CHECK(checked > 2000);
}

TEST_CASE("e1: dz nonzero on future causal vectors off the T2/T5 slabs") {
  const MetricField m = e1();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 400; ++i) {
    Vec p = random_point(rng, m, 1.0);
    const double x = m.wrap(p)[0];
    if (std::min(std::abs(x - 2.0), std::abs(x - 5.0)) < 0.6) continue;
    for (const auto& v : sample_cone_rays(m, p, 8, 8).all()) {
      CHECK(v[2] > 1e-9);  // dz(v) > 0 for future causal v
    }
  }
}

TEST_CASE("epsilon_timecone_member: flat examples and scaling") {
  const MetricField m = flat2();
  const Vec p = Vec::Zero(2);
  CHECK(epsilon_timecone_member(m, p, vec2(1, 0), 0.5));
  CHECK(timecone_margin(m, p, vec2(1, 0)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK_FALSE(epsilon_timecone_member(m, p, vec2(1, 1), 0.01));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Vec v = vec2(uniform(rng, 0.1, 2.0), uniform(rng, -2.0, 2.0));
    const double eps = uniform(rng, 0.0, 0.8);
    CHECK(epsilon_timecone_member(m, p, v, eps) ==
          epsilon_timecone_member(m, p, Vec(2.0 * v), eps));
  }
}

TEST_CASE("fiberwise convexity of future causal cone") {
  for (const auto& m : {conformal(), product()}) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
      const Vec p = random_point(rng, m);
      const auto rays = sample_cone_rays(m, p, 2, 6).all();
      for (std::size_t a = 0; a < rays.size(); ++a)
        for (std::size_t b = a + 1; b < rays.size(); ++b) {
          const Vec mid = 0.5 * (rays[a] + rays[b]);
          CHECK(is_future_causal(causal_character(m, p, mid, 1e-6)));
        }
    }
  }
}

TEST_CASE("perturbation: keeps signature at small amplitude, rejects at huge") {
  const MetricField m = flat2();
  CHECK_NOTHROW(perturb_metric(m, 0.05));
  CHECK_THROWS_AS(perturb_metric(m, 5.0), ConstructionError);
  const MetricField p0 = perturb_metric(m, 0.0);
  CHECK(p0.metric(vec2(0.3, 0.4)) == m.metric(vec2(0.3, 0.4)));
}

TEST_CASE("preset JSON round trip") {
  const PresetSpec s = PresetSpec::make("product_circle", {{"rho_mean", 2.0}, {"rho_amp", 0.0}});
  const PresetSpec back = PresetSpec::from_json(s.to_json());
  CHECK(back.name == s.name);
  CHECK(back.param("rho_mean", 0.0) == 2.0);
}
