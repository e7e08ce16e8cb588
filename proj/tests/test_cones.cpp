#include <doctest.h>

#include "lab/cones.hpp"
#include "lab/json_io.hpp"

#include <cmath>
#include <random>

using namespace lab;

namespace {

const NormModel eu2 = NormModel::euclidean(2);
const NormModel eu3 = NormModel::euclidean(3);

PolyCone light_cone() { return conic_hull({vec2(1, 1), vec2(1, -1)}, eu2); }

Vec random_in_light_cone(std::mt19937_64& rng) {
  const double a = uniform(rng, 0.05, 10.0);
  const double b = a * uniform(rng, -1.0, 1.0);
  return vec2(a, b);
}

}  // namespace

TEST_CASE("conic_hull: 2D light cone reduces to extreme rays") {
  const PolyCone c = light_cone();
  REQUIRE(c.rays().size() == 2);
  const double s = 1.0 / std::sqrt(2.0);
  for (const auto& r : c.rays()) {
    CHECK(r[0] == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(r[1]) == doctest::Approx(s).epsilon(1e-12));
  }
  CHECK_FALSE(c.contains_line());
  CHECK_FALSE(c.is_zero());
}

TEST_CASE("conic_hull: single ray and opposite rays") {
  const PolyCone single = conic_hull({vec2(1, 0)}, eu2);
  CHECK(single.rays().size() == 1);
  CHECK_FALSE(single.contains_line());

  const PolyCone half = conic_hull({vec2(1, 0), vec2(-1, 0), vec2(0, 1)}, eu2);
  CHECK(half.contains_line());

  const PolyCone line = conic_hull({vec2(1, 0), vec2(-1, 0)}, eu2);
  CHECK(line.contains_line());
  CHECK(line.shape() == PolyCone::Shape::line);
}

TEST_CASE("conic_hull: degenerate inputs") {
  CHECK(conic_hull({}, eu2).is_zero());
  CHECK_THROWS_AS(conic_hull({vec2(0, 0)}, eu2), InvalidInput);
}

TEST_CASE("contains: light cone membership") {
  const PolyCone c = light_cone();
  CHECK(contains(c, vec2(1, 0), 0.0));
  CHECK_FALSE(contains(c, vec2(0, 1), 0.0));
  CHECK(contains(c, vec2(1, 1 + 1e-9), 1e-6));
  CHECK(contains(c, vec2(0, 0), 0.0));
  // invariance under positive scaling
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vec v = vec2(uniform(rng, -2, 2), uniform(rng, -2, 2));
    const double s = uniform(rng, 0.01, 100.0);
    CHECK(contains(c, v, 1e-6) == contains(c, Vec(s * v), 1e-6));
  }
}

TEST_CASE("dual_cone: 2D identities") {
  const PolyCone c = light_cone();
  const PolyCone d = dual_cone(c);
  // self-dual light cone
  REQUIRE(d.rays().size() == 2);
  for (const auto& r : d.rays()) CHECK(std::abs(r[0] - std::abs(r[1])) < 1e-12);

  const PolyCone ray = conic_hull({vec2(1, 0)}, eu2);
  const PolyCone dray = dual_cone(ray);
  CHECK(dray.shape() == PolyCone::Shape::halfplane);
  CHECK(contains(dray, vec2(0, 1), 0.0));
  CHECK(contains(dray, vec2(0, -1), 0.0));
  CHECK(contains(dray, vec2(1, 0), 0.0));
  CHECK_FALSE(contains(dray, vec2(-1, 0), 1e-9));

  // cone {a >= 1.5|b|} has generators (1.5, +-1); its dual is {1.5 a >= |b|}
  const PolyCone wide = conic_hull({vec2(1.5, 1), vec2(1.5, -1)}, eu2);
  const PolyCone dwide = dual_cone(wide);
  REQUIRE(dwide.rays().size() == 2);
  for (const auto& r : dwide.rays())
    CHECK(std::abs(r[1]) / r[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("dual_cone: zero cone dualizes to everything") {
  const PolyCone z = make_zero_cone(2);
  const PolyCone d = dual_cone(z);
  CHECK(d.contains_line());
  CHECK(contains(d, vec2(-3, 0.4), 0.0));
}

TEST_CASE("boundary_distance: light cone values") {
  const PolyCone c = light_cone();
  CHECK(boundary_distance(c, vec2(1, 0), eu2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(boundary_distance(c, vec2(1, 1), eu2) == doctest::Approx(0.0));
  bool outside = false;
  CHECK(boundary_distance(c, vec2(0, 1), eu2, &outside) == doctest::Approx(0.0));
  CHECK(outside);
  // positive homogeneity
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec v = random_in_light_cone(rng);
    const double lam = uniform(rng, 0.1, 5.0);
    CHECK(boundary_distance(c, Vec(lam * v), eu2) ==
          doctest::Approx(lam * boundary_distance(c, v, eu2)).epsilon(1e-9));
  }
}

TEST_CASE("boundary_distance: concavity and superadditivity on the cone") {
  const PolyCone c = light_cone();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const Vec u = random_in_light_cone(rng);
    const Vec w = random_in_light_cone(rng);
    const double du = boundary_distance(c, u, eu2);
    const double dw = boundary_distance(c, w, eu2);
    const double dmid = boundary_distance(c, Vec(0.5 * (u + w)), eu2);
    CHECK(dmid >= 0.5 * (du + dw) - 1e-9);
    const double dsum = boundary_distance(c, Vec(u + w), eu2);
    CHECK(dsum >= du + dw - 1e-9);
  }
}

TEST_CASE("epsilon_subcone: basic cases") {
  const PolyCone c = light_cone();
  const PolyCone same = epsilon_subcone(c, 0.0, eu2);
  CHECK(same.rays().size() == c.rays().size());
  CHECK(contains(same, vec2(1, 1), 1e-12));

  // eps = 1/sqrt(2) leaves exactly the central ray; (1,0) stays included
  const PolyCone central = epsilon_subcone(c, 1.0 / std::sqrt(2.0), eu2);
  CHECK_FALSE(central.is_zero());
  CHECK(contains(central, vec2(1, 0), 1e-6));
  CHECK_FALSE(contains(central, vec2(1, 0.5), 1e-6));

  const PolyCone nothing = epsilon_subcone(c, 2.0, eu2);
  CHECK(nothing.is_zero());
}

TEST_CASE("epsilon_subcone: convexity of the subcone") {
  const PolyCone c = light_cone();
  const PolyCone sub = epsilon_subcone(c, 0.3, eu2);
  std::mt19937_64 rng(19);
  int tried = 0;
  for (int i = 0; i < 100000 && tried < 10000; ++i) {
    const Vec u = random_in_light_cone(rng);
    const Vec w = random_in_light_cone(rng);
    if (!contains(sub, u, 1e-9) || !contains(sub, w, 1e-9)) continue;
    ++tried;
    CHECK(contains(sub, Vec(0.5 * (u + w)), 1e-9));
  }
  CHECK(tried == 10000);
}

TEST_CASE("epsilon_subcone: antitone in eps") {
  const PolyCone c = light_cone();
  const PolyCone s1 = epsilon_subcone(c, 0.2, eu2);
  const PolyCone s2 = epsilon_subcone(c, 0.5, eu2);
  for (const auto& r : s2.rays()) CHECK(contains(s1, r, 1e-9));
}

TEST_CASE("is_compact_cone: witness search") {
  const auto lc = is_compact_cone(light_cone());
  CHECK(lc.compact);
  CHECK(lc.witness[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lc.witness[1]) < 1e-12);
  CHECK(lc.margin == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const PolyCone half = conic_hull({vec2(1, 0), vec2(0, 1), vec2(0, -1)}, eu2);
  CHECK_FALSE(is_compact_cone(half).compact);

  CHECK(is_compact_cone(make_zero_cone(2)).compact);
}

TEST_CASE("dual of dual contains the generating rays") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec> rays;
    const int n = uniform_int(rng, 2, 6);
    const double mid = uniform(rng, 0.0, 2.0 * M_PI);
    const double spread = uniform(rng, 0.05, 1.2);
    for (int i = 0; i < n; ++i) {
      const double a = mid + uniform(rng, -spread, spread);
      rays.push_back(vec2(std::cos(a), std::sin(a)));
    }
    const PolyCone c = conic_hull(rays, eu2);
    const PolyCone dd = dual_cone(dual_cone(c));
    for (const auto& r : c.rays()) CHECK(exterior_distance(dd, r, eu2) <= 1e-9);
  }
}

TEST_CASE("sampled 3D cone: projection, boundary distance, dual") {
  // 45-degree circular cone around e0, sampled by a ring of null-like rays
  std::vector<Vec> rays;
  const int m = 256;
  for (int k = 0; k < m; ++k) {
    const double a = 2.0 * M_PI * k / m;
    rays.push_back(vec3(1.0, std::cos(a), std::sin(a)).normalized());
  }
  const PolyCone c = conic_hull(rays, eu3);
  CHECK(c.shape() == PolyCone::Shape::sampled);
  CHECK_FALSE(c.contains_line());

  CHECK(contains(c, vec3(1, 0, 0), 1e-6));
  CHECK(contains(c, vec3(2, 1, 1), 1e-3));
  CHECK_FALSE(contains(c, vec3(0.2, 1, 0), 1e-3));
  CHECK(exterior_distance(c, vec3(0, 1, 0), eu3) == doctest::Approx(std::sin(M_PI / 4)).epsilon(0.02));

  const double bd = boundary_distance(c, vec3(1, 0, 0), eu3);
  CHECK(bd == doctest::Approx(std::sin(M_PI / 4)).epsilon(0.02));

  const auto comp = is_compact_cone(c);
  CHECK(comp.compact);
  CHECK(comp.margin > 0.5);

  const PolyCone d = dual_cone(c);
  CHECK(contains(d, vec3(1, 0, 0), 1e-6));
  CHECK_FALSE(contains(d, vec3(0.1, 1.2, 0), 1e-3));

  // superadditivity holds for the sampled-functional distance as well
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    Vec u = vec3(1, 0, 0) + 0.6 * random_unit_vector(rng, 3);
    Vec w = vec3(1, 0, 0) + 0.6 * random_unit_vector(rng, 3);
    if (exterior_distance(c, u, eu3) > 1e-9 || exterior_distance(c, w, eu3) > 1e-9) continue;
    const double du = boundary_distance(c, u, eu3);
    const double dw = boundary_distance(c, w, eu3);
    CHECK(boundary_distance(c, Vec(u + w), eu3) >= du + dw - 1e-9);
  }
}

TEST_CASE("NormModel: sampled norm is a norm") {
  // unit ball samples of the sup-norm ball in 2D
  std::vector<Vec> ball;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * M_PI * k / 64;
    const Vec d = vec2(std::cos(a), std::sin(a));
    ball.push_back(d / std::max(std::abs(d[0]), std::abs(d[1])));
  }
  const NormModel n = NormModel::from_unit_ball_samples(2, ball);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    const Vec u = vec2(uniform(rng, -5, 5), uniform(rng, -5, 5));
    const Vec w = vec2(uniform(rng, -5, 5), uniform(rng, -5, 5));
    CHECK(n(u) == doctest::Approx(n(Vec(-u))).epsilon(1e-12));
    CHECK(n(Vec(u + w)) <= n(u) + n(w) + 1e-9);
  }
  // gauge of the sup-norm ball evaluates close to the sup norm
  CHECK(n(vec2(1, 0)) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(n(vec2(1, 1)) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(n.dual(vec2(1, 0)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("cone JSON round trip") {
  const PolyCone c = light_cone();
  const json j = c.to_json(eu2);
  const PolyCone back = PolyCone::from_json(j);
  CHECK(back.dim() == 2);
  REQUIRE(back.rays().size() == 2);
  CHECK(contains(back, vec2(1, 0.999), 1e-9));
  CHECK_FALSE(contains(back, vec2(1, 1.001), 1e-9));
  CHECK(make_zero_cone(2).to_json()["is_zero"].get<bool>());
}
