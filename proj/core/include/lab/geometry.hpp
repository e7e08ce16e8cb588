#pragma once

// Shared small-vector types and helpers. Dimensions are 2 or 3 throughout,
// so all vectors/matrices are stack-allocated with a compile-time cap.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using VecI = Eigen::Matrix<int, Eigen::Dynamic, 1, 0, 3, 1>;

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

inline VecI veci2(int a, int b) {
  VecI v(2);
  v << a, b;
  return v;
}

inline VecI veci3(int a, int b, int c) {
  VecI v(3);
  v << a, b, c;
  return v;
}

inline Vec to_vec(const VecI& k) {
  Vec v(k.size());
  for (int i = 0; i < k.size(); ++i) v[i] = static_cast<double>(k[i]);
  return v;
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct Unavailable : Error {
  using Error::Error;
};

struct ConstructionError : Error {
  using Error::Error;
};

struct WindowOverflow : Error {
  using Error::Error;
};

struct RejectedForm : Error {
  using Error::Error;
};

// Uniform double in [0,1) from the top 53 bits; keeps sampling independent of
// libstdc++'s distribution internals.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Approximately standard normal (sum of uniforms is plenty for sampling use).
inline double gauss(std::mt19937_64& rng) {
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += u01(rng);
  return s - 6.0;
}

inline Vec random_unit_vector(std::mt19937_64& rng, int dim) {
  Vec v(dim);
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    n2 = v.squaredNorm();
  } while (n2 < 1e-12);
  return v / std::sqrt(n2);
}

// Deterministic unit-direction grids used for sampled duals, witness search
// and sampled norms. In 2D the grid starts at angle 0 so the coordinate axes
// are hit exactly; in 3D a Fibonacci sphere is used.
std::vector<Vec> direction_grid(int dim, int count);

inline constexpr int kDefaultDirections2D = 720;
inline constexpr int kDefaultDirectionsSphere = 2562;

inline int default_direction_count(int dim) {
  return dim <= 2 ? kDefaultDirections2D : kDefaultDirectionsSphere;
}

// Minimizes a convex function on [lo, hi] by golden-section search.
template <typename F>
double golden_minimize(F&& f, double lo, double hi, int iters = 80) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? f1 : f2;
}

}  // namespace lab
