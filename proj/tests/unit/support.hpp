#pragma once

#include <cmath>
#include <random>

#include "hadamard/model_space.hpp"

namespace test {

using hadamard::Point;
using hadamard::Vec;

// Independent random source for property tests.
struct Rand {
  std::mt19937_64 gen;
  explicit Rand(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Vec direction(int dim) {
    std::normal_distribution<double> g;
    Vec v;
    double s = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = g(gen);
      s = hadamard::norm(v);
    } while (s < 1e-9);
    return (1.0 / s) * v;
  }
  Point point(int dim, double rho_max) { return Point::polar(uniform(0.0, rho_max), direction(dim)); }
};

// Poincare-ball coordinates of a point of the curvature -a^2 ball.
inline Vec ball_coords(const Point& x, double a) { return std::tanh(a * x.r / 2.0) * x.dir; }

// Closed-form ball distance from Euclidean ball coordinates.
inline double ball_distance(const Vec& u, const Vec& v, double a) {
  const Vec d = u - v;
  const double q = 2.0 * hadamard::dot(d, d) / ((1.0 - hadamard::dot(u, u)) * (1.0 - hadamard::dot(v, v)));
  return std::acosh(1.0 + q) / a;
}

}  // namespace test
