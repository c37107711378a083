#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace hadamard {

// Largest ambient dimension supported by the ball model.
inline constexpr int kMaxDim = 4;

// Fixed-capacity Euclidean vector. Components past the space's dimension
// are kept at zero, so every operation can run over the full capacity.
struct Vec {
  std::array<double, kMaxDim> c{};

  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  static constexpr Vec axis(int i, double value = 1.0) {
    Vec v;
    v[i] = value;
    return v;
  }
  static constexpr Vec planar(double x, double y) {
    Vec v;
    v[0] = x;
    v[1] = y;
    return v;
  }

  constexpr Vec& operator+=(const Vec& o) {
    for (int i = 0; i < kMaxDim; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (int i = 0; i < kMaxDim; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec&, const Vec&) = default;
};

constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
constexpr Vec operator*(Vec a, double s) { return a *= s; }
constexpr Vec operator*(double s, Vec a) { return a *= s; }
constexpr Vec operator-(Vec a) { return a *= -1.0; }

constexpr double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) {
  const double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : a;
}

// Rotation by +pi/2 in the first coordinate plane.
constexpr Vec rot90(const Vec& a) { return Vec::planar(-a[1], a[0]); }

// z-component of the planar cross product.
constexpr double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

// Angle between unit vectors, accurate near 0 and pi.
inline double angle_between(const Vec& u, const Vec& v) {
  return 2.0 * std::atan2(norm(u - v), norm(u + v));
}

// sin of half the angle between unit vectors (half the chord length).
inline double half_angle_sine(const Vec& u, const Vec& v) { return 0.5 * norm(u - v); }

}  // namespace hadamard
