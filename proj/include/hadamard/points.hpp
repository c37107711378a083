#pragma once

#include <cmath>
#include <numbers>
#include <variant>

#include "hadamard/vec.hpp"

namespace hadamard {

struct CurvatureBounds {
  double a = 1.0;
  double b = 1.0;

  static CurvatureBounds make(double a, double b);
};

// Interior point stored in geodesic polar coordinates about the origin o:
// r = d(o, x) and the unit direction of the ray from o through x. Polar
// storage keeps full precision at radii where Poincare-ball coordinates
// would round to the unit sphere.
struct Point {
  double r = 0.0;
  Vec dir = Vec::axis(0);

  static Point origin() { return {}; }
  static Point polar(double r, const Vec& dir);
  // Surface polar coordinates (r, phi).
  static Point surface(double r, double phi) {
    return polar(r, Vec::planar(std::cos(phi), std::sin(phi)));
  }
  // Poincare-ball coordinate u (|u| < 1) of the ball model with curvature -a^2.
  static Point from_ball_coords(const Vec& u, double a);
  Vec ball_coords(double a) const;

  bool is_origin() const { return r == 0.0; }
  // Angle of dir in [0, 2pi); meaningful for the surface.
  double angle() const;
};

bool same_point(const Point& x, const Point& y);

// Ideal point, identified with the initial direction at o of the ray from
// o converging to it.
struct BoundaryPoint {
  Vec dir = Vec::axis(0);

  static BoundaryPoint from_direction(const Vec& v);
  static BoundaryPoint from_angle(double phi) {
    return {Vec::planar(std::cos(phi), std::sin(phi))};
  }
  double angle() const;
};

using Target = std::variant<Point, BoundaryPoint>;

// Reduces an angle to [0, 2pi).
inline double reduce_angle(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) phi += two_pi;
  return phi >= two_pi ? 0.0 : phi;
}

}  // namespace hadamard
