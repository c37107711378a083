#include "hadamard/points.hpp"

#include <cmath>

#include "hadamard/errors.hpp"

namespace hadamard {

CurvatureBounds CurvatureBounds::make(double a, double b) {
  if (!(a > 0.0) || !(b >= a) || !std::isfinite(b)) {
    throw DomainError("curvature bounds need 0 < a <= b");
  }
  return {a, b};
}

Point Point::polar(double r, const Vec& dir) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 0");
  const double n = norm(dir);
  if (!(n > 0.0)) throw DomainError("point direction must be nonzero");
  return {r, dir * (1.0 / n)};
}

Point Point::from_ball_coords(const Vec& u, double a) {
  const double len = norm(u);
  if (!(len < 1.0)) throw DomainError("ball coordinates must satisfy |u| < 1");
  if (len == 0.0) return origin();
  return {2.0 * std::atanh(len) / a, u * (1.0 / len)};
}

Vec Point::ball_coords(double a) const { return std::tanh(0.5 * a * r) * dir; }

double Point::angle() const { return reduce_angle(std::atan2(dir[1], dir[0])); }

bool same_point(const Point& x, const Point& y) {
  if (x.r != y.r) return false;
  return x.r == 0.0 || x.dir == y.dir;
}

BoundaryPoint BoundaryPoint::from_direction(const Vec& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("boundary direction must be nonzero");
  return {v * (1.0 / n)};
}

double BoundaryPoint::angle() const { return reduce_angle(std::atan2(dir[1], dir[0])); }

}  // namespace hadamard
