#include "hadamard/ball_model.hpp"

#include <cmath>

#include "hadamard/errors.hpp"

namespace hadamard {

BallModel::BallModel(int n, double a) : n_(n), a_(a) {
  if (n < 2 || n > kMaxDim) throw DomainError("ball model dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("curvature rate a must be positive");
}

double BallModel::distance(const Point& x, const Point& y) const {
  const double r1 = a_ * x.r;
  const double r2 = a_ * y.r;
  const double s = half_angle_sine(x.dir, y.dir);
  const double sh = std::sinh(0.5 * (r1 - r2));
  const double q = sh * sh + std::sinh(r1) * std::sinh(r2) * s * s;
  return 2.0 * std::asinh(std::sqrt(q)) / a_;
}

Point BallModel::exp_map(const Point& x, const Vec& v, double t) const {
  if (t < 0.0) throw DomainError("exp_map needs t >= 0");
  if (t == 0.0) return x;
  const double T = a_ * t;
  if (x.is_origin()) return Point::polar(t, normalized(v));
  const double R = a_ * x.r;
  const double c = dot(v, x.dir);
  const Vec perp = v - c * x.dir;
  const double shT = std::sinh(T);
  const double chT = std::cosh(T);
  // Spatial part of the hyperboloid point, split along dir and perp.
  const double along = std::sinh(R) * chT + std::cosh(R) * shT * c;
  const Vec spatial = along * x.dir + shT * perp;
  const double sh_new = norm(spatial);
  if (sh_new == 0.0) return Point::origin();
  return Point::polar(std::asinh(sh_new) / a_, spatial * (1.0 / sh_new));
}

Vec BallModel::direction_to(const Point& x, const Point& y) const {
  if (same_point(x, y)) throw DegenerateAngle("direction to the base point is undefined");
  if (x.is_origin()) return y.dir;
  const double R = a_ * x.r;
  const double R2 = a_ * y.r;
  const double s = half_angle_sine(x.dir, y.dir);
  // Tangent of the hyperboloid geodesic, divided by sinh R2.
  double radial;
  Vec perp;
  if (y.is_origin()) {
    return -x.dir;
  }
  radial = std::sinh(R2 - R) / std::sinh(R2) - 2.0 * std::cosh(R) * s * s;
  perp = y.dir - dot(x.dir, y.dir) * x.dir;
  return normalized(radial * x.dir + perp);
}

Vec BallModel::direction_to(const Point& x, const BoundaryPoint& xi) const {
  if (x.is_origin()) return xi.dir;
  const double R = a_ * x.r;
  const double s = half_angle_sine(x.dir, xi.dir);
  const double radial = std::exp(-R) - 2.0 * std::cosh(R) * s * s;
  const Vec perp = xi.dir - dot(x.dir, xi.dir) * x.dir;
  return normalized(radial * x.dir + perp);
}

double BallModel::busemann_from_origin(const Point& x, const BoundaryPoint& xi) const {
  const double R = a_ * x.r;
  const double s = half_angle_sine(x.dir, xi.dir);
  return -std::log(std::exp(-R) + 2.0 * std::sinh(R) * s * s) / a_;
}

}  // namespace hadamard
