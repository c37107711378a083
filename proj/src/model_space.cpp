#include "hadamard/model_space.hpp"

#include <cmath>
#include <sstream>

#include "hadamard/errors.hpp"

namespace hadamard {

ModelSpace ModelSpace::ball(int n, double a) { return ModelSpace(BallModel(n, a)); }

ModelSpace ModelSpace::warped(const CurvatureProfile& profile, double r_max) {
  if (r_max <= 0.0) r_max = 100.0 / profile.a;
  return warped(std::make_shared<const WarpingTable>(solve_warping(profile, r_max)));
}

ModelSpace ModelSpace::warped(std::shared_ptr<const WarpingTable> table) {
  return ModelSpace(WarpedSurface(std::move(table)));
}

ModelSpace ModelSpace::default_warped() { return warped(oscillating_profile(1.0, 2.0)); }

const BallModel& ModelSpace::as_ball() const {
  if (const auto* m = std::get_if<BallModel>(&model_)) return *m;
  throw UnsupportedSpace("operation requires the ball model");
}

const WarpedSurface& ModelSpace::as_warped() const {
  if (const auto* m = std::get_if<WarpedSurface>(&model_)) return *m;
  throw UnsupportedSpace("operation requires the warped surface");
}

int ModelSpace::dim() const { return is_ball() ? as_ball().dim() : 2; }

CurvatureBounds ModelSpace::bounds() const {
  if (is_ball()) return {as_ball().a(), as_ball().a()};
  return {as_warped().a(), as_warped().b()};
}

std::string ModelSpace::id() const {
  std::ostringstream s;
  if (is_ball()) {
    s << "ball(n=" << as_ball().dim() << ",a=" << as_ball().a() << ")";
  } else {
    const auto& p = as_warped().table().profile();
    s << "warped(" << p.name << ",a=" << p.a << ",b=" << p.b << ")";
  }
  return s.str();
}

void ModelSpace::validate(const Point& x) const {
  if (!(x.r >= 0.0) || !std::isfinite(x.r)) throw DomainError("point radius must be finite and >= 0");
  if (std::abs(norm(x.dir) - 1.0) > 1e-12) throw DomainError("point direction must be a unit vector");
  for (int i = dim(); i < kMaxDim; ++i) {
    if (x.dir[i] != 0.0) throw DomainError("point has components beyond the space dimension");
  }
}

void ModelSpace::validate(const BoundaryPoint& xi) const {
  if (std::abs(norm(xi.dir) - 1.0) > 1e-12) throw DomainError("boundary point must be a unit vector");
  for (int i = dim(); i < kMaxDim; ++i) {
    if (xi.dir[i] != 0.0) throw DomainError("boundary point has components beyond the space dimension");
  }
}

double ModelSpace::distance(const Point& x, const Point& y) const {
  return std::visit([&](const auto& m) { return m.distance(x, y); }, model_);
}

Point ModelSpace::exp_map(const Point& x, const Vec& v, double t) const {
  if (std::abs(norm(v) - 1.0) > 1e-9) throw DomainError("exp_map needs a unit tangent");
  return std::visit([&](const auto& m) { return m.exp_map(x, v, t); }, model_);
}

Vec ModelSpace::direction_to(const Point& x, const Target& p) const {
  return std::visit(
      [&](const auto& m) { return std::visit([&](const auto& q) { return m.direction_to(x, q); }, p); },
      model_);
}

GeodesicRay ModelSpace::ray_to_boundary(const Point& x, const BoundaryPoint& xi) const {
  return GeodesicRay(*this, x, direction_to(x, xi));
}

double ModelSpace::riemannian_angle(const Point& x, const Target& p, const Target& q) const {
  const Vec u = direction_to(x, p);
  const Vec v = direction_to(x, q);
  return angle_between(u, v);
}

double distance(const ModelSpace& space, const Point& x, const Point& y) { return space.distance(x, y); }

Point exp_map(const ModelSpace& space, const Point& x, const Vec& v, double t) {
  return space.exp_map(x, v, t);
}

GeodesicRay ray_to_boundary(const ModelSpace& space, const Point& x, const BoundaryPoint& xi) {
  return space.ray_to_boundary(x, xi);
}

double riemannian_angle(const ModelSpace& space, const Point& x, const Target& p, const Target& q) {
  return space.riemannian_angle(x, p, q);
}

Vec unit_from_normals(int dim, const double* normals) {
  Vec v;
  for (int i = 0; i < dim; ++i) v[i] = normals[i];
  return normalized(v);
}

}  // namespace hadamard
