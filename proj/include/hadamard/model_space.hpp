#pragma once

#include <memory>
#include <string>
#include <variant>

#include "hadamard/ball_model.hpp"
#include "hadamard/points.hpp"
#include "hadamard/warped_surface.hpp"

namespace hadamard {

class GeodesicRay;

class ModelSpace {
 public:
  static ModelSpace ball(int n, double a);
  // r_max <= 0 selects the default table range 100/a.
  static ModelSpace warped(const CurvatureProfile& profile, double r_max = 0.0);
  static ModelSpace warped(std::shared_ptr<const WarpingTable> table);
  // Default variable-curvature surface: oscillating profile with a = 1, b = 2.
  static ModelSpace default_warped();

  bool is_ball() const { return std::holds_alternative<BallModel>(model_); }
  const BallModel& as_ball() const;
  const WarpedSurface& as_warped() const;

  int dim() const;
  CurvatureBounds bounds() const;
  // Stable identifier such as "ball(n=2,a=1)".
  std::string id() const;

  void validate(const Point& x) const;
  void validate(const BoundaryPoint& xi) const;

  double distance(const Point& x, const Point& y) const;
  Point exp_map(const Point& x, const Vec& v, double t) const;
  // Unit tangent at x of the geodesic toward a point or ideal point.
  Vec direction_to(const Point& x, const Target& p) const;
  GeodesicRay ray_to_boundary(const Point& x, const BoundaryPoint& xi) const;
  double riemannian_angle(const Point& x, const Target& p, const Target& q) const;

 private:
  explicit ModelSpace(std::variant<BallModel, WarpedSurface> model) : model_(std::move(model)) {}
  std::variant<BallModel, WarpedSurface> model_;
};

class GeodesicRay {
 public:
  GeodesicRay(ModelSpace space, Point base, Vec direction)
      : space_(std::move(space)), base_(base), direction_(direction) {}

  const Point& base() const { return base_; }
  const Vec& direction() const { return direction_; }
  Point at(double t) const { return space_.exp_map(base_, direction_, t); }

 private:
  ModelSpace space_;
  Point base_;
  Vec direction_;
};

double distance(const ModelSpace& space, const Point& x, const Point& y);
Point exp_map(const ModelSpace& space, const Point& x, const Vec& v, double t);
GeodesicRay ray_to_boundary(const ModelSpace& space, const Point& x, const BoundaryPoint& xi);
double riemannian_angle(const ModelSpace& space, const Point& x, const Target& p, const Target& q);

// Uniformly distributed unit vector built from dim() standard normals.
Vec unit_from_normals(int dim, const double* normals);

}  // namespace hadamard
