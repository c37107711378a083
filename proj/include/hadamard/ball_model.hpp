#pragma once

#include "hadamard/points.hpp"

namespace hadamard {

// Ball model of hyperbolic n-space with constant curvature -a^2. All
// formulas are evaluated at curvature -1 on the rescaled radius a*r.
class BallModel {
 public:
  BallModel(int n, double a);

  int dim() const { return n_; }
  double a() const { return a_; }
  // Volume entropy h = (n - 1) a.
  double entropy() const { return (n_ - 1) * a_; }

  double distance(const Point& x, const Point& y) const;
  Point exp_map(const Point& x, const Vec& v, double t) const;
  Vec direction_to(const Point& x, const Point& y) const;
  Vec direction_to(const Point& x, const BoundaryPoint& xi) const;

  // B(o, x, xi) = -(1/a) log(e^{-a r} + 2 sinh(a r) sin^2(theta/2)).
  double busemann_from_origin(const Point& x, const BoundaryPoint& xi) const;

 private:
  int n_;
  double a_;
};

}  // namespace hadamard
