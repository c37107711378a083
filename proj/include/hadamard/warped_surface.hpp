#pragma once

#include <memory>

#include "hadamard/points.hpp"
#include "hadamard/warping.hpp"

namespace hadamard {

// Rotationally symmetric surface dr^2 + f(r)^2 dphi^2. Geodesics are
// obtained from Clairaut's first integral f(r) sin(psi) = L, where psi is the
// angle to the outward radial direction, by quadrature of the orbit
// equations; boundary value problems shoot on psi.
class WarpedSurface {
 public:
  explicit WarpedSurface(std::shared_ptr<const WarpingTable> table);

  const WarpingTable& table() const { return *table_; }
  std::shared_ptr<const WarpingTable> table_ptr() const { return table_; }
  double a() const { return table_->profile().a; }
  double b() const { return table_->profile().b; }

  struct Segment {
    double length;
    Vec start_dir;  // unit tangent at x toward y
    Vec end_dir;    // unit tangent at y toward x
  };
  Segment segment(const Point& x, const Point& y) const;

  double distance(const Point& x, const Point& y) const { return segment(x, y).length; }
  Point exp_map(const Point& x, const Vec& v, double t) const;
  Vec direction_to(const Point& x, const Point& y) const;
  Vec direction_to(const Point& x, const BoundaryPoint& xi) const;

  // Geodesic step of length t by RK4 on the geodesic equation in normal
  // coordinates p = r * dir, using `substeps` equal substeps. Much cheaper
  // than exp_map for short steps; local error O(t^5).
  Point local_step(const Point& x, const Vec& v, double t, int substeps = 1) const;

  // Minimum over t >= 0 of the radius along the geodesic from x with
  // initial direction v.
  double min_radius(const Point& x, const Vec& v) const;

 private:
  struct Orbit {
    double L;      // Clairaut constant f(r) sin(psi)
    double r_min;  // closest approach to the pole
    double taylor[4];
  };
  Orbit make_orbit(double r0, double sin_psi, double cos_psi) const;
  // Integrals from r_min of the arclength excess and the angle, evaluated at
  // ascending radii (+infinity allowed for the total angle).
  void integrate(const Orbit& orbit, const double* radii, int count, double* excess,
                 double* angle) const;
  double cutoff_radius(double L) const;
  double f_minus(const Orbit& orbit, double r, double f) const;
  // Angle swept from radius r0 (launched at psi) to radius r1 >= r0.
  double swept_angle(double r0, double r1, double psi) const;

  std::shared_ptr<const WarpingTable> table_;
  double f3_ = 0.0;  // f = r + f3 r^3 + f5 r^5 + ...
  double f5_ = 0.0;
};

}  // namespace hadamard
