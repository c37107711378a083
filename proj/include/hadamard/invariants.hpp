#pragma once

#include <limits>
#include <optional>
#include <utility>

#include "hadamard/model_space.hpp"

namespace hadamard {

// Default truncation length T = 30/a for ideal limits.
double default_truncation(const ModelSpace& space);

// A limit along a ray approximated at truncation T and checked at 2T.
struct IdealEstimate {
  double value = 0.0;     // iterate at 2T
  double at_t = 0.0;      // iterate at T
  double error = 0.0;     // |value - at_t|
  bool infinite = false;  // (xi|xi)_x = +infinity
};

// (y|z)_x = (d(x,y) + d(x,z) - d(y,z)) / 2.
double gromov_product(const ModelSpace& space, const Point& x, const Point& y, const Point& z);

// (p|xi)_x with ideal arguments replaced by the point at arclength T (and 2T)
// on the ray from x. Throws PrecisionError when the error exceeds tol.
IdealEstimate gromov_product_ideal(const ModelSpace& space, const Point& x, const Target& p,
                                   const BoundaryPoint& xi, double T,
                                   double tol = std::numeric_limits<double>::infinity());

// B(x, y, xi) = lim d(x,z) - d(y,z) with z on the ray from o to xi.
IdealEstimate busemann(const ModelSpace& space, const Point& x, const Point& y,
                       const BoundaryPoint& xi, double T,
                       double tol = std::numeric_limits<double>::infinity());

// Residuals B(o,x,xi) - (d(o,x) - 2(o|xi)_x) and B(o,x,xi) - (-d(o,x) + 2(x|xi)_o).
std::pair<double, double> busemann_gromov_identity_slack(const ModelSpace& space, const Point& x,
                                                         const BoundaryPoint& xi, double T);

// Angle opposite d12 in the triangle with sides d1, d2, d12 in the plane of
// curvature -rate^2.
double comparison_angle(double d1, double d2, double d12, double rate);

// Both sides of a lemma inequality arranged as lhs <= rhs.
struct SlackTerms {
  double lhs;
  double rhs;
  double slack() const { return rhs - lhs; }
};

SlackTerms lemma41_terms(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                         const BoundaryPoint& eta, double T);
std::optional<SlackTerms> lemma42_terms(const ModelSpace& space, const Point& x, const Point& y,
                                        const BoundaryPoint& xi, double T);
std::optional<SlackTerms> lemma43_terms(const ModelSpace& space, const Point& x, const Point& y,
                                        const BoundaryPoint& xi, double T);

// sin(theta/2) - e^{-b (xi|eta)_x}.
double lemma41_slack(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                     const BoundaryPoint& eta, double T);
// sin^2(theta/2) - (e^{-2b(y|xi)_x} - e^{-2b d(x,y)}); empty for collinear x, y, xi.
std::optional<double> lemma42_slack(const ModelSpace& space, const Point& x, const Point& y,
                                    const BoundaryPoint& xi, double T);
// (e^{-2a(y|xi)_x} - e^{-2a d}) / (1 - e^{-2a d}) - sin^2(theta/2); empty when collinear.
std::optional<double> lemma43_slack(const ModelSpace& space, const Point& x, const Point& y,
                                    const BoundaryPoint& xi, double T);

// Half-aperture at o of the smallest cone containing B(x, radius).
double subtended_ball_angle(const ModelSpace& space, const Point& x, double radius);

// Closed spherical cap of angular radius alpha in (0, pi] about center.
struct CapSpec {
  BoundaryPoint center;
  double radius;

  static CapSpec make(const BoundaryPoint& center, double radius);
};
bool cap_contains(const CapSpec& cap, const BoundaryPoint& eta);

// Open cone at vertex about axis, optionally truncated by the ball B(vertex, R).
struct ConeSpec {
  Point vertex;
  Vec axis;
  double aperture;
  std::optional<double> truncation;

  static ConeSpec make(const Point& vertex, const Vec& axis, double aperture,
                       std::optional<double> truncation = std::nullopt);
};
bool cone_contains(const ModelSpace& space, const ConeSpec& cone, const Point& y);

}  // namespace hadamard
