#include "hadamard/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "hadamard/errors.hpp"

namespace hadamard {
namespace {

constexpr double kCollinear = 1e-9;

double log_sinh(double x) {
  if (x > 20.0) return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

IdealEstimate settle(double at_t, double at_2t, double tol, const char* what) {
  IdealEstimate e{at_2t, at_t, std::abs(at_2t - at_t), false};
  if (e.error > tol) throw PrecisionError(what, at_t, at_2t);
  return e;
}

void check_truncation(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("truncation length must be positive");
}

}  // namespace

double default_truncation(const ModelSpace& space) { return 30.0 / space.bounds().a; }

double gromov_product(const ModelSpace& space, const Point& x, const Point& y, const Point& z) {
  const double g = 0.5 * (space.distance(x, y) + space.distance(x, z) - space.distance(y, z));
  return std::max(g, 0.0);
}

IdealEstimate gromov_product_ideal(const ModelSpace& space, const Point& x, const Target& p,
                                   const BoundaryPoint& xi, double T, double tol) {
  check_truncation(T);
  const GeodesicRay to_xi = space.ray_to_boundary(x, xi);
  if (const auto* eta = std::get_if<BoundaryPoint>(&p)) {
    if (eta->dir == xi.dir) return {std::numeric_limits<double>::infinity(), 0.0, 0.0, true};
    const GeodesicRay to_eta = space.ray_to_boundary(x, *eta);
    auto at = [&](double t) {
      return std::max(t - 0.5 * space.distance(to_xi.at(t), to_eta.at(t)), 0.0);
    };
    return settle(at(T), at(2.0 * T), tol, "ideal Gromov product did not settle");
  }
  const Point& y = std::get<Point>(p);
  const double dxy = space.distance(x, y);
  auto at = [&](double t) {
    const double g = 0.5 * (dxy + t - space.distance(y, to_xi.at(t)));
    return std::clamp(g, 0.0, dxy);
  };
  return settle(at(T), at(2.0 * T), tol, "ideal Gromov product did not settle");
}

IdealEstimate busemann(const ModelSpace& space, const Point& x, const Point& y,
                       const BoundaryPoint& xi, double T, double tol) {
  check_truncation(T);
  if (same_point(x, y)) return {};
  auto at = [&](double t) {
    const Point z = Point::polar(t, xi.dir);
    return space.distance(x, z) - space.distance(y, z);
  };
  return settle(at(T), at(2.0 * T), tol, "Busemann limit did not settle");
}

std::pair<double, double> busemann_gromov_identity_slack(const ModelSpace& space, const Point& x,
                                                         const BoundaryPoint& xi, double T) {
  if (x.is_origin()) return {0.0, 0.0};
  const Point o = Point::origin();
  const double B = busemann(space, o, x, xi, T).value;
  const double d = space.distance(o, x);
  const double g_ox = gromov_product_ideal(space, x, Target{o}, xi, T).value;
  const double g_xo = gromov_product_ideal(space, o, Target{x}, xi, T).value;
  return {B - (d - 2.0 * g_ox), B - (-d + 2.0 * g_xo)};
}

double comparison_angle(double d1, double d2, double d12, double rate) {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(rate > 0.0)) {
    throw DomainError("comparison angle needs positive sides and rate");
  }
  const double gap = std::abs(d1 - d2);
  const double slack = 1e-12 * (d1 + d2);
  if (d12 < gap - slack || d12 > d1 + d2 + slack) {
    throw DomainError("side lengths violate the triangle inequality");
  }
  d12 = std::clamp(d12, gap, d1 + d2);
  // cosh A - cosh B = 2 sinh((A+B)/2) sinh((A-B)/2), in log space.
  const double hi = 0.5 * rate * (d12 + gap);
  const double lo = 0.5 * rate * (d12 - gap);
  if (lo <= 0.0) return 0.0;
  const double log_s2 = log_sinh(hi) + log_sinh(lo) - log_sinh(rate * d1) - log_sinh(rate * d2);
  const double s = std::sqrt(std::min(1.0, std::exp(log_s2)));
  return 2.0 * std::asin(s);
}

SlackTerms lemma41_terms(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                         const BoundaryPoint& eta, double T) {
  const double b = space.bounds().b;
  const double theta = space.riemannian_angle(x, Target{xi}, Target{eta});
  const IdealEstimate g = gromov_product_ideal(space, x, Target{eta}, xi, T);
  return {g.infinite ? 0.0 : std::exp(-b * g.value), std::sin(0.5 * theta)};
}

double lemma41_slack(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                     const BoundaryPoint& eta, double T) {
  return lemma41_terms(space, x, xi, eta, T).slack();
}

namespace {

struct TripleData {
  double theta;
  double d;
  double g;
};

std::optional<TripleData> triple(const ModelSpace& space, const Point& x, const Point& y,
                                 const BoundaryPoint& xi, double T) {
  const double theta = space.riemannian_angle(x, Target{y}, Target{xi});
  if (theta < kCollinear || theta > std::numbers::pi - kCollinear) return std::nullopt;
  const double d = space.distance(x, y);
  const double g = gromov_product_ideal(space, x, Target{y}, xi, T).value;
  return TripleData{theta, d, g};
}

}  // namespace

std::optional<SlackTerms> lemma42_terms(const ModelSpace& space, const Point& x, const Point& y,
                                        const BoundaryPoint& xi, double T) {
  const auto t = triple(space, x, y, xi, T);
  if (!t) return std::nullopt;
  const double b = space.bounds().b;
  const double s = std::sin(0.5 * t->theta);
  return SlackTerms{std::exp(-2.0 * b * t->g) - std::exp(-2.0 * b * t->d), s * s};
}

std::optional<SlackTerms> lemma43_terms(const ModelSpace& space, const Point& x, const Point& y,
                                        const BoundaryPoint& xi, double T) {
  const auto t = triple(space, x, y, xi, T);
  if (!t) return std::nullopt;
  const double a = space.bounds().a;
  const double s = std::sin(0.5 * t->theta);
  const double rhs = std::exp(-2.0 * a * t->d) * std::expm1(2.0 * a * (t->d - t->g)) /
                     -std::expm1(-2.0 * a * t->d);
  return SlackTerms{s * s, rhs};
}

std::optional<double> lemma42_slack(const ModelSpace& space, const Point& x, const Point& y,
                                    const BoundaryPoint& xi, double T) {
  const auto t = lemma42_terms(space, x, y, xi, T);
  return t ? std::optional<double>(t->slack()) : std::nullopt;
}

std::optional<double> lemma43_slack(const ModelSpace& space, const Point& x, const Point& y,
                                    const BoundaryPoint& xi, double T) {
  const auto t = lemma43_terms(space, x, y, xi, T);
  return t ? std::optional<double>(t->slack()) : std::nullopt;
}

double subtended_ball_angle(const ModelSpace& space, const Point& x, double radius) {
  if (!(radius >= 0.0)) throw DomainError("ball radius must be nonnegative");
  if (!(x.r > radius)) throw DomainError("ball must not contain the origin");
  if (radius == 0.0) return 0.0;
  if (space.is_ball()) {
    const double a = space.as_ball().a();
    return std::asin(std::sinh(a * radius) / std::sinh(a * x.r));
  }
  // Maximize the angle at o over the sphere S(x, radius); by reflection
  // symmetry half the sphere suffices.
  auto negative_angle = [&](double phi) {
    const Vec v = std::cos(phi) * x.dir + std::sin(phi) * rot90(x.dir);
    return -angle_between(x.dir, space.exp_map(x, v, radius).dir);
  };
  const auto [phi, value] =
      boost::math::tools::brent_find_minima(negative_angle, 0.0, std::numbers::pi, 40);
  (void)phi;
  return -value;
}

CapSpec CapSpec::make(const BoundaryPoint& center, double radius) {
  if (!(radius > 0.0) || radius > std::numbers::pi) throw DomainError("cap radius must lie in (0, pi]");
  return {center, radius};
}

bool cap_contains(const CapSpec& cap, const BoundaryPoint& eta) {
  return angle_between(cap.center.dir, eta.dir) <= cap.radius + 1e-12;
}

ConeSpec ConeSpec::make(const Point& vertex, const Vec& axis, double aperture,
                        std::optional<double> truncation) {
  if (!(aperture > 0.0) || !(aperture < std::numbers::pi)) {
    throw DomainError("cone aperture must lie in (0, pi)");
  }
  if (truncation && !(*truncation >= 0.0)) throw DomainError("cone truncation must be >= 0");
  return {vertex, normalized(axis), aperture, truncation};
}

bool cone_contains(const ModelSpace& space, const ConeSpec& cone, const Point& y) {
  if (same_point(cone.vertex, y)) return false;
  if (cone.truncation && space.distance(cone.vertex, y) < *cone.truncation) return false;
  return angle_between(cone.axis, space.direction_to(cone.vertex, Target{y})) < cone.aperture;
}

}  // namespace hadamard
