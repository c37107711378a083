#include "hadamard/warped_surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "hadamard/errors.hpp"

namespace hadamard {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kPi = std::numbers::pi;

struct GaussRule {
  std::array<double, 10> x{};
  std::array<double, 10> w{};
  GaussRule() {
    using Rule = boost::math::quadrature::gauss<double, 10>;
    const auto& abs = Rule::abscissa();
    const auto& wts = Rule::weights();
    for (std::size_t i = 0; i < 5; ++i) {
      x[2 * i] = -abs[i];
      x[2 * i + 1] = abs[i];
      w[2 * i] = wts[i];
      w[2 * i + 1] = wts[i];
    }
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule rule;
  return rule;
}

template <class F>
double bracket_root(F&& fn, double lo, double hi, double flo, double fhi, const char* what) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::uintmax_t iterations = kMaxIterations;
  const auto [x0, x1] = boost::math::tools::toms748_solve(
      fn, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iterations);
  if (iterations >= static_cast<boost::uintmax_t>(kMaxIterations)) throw SolverFailure(what, x0, x1);
  return 0.5 * (x0 + x1);
}

Vec rotate(const Vec& u, double phi) { return std::cos(phi) * u + std::sin(phi) * rot90(u); }

// Launch angle psi in [0, pi] from the outward radial direction, and the
// rotation sense of v about the pole.
struct Launch {
  double psi;
  double sense;
};

Launch launch_of(const Vec& dir, const Vec& v) {
  const double c = dot(v, dir);
  const double s = cross2(dir, v);
  return {std::atan2(std::abs(s), c), s < 0.0 ? -1.0 : 1.0};
}

}  // namespace

WarpedSurface::WarpedSurface(std::shared_ptr<const WarpingTable> table) : table_(std::move(table)) {
  if (!table_) throw DomainError("warped surface needs a warping table");
  const auto& K = table_->profile();
  const double k0 = K(0.0);
  const double h = 1e-3;
  const double k2 = (K(h) - k0) / (h * h);
  f3_ = -k0 / 6.0;
  f5_ = (k0 * k0 / 6.0 - k2) / 20.0;
}

WarpedSurface::Orbit WarpedSurface::make_orbit(double r0, double sin_psi, double cos_psi) const {
  const WarpingTable& t = *table_;
  const auto jet0 = t.eval(r0);
  Orbit o{};
  o.L = jet0.f * sin_psi;
  if (sin_psi < 0.5) {
    o.r_min = t.inverse_f(o.L);
  } else {
    // f(r0) - f(r_min) = f(r0) cos^2(psi) / (1 + sin(psi)), free of cancellation.
    const double drop = jet0.f * cos_psi * cos_psi / (1.0 + sin_psi);
    double delta = drop / jet0.fprime;
    for (int i = 0; i < 60; ++i) {
      const auto jet = t.eval(std::max(r0 - delta, 0.0));
      const double step = (jet0.f - jet.f - drop) / jet.fprime;
      delta = std::min(delta - step, r0);
      if (std::abs(step) <= 1e-16 * (1.0 + delta)) break;
    }
    o.r_min = std::max(r0 - delta, 0.0);
  }
  const auto& K = t.profile();
  const double rm = o.r_min;
  const double hk = 1e-4;
  const double k0 = K(rm);
  const double k1 = K.derivative(rm);
  const double k2 = (K(rm + hk) - 2.0 * k0 + K(rm - hk)) / (hk * hk);
  const double d1 = t.fprime(rm);
  const double d2 = -k0 * o.L;
  const double d3 = -k1 * o.L - k0 * d1;
  const double d4 = -k2 * o.L - 2.0 * k1 * d1 - k0 * d2;
  o.taylor[0] = d1;
  o.taylor[1] = d2 / 2.0;
  o.taylor[2] = d3 / 6.0;
  o.taylor[3] = d4 / 24.0;
  return o;
}

double WarpedSurface::f_minus(const Orbit& o, double r, double f) const {
  const double delta = r - o.r_min;
  if (delta < 1e-2 / b()) {
    const double* c = o.taylor;
    return delta * (c[0] + delta * (c[1] + delta * (c[2] + delta * c[3])));
  }
  return f - o.L;
}

double WarpedSurface::cutoff_radius(double L) const {
  const double target = 1e12 * std::max(L, 1.0);
  if (target >= table_->node_f(table_->size() - 1)) return table_->r_max();
  return table_->inverse_f(target);
}

void WarpedSurface::integrate(const Orbit& o, const double* radii, int count, double* excess,
                              double* angle) const {
  const GaussRule& g = gauss_rule();
  const double L = o.L;
  const double r_cut = cutoff_radius(L);
  const double w_max = 0.5 / b();
  const double w_in = std::min(o.r_min, w_max) > 0.0 ? std::min(o.r_min, w_max) : w_max;
  const double inner_end = o.r_min + w_in;

  auto accumulate = [&](double r, double weight, double& acc_e, double& acc_a) {
    const double f = table_->f(r);
    const double d = f_minus(o, r, f);
    if (!(d > 0.0)) return;
    const double s = std::sqrt(d * (f + L));
    acc_e += weight * L * L / (s * (f + s));
    acc_a += weight * L / (f * s);
  };

  double acc_e = 0.0;
  double acc_a = 0.0;
  double pos = o.r_min;
  int k = 0;
  while (k < count) {
    const double target = std::min(radii[k], r_cut);
    if (pos >= target) {
      excess[k] = acc_e;
      angle[k] = acc_a;
      ++k;
      continue;
    }
    const double width = std::clamp(pos - o.r_min, w_in, w_max);
    double next = std::min(pos + width, target);
    if (pos < inner_end) {
      next = std::min(next, inner_end);
      // r = r_min + s^2 removes the inverse square-root endpoint behaviour.
      const double sa = std::sqrt(pos - o.r_min);
      const double sb = std::sqrt(next - o.r_min);
      const double half = 0.5 * (sb - sa);
      const double mid = 0.5 * (sb + sa);
      for (std::size_t i = 0; i < 10; ++i) {
        const double s = mid + half * g.x[i];
        accumulate(o.r_min + s * s, g.w[i] * half * 2.0 * s, acc_e, acc_a);
      }
    } else {
      const double half = 0.5 * (next - pos);
      const double mid = 0.5 * (next + pos);
      for (std::size_t i = 0; i < 10; ++i) {
        accumulate(mid + half * g.x[i], g.w[i] * half, acc_e, acc_a);
      }
    }
    pos = next;
  }
}

double WarpedSurface::swept_angle(double r0, double r1, double psi) const {
  if (psi <= 0.0) return 0.0;
  if (psi >= kPi) return kPi;
  const double sp = std::sin(psi);
  const double cp = std::cos(psi);
  const Orbit o = make_orbit(r0, sp, cp);
  const double radii[2] = {r0, r1};
  double ex[2];
  double an[2];
  integrate(o, radii, 2, ex, an);
  return cp >= 0.0 ? an[1] - an[0] : an[1] + an[0];
}

WarpedSurface::Segment WarpedSurface::segment(const Point& x, const Point& y) const {
  if (same_point(x, y)) return {0.0, Vec{}, Vec{}};
  if (x.is_origin()) return {y.r, y.dir, -y.dir};
  if (y.is_origin()) return {x.r, -x.dir, x.dir};

  const bool swapped = y.r < x.r;
  const Point& near = swapped ? y : x;
  const Point& far = swapped ? x : y;
  const double delta = std::atan2(cross2(near.dir, far.dir), dot(near.dir, far.dir));
  Segment seg{};
  if (delta == 0.0) {
    seg = {far.r - near.r, near.dir, -far.dir};
  } else if (std::abs(delta) == kPi) {
    seg = {near.r + far.r, -near.dir, -far.dir};
  } else {
    const double sense = delta < 0.0 ? -1.0 : 1.0;
    const double target = std::abs(delta);
    auto phi = [&](double psi) { return swept_angle(near.r, far.r, psi) - target; };
    const double psi = bracket_root(phi, 0.0, kPi, -target, kPi - target,
                                    "geodesic shooting did not converge");
    const double sp = std::sin(psi);
    const double cp = std::cos(psi);
    const Orbit o = make_orbit(near.r, sp, cp);
    const double radii[2] = {near.r, far.r};
    double ex[2];
    double an[2];
    integrate(o, radii, 2, ex, an);
    const double length = cp >= 0.0 ? (far.r - near.r) + ex[1] - ex[0]
                                    : (far.r - o.r_min) + (near.r - o.r_min) + ex[1] + ex[0];
    const double f1 = table_->f(far.r);
    const double d1 = f_minus(o, far.r, f1);
    const double radial = std::sqrt(std::max(d1, 0.0) * (f1 + o.L)) / f1;
    const Vec arrive = radial * far.dir + (sense * o.L / f1) * rot90(far.dir);
    seg = {length, cp * near.dir + (sense * sp) * rot90(near.dir), -normalized(arrive)};
  }
  if (swapped) std::swap(seg.start_dir, seg.end_dir);
  return seg;
}

Vec WarpedSurface::direction_to(const Point& x, const Point& y) const {
  if (same_point(x, y)) throw DegenerateAngle("direction to the base point is undefined");
  return segment(x, y).start_dir;
}

Vec WarpedSurface::direction_to(const Point& x, const BoundaryPoint& xi) const {
  if (x.is_origin()) return xi.dir;
  const double delta = std::atan2(cross2(x.dir, xi.dir), dot(x.dir, xi.dir));
  if (delta == 0.0) return x.dir;
  if (std::abs(delta) == kPi) return -x.dir;
  const double sense = delta < 0.0 ? -1.0 : 1.0;
  const double target = std::abs(delta);
  const double inf = std::numeric_limits<double>::infinity();
  auto phi = [&](double psi) { return swept_angle(x.r, inf, psi) - target; };
  const double psi = bracket_root(phi, 0.0, kPi, -target, kPi - target,
                                  "ray shooting did not converge");
  return std::cos(psi) * x.dir + (sense * std::sin(psi)) * rot90(x.dir);
}

Point WarpedSurface::exp_map(const Point& x, const Vec& v, double t) const {
  if (t < 0.0) throw DomainError("exp_map needs t >= 0");
  if (t == 0.0) return x;
  if (x.is_origin()) return Point::polar(t, normalized(v));
  const Launch launch = launch_of(x.dir, v);
  const double sp = std::sin(launch.psi);
  const double cp = std::cos(launch.psi);
  if (sp == 0.0) {
    if (cp > 0.0) return Point::polar(x.r + t, x.dir);
    if (t <= x.r) return Point::polar(x.r - t, x.dir);
    return Point::polar(t - x.r, -x.dir);
  }
  const Orbit o = make_orbit(x.r, sp, cp);
  auto arclength = [&](double r) {
    double ex;
    double an;
    integrate(o, &r, 1, &ex, &an);
    return (r - o.r_min) + ex;
  };
  const double base = arclength(x.r);
  double lo;
  double hi;
  double target;
  bool outgoing_leg = true;
  if (cp >= 0.0) {
    target = base + t;
    lo = x.r;
    hi = x.r + t;
  } else if (t <= base) {
    target = base - t;
    lo = o.r_min;
    hi = x.r;
    outgoing_leg = false;
  } else {
    target = t - base;
    lo = o.r_min;
    hi = o.r_min + target;
  }
  if (hi > table_->r_max()) throw DomainError("geodesic leaves the tabulated warping range");
  // Solve in s = sqrt(r - r_min): the swept angle is smooth in s but not in r.
  auto residual = [&](double s) { return arclength(o.r_min + s * s) - target; };
  const double slo = std::sqrt(lo - o.r_min);
  const double shi = std::sqrt(hi - o.r_min);
  const double sr = bracket_root(residual, slo, shi, residual(slo), residual(shi),
                                 "exp_map inversion did not converge");
  const double r = o.r_min + sr * sr;
  const double radii[2] = {std::min(r, x.r), std::max(r, x.r)};
  double ex[2];
  double an[2];
  integrate(o, radii, 2, ex, an);
  const double a_r = r <= x.r ? an[0] : an[1];
  const double a_x = r <= x.r ? an[1] : an[0];
  double swept;
  if (cp >= 0.0) {
    swept = a_r - a_x;
  } else if (!outgoing_leg) {
    swept = a_x - a_r;
  } else {
    swept = a_x + a_r;
  }
  return Point::polar(r, rotate(x.dir, launch.sense * swept));
}

double WarpedSurface::min_radius(const Point& x, const Vec& v) const {
  if (x.is_origin()) return 0.0;
  const Launch launch = launch_of(x.dir, v);
  const double cp = std::cos(launch.psi);
  if (cp >= 0.0) return x.r;
  const double sp = std::sin(launch.psi);
  if (sp == 0.0) return 0.0;
  return make_orbit(x.r, sp, cp).r_min;
}

Point WarpedSurface::local_step(const Point& x, const Vec& v, double t, int substeps) const {
  if (t < 0.0) throw DomainError("step length must be nonnegative");
  if (t == 0.0) return x;
  const WarpingTable& tab = *table_;
  auto accel = [&](double px, double py, double qx, double qy, double& ax, double& ay) {
    const double r2 = px * px + py * py;
    if (r2 == 0.0) {
      ax = ay = 0.0;
      return;
    }
    const double r = std::sqrt(r2);
    double alpha;
    double beta;
    if (r < 1e-2) {
      alpha = 4.0 * f3_ + (6.0 * f5_ + 3.0 * f3_ * f3_) * r2;
      beta = -2.0 * f3_ - (4.0 * f5_ - 2.0 * f3_ * f3_) * r2;
    } else {
      const auto jet = tab.eval(r);
      alpha = (jet.f * jet.fprime - r) / (r2 * r);
      beta = (1.0 - r * jet.fprime / jet.f) / r2;
    }
    const double cr = px * qy - py * qx;
    const double dt = px * qx + py * qy;
    const double radial = alpha * cr * cr / r2;
    const double tangential = 2.0 * beta * dt * cr / r2;
    ax = radial * px - tangential * py;
    ay = radial * py + tangential * px;
  };

  double px = x.r * x.dir[0];
  double py = x.r * x.dir[1];
  double qx;
  double qy;
  if (x.is_origin()) {
    qx = v[0];
    qy = v[1];
  } else {
    const Vec& w = x.dir;
    const double c = dot(v, w);
    const double s = cross2(w, v) * x.r / tab.f(x.r);
    qx = c * w[0] - s * w[1];
    qy = c * w[1] + s * w[0];
  }
  const double h = t / substeps;
  for (int i = 0; i < substeps; ++i) {
    double a1x, a1y, a2x, a2y, a3x, a3y, a4x, a4y;
    accel(px, py, qx, qy, a1x, a1y);
    const double p2x = px + 0.5 * h * qx, p2y = py + 0.5 * h * qy;
    const double q2x = qx + 0.5 * h * a1x, q2y = qy + 0.5 * h * a1y;
    accel(p2x, p2y, q2x, q2y, a2x, a2y);
    const double p3x = px + 0.5 * h * q2x, p3y = py + 0.5 * h * q2y;
    const double q3x = qx + 0.5 * h * a2x, q3y = qy + 0.5 * h * a2y;
    accel(p3x, p3y, q3x, q3y, a3x, a3y);
    const double p4x = px + h * q3x, p4y = py + h * q3y;
    const double q4x = qx + h * a3x, q4y = qy + h * a3y;
    accel(p4x, p4y, q4x, q4y, a4x, a4y);
    px += h / 6.0 * (qx + 2.0 * q2x + 2.0 * q3x + q4x);
    py += h / 6.0 * (qy + 2.0 * q2y + 2.0 * q3y + q4y);
    qx += h / 6.0 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x);
    qy += h / 6.0 * (a1y + 2.0 * a2y + 2.0 * a3y + a4y);
  }
  const double r = std::hypot(px, py);
  if (r == 0.0) return Point::origin();
  return Point::polar(r, Vec::planar(px / r, py / r));
}

}  // namespace hadamard
