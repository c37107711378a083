#include "hadamard/poisson_kernel.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hadamard/errors.hpp"

namespace hadamard {

const char* to_string(KernelMethod method) {
  switch (method) {
    case KernelMethod::closed_form:
      return "closed_form";
    case KernelMethod::busemann_formula:
      return "busemann_formula";
    case KernelMethod::cap_ratio:
      return "cap_ratio";
  }
  return "unknown";
}

KernelValue exact_kernel_ball(int n, double a, const Point& x, const BoundaryPoint& xi) {
  const BallModel ball(n, a);
  const double v = std::exp(ball.entropy() * ball.busemann_from_origin(x, xi));
  return {v, KernelMethod::closed_form, 0.0, {v, v}};
}

KernelValue exact_kernel_ball(const ModelSpace& space, const Point& x, const BoundaryPoint& xi) {
  if (!space.is_ball()) throw UnsupportedSpace("closed-form kernel exists only on the ball model");
  return exact_kernel_ball(space.as_ball().dim(), space.as_ball().a(), x, xi);
}

KernelValue kernel_busemann_formula(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                                    double T) {
  if (!space.is_ball()) throw UnsupportedSpace("volume entropy is known only on the ball model");
  const double h = space.as_ball().entropy();
  const IdealEstimate B = busemann(space, Point::origin(), x, xi, T);
  const double v = std::exp(h * B.value);
  const double err = v * h * B.error;
  return {v, KernelMethod::busemann_formula, err, {v - err, v + err}};
}

std::pair<double, double> kernel_identity_slack(const ModelSpace& space, const Point& x,
                                                const BoundaryPoint& xi, double T) {
  if (!space.is_ball()) throw UnsupportedSpace("kernel identities need the closed-form kernel");
  if (x.is_origin()) return {0.0, 0.0};
  const double h = space.as_ball().entropy();
  const double logP = std::log(exact_kernel_ball(space, x, xi).value);
  const Point o = Point::origin();
  const double d = space.distance(o, x);
  const double g_ox = gromov_product_ideal(space, x, Target{o}, xi, T).value;
  const double g_xo = gromov_product_ideal(space, o, Target{x}, xi, T).value;
  return {logP - (-2.0 * h * g_ox + h * d), logP - (2.0 * h * g_xo - h * d)};
}

Envelopes theorem11_envelopes(double a, double K, double C, double d, double g_ox, double g_xo) {
  if (!(C >= 1.0)) throw DomainError("envelope constant C must be >= 1");
  if (!(K > 0.0)) throw DomainError("envelope rate K must be positive");
  return {std::exp(-2.0 * K * g_ox + a * d) / C, C * std::exp(2.0 * K * g_xo - a * d)};
}

std::vector<double> default_cap_schedule() {
  std::vector<double> s;
  for (int i = 0; i <= 8; ++i) s.push_back(std::numbers::pi * std::ldexp(1.0, -i));
  return s;
}

CapRatioEstimate estimate_kernel_cap_ratio(const EmpiricalMeasure& mu_x, const EmpiricalMeasure& mu_o,
                                           const BoundaryPoint& xi, const std::vector<double>& schedule,
                                           std::int64_t min_hits) {
  if (!mu_x.valid() || !mu_o.valid()) throw DomainError("cap ratio needs nonempty measures");
  if (mu_x.space_id != mu_o.space_id || mu_x.exit_radius != mu_o.exit_radius) {
    throw DomainError("cap ratio needs measures from one space and exit radius");
  }
  if (schedule.empty()) throw DomainError("cap schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) throw DomainError("cap schedule must be strictly decreasing");
  }
  CapRatioEstimate out;
  std::optional<std::size_t> last;
  std::optional<double> first_failure;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const CapSpec cap = CapSpec::make(xi, schedule[i]);
    const CapMass mx = cap_mass(mu_x, cap);
    const CapMass mo = cap_mass(mu_o, cap);
    CapRatioLevel level{schedule[i], mx.hits, mo.hits, std::nullopt};
    if (mx.hits > 0 && mo.hits > 0) {
      level.ratio = binomial_ratio(mx.hits, mx.walks, mo.hits, mo.walks);
    }
    if (mx.hits >= min_hits && mo.hits >= min_hits) {
      last = i;
    } else if (!first_failure) {
      first_failure = schedule[i];
    }
    out.levels.push_back(level);
  }
  if (!last) {
    throw InsufficientSamples("no cap holds enough hits in both measures", *first_failure);
  }
  out.used_level = *last;
  const RatioEstimate& r = *out.levels[*last].ratio;
  out.kernel = {r.ratio, KernelMethod::cap_ratio, r.ratio * r.log_se, r.ci};
  // Stabilization: compare with the previous qualifying level on the log scale.
  for (std::size_t j = *last; j-- > 0;) {
    const auto& prev = out.levels[j];
    if (prev.hits_x >= min_hits && prev.hits_o >= min_hits) {
      const RatioEstimate& p = *prev.ratio;
      const double gap = std::abs(std::log(r.ratio) - std::log(p.ratio));
      out.non_stabilized = gap > 3.0 * std::hypot(r.log_se, p.log_se);
      break;
    }
  }
  return out;
}

namespace {

double sphere_area(int k) {
  // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / boost::math::tgamma(0.5 * (k + 1));
}

template <class F>
double integrate(F&& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-13);
}

// Integrates over [lo, hi], splitting at `peak` when it lies inside.
template <class F>
double integrate_split(F&& f, double lo, double hi, double peak) {
  if (peak > lo && peak < hi) return integrate(f, lo, peak) + integrate(f, peak, hi);
  return integrate(f, lo, hi);
}

}  // namespace

double exact_cap_mass_ball(const ModelSpace& space, const Point& x, const CapSpec& cap,
                           bool complement) {
  const BallModel& ball = space.as_ball();
  const int n = ball.dim();
  const double a = ball.a();
  const double h = ball.entropy();
  const double R = a * x.r;
  const double pi = std::numbers::pi;
  const double e = std::exp(-R);
  const double s = std::sinh(R);
  // Kernel as a function of sin^2 of half the angle between eta and dir(x).
  auto kernel = [&](double half_sine_sq) { return std::pow(e + 2.0 * s * half_sine_sq, -h / a); };
  const double alpha = cap.radius;
  if (n == 2) {
    const double gamma = std::atan2(cross2(cap.center.dir, x.dir), dot(cap.center.dir, x.dir));
    auto f = [&](double t) {
      const double sh = std::sin(0.5 * (t - gamma));
      return kernel(sh * sh);
    };
    double m;
    if (complement) {
      const double g = gamma < 0.0 ? gamma + 2.0 * pi : gamma;
      m = integrate_split(f, alpha, 2.0 * pi - alpha, g);
    } else {
      m = integrate_split(f, -alpha, alpha, gamma);
    }
    return m / (2.0 * pi);
  }
  // Polar angle t from the cap centre, angle phi about the centre measured
  // from the plane containing dir(x).
  const double gamma = x.is_origin() ? 0.0 : angle_between(cap.center.dir, x.dir);
  const double sg = std::sin(gamma);
  auto inner = [&](double t) {
    const double st = std::sin(t);
    auto g = [&](double phi) {
      // sin^2(psi/2) = (1 - cos psi)/2 written without cancellation.
      const double sp = std::sin(0.5 * phi);
      const double st2 = std::sin(0.5 * (t - gamma));
      const double half_sq = st2 * st2 + st * sg * sp * sp;
      return std::pow(std::sin(phi), n - 3) * kernel(half_sq);
    };
    return std::pow(st, n - 2) * integrate(g, 0.0, pi);
  };
  const double lo = complement ? alpha : 0.0;
  const double hi = complement ? pi : alpha;
  const double weight = sphere_area(n - 3) / sphere_area(n - 1);
  return weight * integrate_split(inner, lo, hi, gamma);
}

}  // namespace hadamard
