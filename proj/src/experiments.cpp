#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hadamard/errors.hpp"
#include "hadamard/harness.hpp"

namespace hadamard {
namespace {

constexpr double kPi = std::numbers::pi;

// Unit vector perpendicular to u in the plane of u and v (any perpendicular
// when they are parallel).
Vec perpendicular(const Vec& u, const Vec& v) {
  Vec p = v - dot(u, v) * u;
  if (norm(p) < 1e-12) {
    p = Vec::axis(std::abs(u[0]) < 0.9 ? 0 : 1);
    p = p - dot(u, p) * u;
  }
  return normalized(p);
}

Vec in_plane(const Vec& u, const Vec& perp, double phi) {
  return std::cos(phi) * u + std::sin(phi) * perp;
}

double log_kernel(const ModelSpace& space, const Point& x, const BoundaryPoint& xi) {
  const BallModel& ball = space.as_ball();
  return ball.entropy() * ball.busemann_from_origin(x, xi);
}

}  // namespace

std::vector<Point> lemma32_cone_points(const ModelSpace& space, const ConeSpec& cone,
                                       const Vec& toward, const std::vector<double>& distances) {
  const Vec perp = perpendicular(cone.axis, toward);
  const double half = cone.aperture / 8.0;
  std::vector<Point> out;
  for (double t : distances) {
    for (double f : {-0.999, -0.5, 0.0, 0.5, 0.999}) {
      const Point x = space.exp_map(cone.vertex, in_plane(cone.axis, perp, f * half), t);
      ConeSpec narrow = cone;
      narrow.aperture = half;
      if (cone_contains(space, narrow, x)) out.push_back(x);
    }
  }
  return out;
}

double lemma32_margin(const ModelSpace& space, const ConeSpec& cone, const BoundaryPoint& xi,
                      const std::vector<Point>& points) {
  const double a = space.bounds().a;
  const Vec to_xi = space.direction_to(cone.vertex, Target{xi});
  if (angle_between(cone.axis, to_xi) <= cone.aperture) {
    throw DomainError("kernel pole must lie outside the closed ideal cap of the cone");
  }
  if (points.empty()) throw DomainError("no sample points in the cone");
  const Point x0p = space.exp_map(cone.vertex, cone.axis, 1.0);
  const double log_p0 = log_kernel(space, x0p, xi);
  double m = -std::numeric_limits<double>::infinity();
  for (const Point& x : points) {
    m = std::max(m, log_kernel(space, x, xi) - log_p0 + a * space.distance(x, x0p));
  }
  return m;
}

Lemma32Fit lemma32_decay_fit(const ModelSpace& space, const std::vector<double>& theta_grid,
                             const std::vector<double>& distances) {
  if (!space.is_ball()) throw UnsupportedSpace("cone decay fit needs the closed-form kernel");
  Lemma32Fit out;
  const Point o = Point::origin();
  const Vec axis = Vec::axis(0);
  std::vector<double> log_inv;
  for (double theta0 : theta_grid) {
    const ConeSpec cone = ConeSpec::make(o, axis, theta0, 1.0);
    const BoundaryPoint xi{in_plane(axis, Vec::axis(1), 1.25 * theta0)};
    const auto points = lemma32_cone_points(space, cone, xi.dir, distances);
    out.theta0.push_back(theta0);
    out.margin.push_back(lemma32_margin(space, cone, xi, points));
    log_inv.push_back(std::log(1.0 / theta0));
  }
  out.fit = least_squares(log_inv, out.margin);
  out.c5 = out.fit.slope;
  double shift = 0.0;
  for (std::size_t i = 0; i < log_inv.size(); ++i) {
    shift = std::max(shift, out.margin[i] - (out.fit.intercept + out.c5 * log_inv[i]));
  }
  out.log_c4 = out.fit.intercept + shift;
  out.c4 = std::exp(out.log_c4);
  for (std::size_t i = 0; i < log_inv.size(); ++i) {
    if (out.margin[i] - (out.log_c4 + out.c5 * log_inv[i]) > 1e-9) ++out.positive_residuals;
  }
  const BoundaryPoint xi0{in_plane(axis, Vec::axis(1), 1.25 * theta_grid.front())};
  std::vector<double> t;
  std::vector<double> lp;
  const double tail = 0.5 * (distances.front() + distances.back());
  for (double d : distances) {
    if (d < tail) continue;
    t.push_back(d);
    lp.push_back(log_kernel(space, Point::polar(d, axis), xi0));
  }
  out.axis_slope = least_squares(t, lp).slope;
  return out;
}

StolzFit stolz_growth_check(const ModelSpace& space, const BoundaryPoint& xi, double c_prime,
                            const std::vector<double>& t_list) {
  if (t_list.size() < 2) throw FitFailure("growth fit needs at least two points");
  StolzFit out;
  const double T = default_truncation(space);
  for (double t : t_list) {
    const Point x = Point::polar(t, xi.dir);
    const double g = x.is_origin() ? 0.0
                                   : gromov_product_ideal(space, x, Target{Point::origin()}, xi, T).value;
    out.max_gromov = std::max(out.max_gromov, g);
    const double lp = std::log(exact_kernel_ball(space, x, xi).value);
    out.rho.push_back(t);
    out.log_p.push_back(lp);
    out.log_p_lo.push_back(lp);
    out.log_p_hi.push_back(lp);
  }
  if (out.max_gromov > c_prime) throw DomainError("sample points leave the Stolz angle");
  out.fit = least_squares(out.rho, out.log_p);
  out.threshold = space.bounds().a - 0.05;
  out.passed = out.fit.slope >= out.threshold;
  return out;
}

StolzFit stolz_growth_check_estimated(const ModelSpace& space, const BoundaryPoint& xi,
                                      double c_prime, const std::vector<double>& t_list,
                                      const WalkConfig& config, std::int64_t N, double T) {
  if (t_list.size() < 2) throw FitFailure("growth fit needs at least two points");
  StolzFit out;
  WalkConfig co = config;
  co.base_seed = derive_seed(config.base_seed, 1);
  const EmpiricalMeasure mu_o = harmonic_measure(space, Point::origin(), co, N);
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    const Point x = Point::polar(t_list[i], xi.dir);
    if (!x.is_origin()) {
      out.max_gromov = std::max(
          out.max_gromov, gromov_product_ideal(space, x, Target{Point::origin()}, xi, T).value);
    }
    WalkConfig cx = config;
    cx.base_seed = derive_seed(config.base_seed, 100 + i);
    const EmpiricalMeasure mu_x = harmonic_measure(space, x, cx, N);
    const auto est = estimate_kernel_cap_ratio(mu_x, mu_o, xi, default_cap_schedule());
    out.rho.push_back(t_list[i]);
    out.log_p.push_back(std::log(est.kernel.value));
    out.log_p_lo.push_back(std::log(est.kernel.ci.lo));
    out.log_p_hi.push_back(std::log(est.kernel.ci.hi));
  }
  if (out.max_gromov > c_prime) throw DomainError("sample points leave the Stolz angle");
  out.fit = least_squares(out.rho, out.log_p);
  out.threshold = space.bounds().a - 0.05;
  out.passed = out.fit.slope + 2.0 * out.fit.slope_se >= out.threshold;
  return out;
}

namespace {

struct GradientPass {
  double sup = 0.0;
  double radial_outer = 0.0;
  double origin = 0.0;
  int nodes = 0;
  int skipped = 0;
};

GradientPass gradient_pass(const ModelSpace& space, const BoundaryPoint& xi, double rho_max,
                           double step, int angles, double h) {
  const Vec perp = perpendicular(xi.dir, Vec::axis(1));
  auto log_p = [&](const Point& p) { return log_kernel(space, p, xi); };
  auto gradient = [&](const Point& x) {
    const Vec e1 = x.is_origin() ? xi.dir : x.dir;
    const Vec e2 = perpendicular(e1, x.is_origin() ? perp : in_plane(x.dir, perpendicular(x.dir, xi.dir), 1.0));
    double sq = 0.0;
    for (const Vec& e : {e1, e2}) {
      const double g = (log_p(space.exp_map(x, e, h)) - log_p(space.exp_map(x, -e, h))) / (2.0 * h);
      sq += g * g;
    }
    return std::sqrt(sq);
  };
  GradientPass out;
  const int radial = static_cast<int>(std::floor(rho_max / step + 1e-9));
  for (int k = 0; k <= radial; ++k) {
    const double r = k * step;
    const int count = k == 0 ? 1 : angles;
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / angles;
      const Point x = Point::polar(r, in_plane(xi.dir, perp, phi));
      const double g = gradient(x);
      if (!std::isfinite(g)) {
        ++out.skipped;
        continue;
      }
      ++out.nodes;
      out.sup = std::max(out.sup, g);
      if (k == 0) out.origin = g;
      if (k == radial && j == 0) out.radial_outer = g;
    }
  }
  return out;
}

}  // namespace

HarnackYauReport harnack_yau_check(const ModelSpace& space, const BoundaryPoint& xi, double rho_max,
                                   double rho_step, int angles, double h) {
  if (!space.is_ball()) throw UnsupportedSpace("gradient check needs the closed-form kernel");
  if (!(rho_step > 0.0) || !(rho_max > 0.0) || angles < 1 || !(h > 0.0)) {
    throw DomainError("invalid gradient grid");
  }
  const GradientPass coarse = gradient_pass(space, xi, rho_max, rho_step, angles, h);
  const GradientPass fine = gradient_pass(space, xi, rho_max, 0.5 * rho_step, 2 * angles, h);
  HarnackYauReport r;
  r.sup_gradient = coarse.sup;
  r.sup_refined = fine.sup;
  r.refinement_change = std::abs(fine.sup - coarse.sup) / coarse.sup;
  r.radial_large_rho = coarse.radial_outer;
  r.at_origin = coarse.origin;
  r.entropy = space.as_ball().entropy();
  r.nodes = coarse.nodes;
  r.skipped = coarse.skipped;
  return r;
}

HolderFunction HolderFunction::make(std::vector<Term> terms, double beta, double offset) {
  if (!(beta > 0.0) || beta > 1.0) throw DomainError("Holder exponent must lie in (0, 1]");
  double negative = 0.0;
  for (const auto& t : terms) negative += std::max(0.0, -t.coefficient);
  if (!(offset - negative * std::pow(kPi, beta) > 0.0)) {
    throw DomainError("Holder function must be positive");
  }
  return {std::move(terms), beta, offset};
}

double HolderFunction::operator()(const BoundaryPoint& eta) const {
  double v = offset;
  for (const auto& t : terms) v += t.coefficient * std::pow(angle_between(t.center.dir, eta.dir), beta);
  return v;
}

double HolderFunction::seminorm_bound() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coefficient);
  return s;
}

double HolderFunction::norm_bound() const {
  return seminorm_bound() + std::abs(offset) + seminorm_bound() * std::pow(kPi, beta);
}

double theorem72_rate(double a, double beta, double K) {
  if (!(a > 0.0) || !(beta > 0.0) || beta > 1.0 || !(K > 0.0)) {
    throw DomainError("rate needs a > 0, beta in (0, 1], K > 0");
  }
  return a * a * beta / (a * beta + 2.0 * K);
}

double theorem72_radius(double a, double beta, double K, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return (2.0 * K / a + beta) * std::log(1.0 / alpha) / a;
}

SphereConvergence sphere_convergence_experiment(const ModelSpace& space, const HolderFunction& f,
                                                const std::vector<double>& R_list, double R_max,
                                                const WalkConfig& config, std::int64_t N, double K) {
  if (R_list.empty()) throw DomainError("need at least one sphere radius");
  if (!(R_list.back() < R_max)) throw DomainError("sphere radii must stay below R_max");
  if (N < 2) throw DomainError("need at least two walks");
  std::vector<double> radii = R_list;
  radii.push_back(R_max);
  const auto measures = pushforward_sphere_measures(space, radii, config, N);
  const auto& boundary = measures.back();
  std::vector<double> f_inf(static_cast<std::size_t>(N));
  for (std::size_t i = 0; i < f_inf.size(); ++i) f_inf[i] = f(BoundaryPoint{boundary.hits[i]});
  const double mean_inf = mean_estimate(f_inf).mean;

  SphereConvergence out;
  out.lambda = theorem72_rate(space.bounds().a, f.beta, K);
  std::vector<double> fit_r;
  std::vector<double> fit_e;
  out.inconclusive = true;
  for (std::size_t k = 0; k < R_list.size(); ++k) {
    std::vector<double> f_r(f_inf.size());
    std::vector<double> diff(f_inf.size());
    for (std::size_t i = 0; i < f_r.size(); ++i) {
      f_r[i] = f(BoundaryPoint{measures[k].hits[i]});
      diff[i] = f_r[i] - f_inf[i];
    }
    const MeanEstimate d = mean_estimate(diff);
    SphereRow row{R_list[k], mean_estimate(f_r).mean, mean_inf, std::abs(d.mean), d.se};
    out.within_noise = out.within_noise && row.e <= 3.0 * row.sigma;
    if (row.e > 2.0 * row.sigma) {
      out.inconclusive = false;
      fit_r.push_back(row.R);
      fit_e.push_back(std::log(row.e));
    }
    out.fitted_constant = std::max(out.fitted_constant, (row.e + 2.0 * row.sigma) * std::exp(out.lambda * row.R));
    out.rows.push_back(row);
  }
  if (fit_r.size() >= 2) out.rate_fit = least_squares(fit_r, fit_e);
  return out;
}

Concentration concentration_experiment(const ModelSpace& space, const BoundaryPoint& xi,
                                       const std::vector<double>& rho_list,
                                       const std::vector<double>& alpha_list, const WalkConfig& config,
                                       std::int64_t N) {
  if (rho_list.empty() || alpha_list.empty()) throw DomainError("empty concentration grid");
  Concentration out;
  for (std::size_t k = 0; k < rho_list.size(); ++k) {
    const Point x = Point::polar(rho_list[k], xi.dir);
    WalkConfig c = config;
    c.base_seed = derive_seed(config.base_seed, k);
    const EmpiricalMeasure mu = harmonic_measure(space, x, c, N);
    for (double alpha : alpha_list) {
      const CapSpec cap = CapSpec::make(xi, alpha);
      ConcentrationCell cell{rho_list[k], alpha, complement_mass(mu, cap), false, std::nullopt};
      cell.censored = cell.complement.hits == 0;
      if (space.is_ball()) cell.exact = exact_cap_mass_ball(space, x, cap, true);
      out.cells.push_back(cell);
    }
  }
  std::vector<double> sorted_alpha = alpha_list;
  std::sort(sorted_alpha.begin(), sorted_alpha.end());
  for (double alpha : sorted_alpha) {
    std::vector<double> r;
    std::vector<double> lm;
    for (const auto& cell : out.cells) {
      if (cell.alpha == alpha && cell.complement.hits > 30) {
        r.push_back(cell.rho);
        lm.push_back(std::log(cell.complement.fraction));
      }
    }
    ConcentrationFit fit{alpha, std::nullopt};
    if (r.size() >= 2) fit.fit = least_squares(r, lm);
    out.fits.push_back(fit);
  }
  for (std::size_t i = 1; i < out.fits.size(); ++i) {
    const auto& lo = out.fits[i - 1].fit;
    const auto& hi = out.fits[i].fit;
    if (lo && hi && hi->slope > lo->slope + 2.0 * std::hypot(lo->slope_se, hi->slope_se)) {
      out.monotone = false;
    }
  }
  return out;
}

KernelEstimateReport estimate_kernel_experiment(const ModelSpace& space, const Point& x,
                                                const BoundaryPoint& xi, const WalkConfig& config,
                                                std::int64_t N, const std::vector<double>& schedule,
                                                const std::vector<double>& test_caps) {
  WalkConfig co = config;
  co.base_seed = derive_seed(config.base_seed, 1);
  const EmpiricalMeasure mu_x = harmonic_measure(space, x, config, N);
  const EmpiricalMeasure mu_o = harmonic_measure(space, Point::origin(), co, N);
  KernelEstimateReport out;
  out.estimate = estimate_kernel_cap_ratio(mu_x, mu_o, xi, schedule);
  if (space.is_ball()) out.exact = exact_kernel_ball(space, x, xi).value;
  for (double alpha : test_caps) {
    const CapSpec cap = CapSpec::make(xi, alpha);
    CapCheck check{alpha, cap_mass(mu_x, cap), std::nullopt, std::nullopt};
    if (space.is_ball()) {
      const double p = exact_cap_mass_ball(space, x, cap);
      check.exact = p;
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(N));
      check.z = sigma > 0.0 ? (check.mass.fraction - p) / sigma : 0.0;
    }
    out.caps.push_back(check);
  }
  return out;
}

std::vector<BoundSample> estimated_bound_samples(const ModelSpace& space, int points, int per_point,
                                                 double rho_max, const WalkConfig& config,
                                                 std::int64_t N, double T) {
  if (points < 1 || per_point < 1) throw DomainError("need at least one sample pair");
  Sampler s(config.base_seed, space.dim());
  WalkConfig co = config;
  co.base_seed = derive_seed(config.base_seed, 1);
  const EmpiricalMeasure mu_o = harmonic_measure(space, Point::origin(), co, N);
  std::vector<BoundSample> out;
  for (int p = 0; p < points; ++p) {
    const Point x = Point::polar(rho_max * (p + 1) / points, s.direction());
    WalkConfig cx = config;
    cx.base_seed = derive_seed(config.base_seed, 100 + static_cast<std::uint64_t>(p));
    const EmpiricalMeasure mu_x = harmonic_measure(space, x, cx, N);
    for (int q = 0; q < per_point; ++q) {
      const BoundaryPoint xi = s.boundary();
      const auto est = estimate_kernel_cap_ratio(mu_x, mu_o, xi, default_cap_schedule());
      out.push_back(make_bound_sample(space, x, xi, est.kernel, T));
    }
  }
  return out;
}

}  // namespace hadamard
