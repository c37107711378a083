#include "hadamard/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hadamard/errors.hpp"

namespace hadamard {

double Sampler::uniform() {
  if (spare_) {
    const double u = *spare_;
    spare_.reset();
    return u;
  }
  const auto pair = rng_.uniforms(counter_++);
  spare_ = pair[1];
  return pair[0];
}

Vec Sampler::direction() {
  spare_.reset();
  return rng_.unit_vector(dim_, counter_++);
}

Point Sampler::point(double rho_max) {
  const double r = rho_max * uniform();
  return Point::polar(r, direction());
}

IdentitySweep identity_sweep(const ModelSpace& space, int samples, std::uint64_t seed, double rho_max,
                             double T) {
  Sampler s(seed, space.dim());
  IdentitySweep out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < samples; ++i) {
    IdentityRow row{};
    row.x = s.point(rho_max);
    row.xi = s.boundary();
    row.kernel_lower_form = nan;
    row.kernel_upper_form = nan;
    if (space.is_ball()) {
      const auto [k1, k2] = kernel_identity_slack(space, row.x, row.xi, T);
      row.kernel_lower_form = k1;
      row.kernel_upper_form = k2;
      out.max_kernel_residual = std::max({out.max_kernel_residual, std::abs(k1), std::abs(k2)});
    }
    const auto [b1, b2] = busemann_gromov_identity_slack(space, row.x, row.xi, T);
    row.busemann_lower_form = b1;
    row.busemann_upper_form = b2;
    out.max_busemann_residual = std::max({out.max_busemann_residual, std::abs(b1), std::abs(b2)});
    out.rows.push_back(row);
  }
  return out;
}

const char* to_string(LemmaKind kind) {
  switch (kind) {
    case LemmaKind::lemma41:
      return "lemma41";
    case LemmaKind::lemma42:
      return "lemma42";
    case LemmaKind::lemma43:
      return "lemma43";
  }
  return "unknown";
}

LemmaSweep lemma_sweep(const ModelSpace& space, int samples, std::uint64_t seed, double rho_max,
                       double T) {
  Sampler s(seed, space.dim());
  LemmaSweep out;
  const double inf = std::numeric_limits<double>::infinity();
  std::fill(std::begin(out.min_slack), std::end(out.min_slack), inf);
  std::fill(std::begin(out.max_slack), std::end(out.max_slack), -inf);
  auto record = [&](LemmaRow row) {
    const auto k = static_cast<std::size_t>(row.kind);
    if (row.terms) {
      out.min_slack[k] = std::min(out.min_slack[k], row.terms->slack());
      out.max_slack[k] = std::max(out.max_slack[k], row.terms->slack());
    } else {
      ++out.skipped;
    }
    out.rows.push_back(std::move(row));
  };
  for (int i = 0; i < samples; ++i) {
    const Point x = s.point(rho_max);
    const Point y = s.point(rho_max);
    const BoundaryPoint xi = s.boundary();
    const BoundaryPoint eta = s.boundary();
    record({LemmaKind::lemma41, x, Target{eta}, xi, lemma41_terms(space, x, xi, eta, T)});
    if (same_point(x, y)) continue;
    record({LemmaKind::lemma42, x, Target{y}, xi, lemma42_terms(space, x, y, xi, T)});
    record({LemmaKind::lemma43, x, Target{y}, xi, lemma43_terms(space, x, y, xi, T)});
  }
  return out;
}

BoundSample make_bound_sample(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                              const KernelValue& P, double T) {
  const Point o = Point::origin();
  BoundSample s;
  s.x = x;
  s.xi = xi;
  s.P = P;
  if (x.is_origin()) return s;
  s.d = space.distance(o, x);
  s.g_ox = gromov_product_ideal(space, x, Target{o}, xi, T).value;
  s.g_xo = gromov_product_ideal(space, o, Target{x}, xi, T).value;
  return s;
}

std::vector<BoundSample> ball_bound_samples(const ModelSpace& space, int pairs, std::uint64_t seed,
                                            double T) {
  const double a = space.bounds().a;
  Sampler s(seed, space.dim());
  std::vector<BoundSample> out;
  for (int i = 0; i < pairs; ++i) {
    const double rho = 0.5 * static_cast<double>(i % 16 + 1) / a;
    const Point x = Point::polar(rho, s.direction());
    const BoundaryPoint xi = s.boundary();
    out.push_back(make_bound_sample(space, x, xi, exact_kernel_ball(space, x, xi), T));
  }
  return out;
}

std::vector<double> default_k_grid(const ModelSpace& space) {
  const auto [a, b] = space.bounds();
  const double lo = 0.5 * a;
  const double hi = 4.0 * (space.dim() - 1) * b;
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(lo * std::pow(hi / lo, i / 19.0));
  if (space.is_ball()) {
    const double h = space.as_ball().entropy();
    const bool present =
        std::any_of(grid.begin(), grid.end(), [&](double k) { return std::abs(k - h) <= 1e-12 * h; });
    if (!present) grid.push_back(h);
    std::sort(grid.begin(), grid.end());
  }
  return grid;
}

double FitReport::C_at(double k) const {
  if (K_grid.empty()) throw DomainError("empty fit report");
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < K_grid.size(); ++i) {
    if (std::abs(K_grid[i] - k) < std::abs(K_grid[best_i] - k)) best_i = i;
  }
  return C[best_i];
}

FitReport fit_theorem11_constants(std::vector<BoundSample>& samples, const std::vector<double>& K_grid,
                                  double a, std::optional<double> prefer) {
  if (samples.empty()) throw DomainError("no bound samples to fit");
  if (K_grid.empty()) throw DomainError("empty K grid");
  FitReport r;
  r.K_grid = K_grid;
  r.samples = samples.size();
  for (double K : K_grid) {
    if (!(K > 0.0)) throw DomainError("K grid values must be positive");
    double log_cl = 0.0;
    double log_cu = 0.0;
    for (const auto& s : samples) {
      if (!(s.P.ci.lo > 0.0)) throw DomainError("kernel interval must be positive");
      log_cl = std::max(log_cl, -2.0 * K * s.g_ox + a * s.d - std::log(s.P.ci.hi));
      log_cu = std::max(log_cu, std::log(s.P.ci.lo) - 2.0 * K * s.g_xo + a * s.d);
    }
    r.C_lower.push_back(std::exp(log_cl));
    r.C_upper.push_back(std::exp(log_cu));
    r.C.push_back(std::exp(std::max(log_cl, log_cu)));
  }
  const double c_min = *std::min_element(r.C.begin(), r.C.end());
  if (!std::isfinite(c_min)) throw FitFailure("no finite constant on the K grid");
  bool found = false;
  for (std::size_t i = 0; i < r.C.size(); ++i) {
    if (r.C[i] > c_min * (1.0 + 1e-8)) continue;
    if (!found || (prefer && std::abs(K_grid[i] - *prefer) < std::abs(K_grid[r.best] - *prefer))) {
      r.best = i;
    }
    found = true;
  }
  r.K = K_grid[r.best];
  r.C_best = r.C[r.best];
  for (auto& s : samples) {
    const Envelopes e = theorem11_envelopes(a, r.K, r.C_best, s.d, s.g_ox, s.g_xo);
    s.lower = e.lower;
    s.upper = e.upper;
    if (e.lower > s.P.ci.hi * (1.0 + 1e-9) || e.upper < s.P.ci.lo * (1.0 - 1e-9)) ++r.violations;
  }
  return r;
}

}  // namespace hadamard
