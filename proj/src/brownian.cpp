#include "hadamard/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hadamard/errors.hpp"

namespace hadamard {

WalkConfig WalkConfig::resolved(const ModelSpace& space) const {
  const double b = space.bounds().b;
  WalkConfig c = *this;
  if (!(c.step > 0.0) || !std::isfinite(c.step)) throw DomainError("walk step must be positive");
  if (!(c.step < 0.1 / b)) throw DomainError("walk step must be below 0.1/b");
  if (!(c.exit_radius > 0.0) || !std::isfinite(c.exit_radius)) {
    throw DomainError("exit radius must be positive");
  }
  if (c.max_step == 0.0) c.max_step = std::max(0.25 / b, c.step);
  if (!(c.max_step >= c.step)) throw DomainError("max_step must be at least the base step");
  const double budget = std::ceil(10.0 * (c.exit_radius / c.step) * (c.exit_radius / c.step));
  if (!(budget < 4e18)) throw DomainError("walk budget overflows");
  const auto minimum = static_cast<std::int64_t>(budget);
  if (c.max_steps == 0) c.max_steps = minimum;
  if (c.max_steps < minimum) throw DomainError("max_steps must be at least 10 (R/step)^2");
  if (c.threads < 1) throw DomainError("threads must be >= 1");
  return c;
}

double WalkConfig::step_at(double a, double r) const {
  return grow ? std::min(max_step, step * std::exp(a * r)) : step;
}

Point walk_step(const ModelSpace& space, const Point& x, double eps, const Vec& u) {
  if (eps < 0.0) throw DomainError("walk step must be nonnegative");
  if (eps == 0.0) return x;
  if (space.is_ball()) return space.exp_map(x, u, eps);
  return space.as_warped().local_step(x, u, eps);
}

namespace {

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw DomainError("need at least one exit radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw DomainError("exit radii must be positive and increasing");
    }
  }
}

// Ball walk in hyperboloid form: state (sinh R, cosh R, direction) with
// R = a r, so a step costs one exponential and two square roots.
void ball_walk(const BallModel& ball, const Point& start, const WalkConfig& c,
               const std::vector<double>& radii, std::int64_t walk, std::vector<Vec>& out) {
  const double a = ball.a();
  const int n = ball.dim();
  std::vector<double> sinh_exit(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) sinh_exit[k] = std::sinh(a * radii[k]);
  double S = std::sinh(a * start.r);
  double C = std::cosh(a * start.r);
  Vec w = start.dir;
  std::size_t k = 0;
  while (k < radii.size() && start.r >= radii[k]) out[k++] = w;
  const CounterRng rng(c.base_seed, static_cast<std::uint64_t>(walk));
  const double e_max = std::exp(a * c.max_step);
  const double sh_max = 0.5 * (e_max - 1.0 / e_max);
  const double ch_max = 0.5 * (e_max + 1.0 / e_max);
  for (std::int64_t j = 0; k < radii.size(); ++j) {
    if (j >= c.max_steps) throw NonExitError("walk did not exit", {walk});
    double shT = sh_max;
    double chT = ch_max;
    const double delta = c.grow ? std::min(c.max_step, c.step * (S + C)) : c.step;
    if (delta != c.max_step) {
      const double e = std::exp(a * delta);
      shT = 0.5 * (e - 1.0 / e);
      chT = 0.5 * (e + 1.0 / e);
    }
    const Vec u = rng.unit_vector(n, static_cast<std::uint64_t>(j));
    const double cu = dot(u, w);
    Vec spatial = (S * chT + C * shT * cu - shT * cu) * w + shT * u;
    S = norm(spatial);
    if (S > 0.0) w = spatial * (1.0 / S);
    C = std::sqrt(1.0 + S * S);
    while (k < radii.size() && S >= sinh_exit[k]) out[k++] = w;
  }
}

void warped_walk(const WarpedSurface& surface, const Point& start, const WalkConfig& c,
                 const std::vector<double>& radii, std::int64_t walk, std::vector<Vec>& out) {
  const double a = surface.a();
  Point p = start;
  std::size_t k = 0;
  while (k < radii.size() && p.r >= radii[k]) out[k++] = p.dir;
  const CounterRng rng(c.base_seed, static_cast<std::uint64_t>(walk));
  for (std::int64_t j = 0; k < radii.size(); ++j) {
    if (j >= c.max_steps) throw NonExitError("walk did not exit", {walk});
    const Vec u = rng.unit_vector(2, static_cast<std::uint64_t>(j));
    p = surface.local_step(p, u, c.step_at(a, p.r));
    while (k < radii.size() && p.r >= radii[k]) out[k++] = p.dir;
  }
}

std::vector<Vec> run_walk(const ModelSpace& space, const Point& start, const WalkConfig& c,
                          const std::vector<double>& radii, std::int64_t walk) {
  std::vector<Vec> out(radii.size());
  if (space.is_ball()) {
    ball_walk(space.as_ball(), start, c, radii, walk, out);
  } else {
    warped_walk(space.as_warped(), start, c, radii, walk, out);
  }
  return out;
}

// Runs body(i) for i in [0, N) on `threads` workers over contiguous chunks.
// Non-exits are gathered; any other exception is rethrown after joining.
template <class Body>
void parallel_walks(std::int64_t N, int threads, Body&& body) {
  std::vector<std::int64_t> failed;
  std::exception_ptr error;
  std::mutex guard;
  auto work = [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> local;
    try {
      for (std::int64_t i = lo; i < hi; ++i) {
        try {
          body(i);
        } catch (const NonExitError&) {
          local.push_back(i);
        }
      }
    } catch (...) {
      std::lock_guard lock(guard);
      if (!error) error = std::current_exception();
    }
    std::lock_guard lock(guard);
    failed.insert(failed.end(), local.begin(), local.end());
  };
  const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(N, 1));
  if (workers == 1) {
    work(0, N);
  } else {
    std::vector<std::thread> pool;
    for (std::int64_t t = 0; t < workers; ++t) {
      pool.emplace_back(work, N * t / workers, N * (t + 1) / workers);
    }
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    throw NonExitError(std::to_string(failed.size()) + " walks did not exit", std::move(failed));
  }
}

EmpiricalMeasure make_measure(const ModelSpace& space, const Point& start, const WalkConfig& c,
                              double radius) {
  EmpiricalMeasure m;
  m.space_id = space.id();
  m.dim = space.dim();
  m.start = start;
  m.exit_radius = radius;
  m.step = c.step;
  m.max_step = c.max_step;
  m.grow = c.grow;
  m.seed = c.base_seed;
  return m;
}

}  // namespace

std::vector<Vec> first_exits(const ModelSpace& space, const Point& start, const WalkConfig& config,
                             const std::vector<double>& radii, std::int64_t walk_index) {
  space.validate(start);
  check_radii(radii);
  WalkConfig c = config;
  c.exit_radius = radii.back();
  return run_walk(space, start, c.resolved(space), radii, walk_index);
}

BoundaryPoint first_exit(const ModelSpace& space, const Point& start, const WalkConfig& config,
                         std::int64_t walk_index) {
  return {first_exits(space, start, config, {config.exit_radius}, walk_index).front()};
}

EmpiricalMeasure harmonic_measure(const ModelSpace& space, const Point& x, const WalkConfig& config,
                                  std::int64_t N) {
  space.validate(x);
  const WalkConfig c = config.resolved(space);
  if (!(x.r < c.exit_radius)) throw DomainError("start point must lie inside the exit sphere");
  if (N < 0) throw DomainError("walk count must be nonnegative");
  EmpiricalMeasure m = make_measure(space, x, c, c.exit_radius);
  m.hits.resize(static_cast<std::size_t>(N));
  const std::vector<double> radii{c.exit_radius};
  parallel_walks(N, c.threads, [&](std::int64_t i) {
    m.hits[static_cast<std::size_t>(i)] = run_walk(space, x, c, radii, i).front();
  });
  return m;
}

std::vector<EmpiricalMeasure> pushforward_sphere_measures(const ModelSpace& space,
                                                          const std::vector<double>& radii,
                                                          const WalkConfig& config, std::int64_t N) {
  check_radii(radii);
  if (N < 0) throw DomainError("walk count must be nonnegative");
  WalkConfig base = config;
  base.exit_radius = radii.back();
  const WalkConfig c = base.resolved(space);
  const Point o = Point::origin();
  std::vector<EmpiricalMeasure> out;
  for (double R : radii) {
    out.push_back(make_measure(space, o, c, R));
    out.back().hits.resize(static_cast<std::size_t>(N));
  }
  parallel_walks(N, c.threads, [&](std::int64_t i) {
    const auto exits = run_walk(space, o, c, radii, i);
    for (std::size_t k = 0; k < radii.size(); ++k) out[k].hits[static_cast<std::size_t>(i)] = exits[k];
  });
  return out;
}

EmpiricalMeasure pushforward_sphere_measure(const ModelSpace& space, double R,
                                            const WalkConfig& config, std::int64_t N) {
  if (!(R > 0.0)) throw DomainError("sphere radius must be positive");
  return pushforward_sphere_measures(space, {R}, config, N).front();
}

namespace {

CapMass count(const EmpiricalMeasure& mu, const CapSpec& cap, bool inside) {
  if (!mu.valid()) throw DomainError("empirical measure is empty");
  CapMass m;
  m.walks = mu.walks();
  for (const Vec& h : mu.hits) {
    if (cap_contains(cap, BoundaryPoint{h}) == inside) ++m.hits;
  }
  m.fraction = static_cast<double>(m.hits) / static_cast<double>(m.walks);
  m.ci = wilson_interval(m.hits, m.walks);
  return m;
}

}  // namespace

CapMass cap_mass(const EmpiricalMeasure& mu, const CapSpec& cap) { return count(mu, cap, true); }

CapMass complement_mass(const EmpiricalMeasure& mu, const CapSpec& cap) {
  return count(mu, cap, false);
}

}  // namespace hadamard
