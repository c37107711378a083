#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hadamard/invariants.hpp"
#include "hadamard/model_space.hpp"
#include "hadamard/rng.hpp"
#include "hadamard/statistics.hpp"

namespace hadamard {

// Geodesic random walk parameters. The step taken at radius r is
// min(max_step, step * e^{a r}) when `grow` is set and `step` otherwise.
struct WalkConfig {
  double step = 0.01;
  std::int64_t max_steps = 0;  // 0 selects 10 (R / step)^2
  double exit_radius = 12.0;
  std::uint64_t base_seed = 0;
  double max_step = 0.0;  // 0 selects 0.25 / b
  bool grow = true;
  int threads = 1;

  // Fills defaults and checks invariants against the space.
  WalkConfig resolved(const ModelSpace& space) const;
  double step_at(double a, double r) const;
};

// Exit directions of N walks, indexed by walk.
struct EmpiricalMeasure {
  std::string space_id;
  int dim = 2;
  Point start;
  double exit_radius = 0.0;
  double step = 0.0;
  double max_step = 0.0;
  bool grow = true;
  std::uint64_t seed = 0;
  std::vector<Vec> hits;

  std::int64_t walks() const { return static_cast<std::int64_t>(hits.size()); }
  bool valid() const { return !hits.empty(); }
};

// Geodesic step of length eps along the unit tangent u.
Point walk_step(const ModelSpace& space, const Point& x, double eps, const Vec& u);

// Runs walk `walk_index` from start and returns the radial projection of the
// first position at distance >= exit_radius from o. Throws NonExitError when
// max_steps is exhausted.
BoundaryPoint first_exit(const ModelSpace& space, const Point& start, const WalkConfig& config,
                         std::int64_t walk_index);

// Exit directions through several spheres S(o, R_k) along one path: entry k
// is the radial projection of the first position with d(o, .) >= radii[k].
// Radii must be increasing and the walk runs until the last one.
std::vector<Vec> first_exits(const ModelSpace& space, const Point& start, const WalkConfig& config,
                             const std::vector<double>& radii, std::int64_t walk_index);

EmpiricalMeasure harmonic_measure(const ModelSpace& space, const Point& x, const WalkConfig& config,
                                  std::int64_t N);

// Walks from o stopped at each R in radii (increasing); one measure per
// radius, sharing sample paths.
std::vector<EmpiricalMeasure> pushforward_sphere_measures(const ModelSpace& space,
                                                          const std::vector<double>& radii,
                                                          const WalkConfig& config, std::int64_t N);

EmpiricalMeasure pushforward_sphere_measure(const ModelSpace& space, double R,
                                            const WalkConfig& config, std::int64_t N);

struct CapMass {
  std::int64_t hits = 0;
  std::int64_t walks = 0;
  double fraction = 0.0;
  Interval ci;
};
CapMass cap_mass(const EmpiricalMeasure& mu, const CapSpec& cap);
// Mass of the complement of the closed cap.
CapMass complement_mass(const EmpiricalMeasure& mu, const CapSpec& cap);

}  // namespace hadamard
