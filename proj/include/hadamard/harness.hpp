#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hadamard/brownian.hpp"
#include "hadamard/invariants.hpp"
#include "hadamard/model_space.hpp"
#include "hadamard/poisson_kernel.hpp"
#include "hadamard/statistics.hpp"

namespace hadamard {

// Seeded source of random points for sweeps.
class Sampler {
 public:
  Sampler(std::uint64_t seed, int dim) : rng_(seed, 0), dim_(dim) {}
  double uniform();
  Vec direction();
  BoundaryPoint boundary() { return {direction()}; }
  // Radius uniform in [0, rho_max], direction uniform.
  Point point(double rho_max);

 private:
  CounterRng rng_;
  int dim_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

// Identity and inequality sweeps.

struct IdentityRow {
  Point x;
  BoundaryPoint xi;
  double kernel_lower_form;  // log P - (-2h(o|xi)_x + h d); NaN off the ball model
  double kernel_upper_form;  // log P - (2h(x|xi)_o - h d)
  double busemann_lower_form;
  double busemann_upper_form;
};

struct IdentitySweep {
  std::vector<IdentityRow> rows;
  double max_kernel_residual = 0.0;
  double max_busemann_residual = 0.0;
};

IdentitySweep identity_sweep(const ModelSpace& space, int samples, std::uint64_t seed, double rho_max,
                             double T);

enum class LemmaKind { lemma41, lemma42, lemma43 };
const char* to_string(LemmaKind kind);

struct LemmaRow {
  LemmaKind kind;
  Point x;
  Target second;  // eta for lemma41, y otherwise
  BoundaryPoint xi;
  std::optional<SlackTerms> terms;  // empty when skipped as collinear
};

struct LemmaSweep {
  std::vector<LemmaRow> rows;
  double min_slack[3] = {0.0, 0.0, 0.0};
  double max_slack[3] = {0.0, 0.0, 0.0};
  int skipped = 0;
};

LemmaSweep lemma_sweep(const ModelSpace& space, int samples, std::uint64_t seed, double rho_max,
                       double T);

// Two-sided kernel bound and its constants.

struct BoundSample {
  Point x;
  BoundaryPoint xi;
  double d = 0.0;
  double g_ox = 0.0;
  double g_xo = 0.0;
  KernelValue P;
  double lower = 0.0;
  double upper = 0.0;
};

BoundSample make_bound_sample(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                              const KernelValue& P, double T);

// Ball-model samples with exact kernel: radii {0.5, 1, ..., 8}/a, uniform
// directions and uniform ideal points.
std::vector<BoundSample> ball_bound_samples(const ModelSpace& space, int pairs, std::uint64_t seed,
                                            double T);

struct FitReport {
  std::vector<double> K_grid;
  std::vector<double> C_lower;
  std::vector<double> C_upper;
  std::vector<double> C;
  std::size_t best = 0;
  double K = 0.0;
  double C_best = 0.0;
  std::int64_t violations = 0;
  std::size_t samples = 0;

  // C at the grid value nearest to K.
  double C_at(double K) const;
};

// 20 log-spaced rates in [a/2, 4(n-1)b]; on the ball model h = (n-1)a is
// inserted as well.
std::vector<double> default_k_grid(const ModelSpace& space);

// Samples with cap-ratio kernel estimates: `points` base points at radii
// spread over (0, rho_max], each paired with `per_point` uniform ideal points.
// One boundary measure from o is shared by all points.
std::vector<BoundSample> estimated_bound_samples(const ModelSpace& space, int points, int per_point,
                                                 double rho_max, const WalkConfig& config,
                                                 std::int64_t N, double T);

// Minimal C per K for both inequalities of the two-sided bound. Estimated
// kernels enter through their interval: the lower bound is tested against
// the upper end and vice versa. Fills lower/upper of each sample at the
// reported (C, K). Among rates within 1e-8 of the minimal C the one nearest
// `prefer` wins when given, else the smallest.
FitReport fit_theorem11_constants(std::vector<BoundSample>& samples, const std::vector<double>& K_grid,
                                  double a, std::optional<double> prefer = std::nullopt);

// Kernel decay inside cones.

// max over sample points x of log P(x, xi) - log P(x0', xi) + a d(x, x0')
// where x0' = exp_{x0}(axis) and the points lie in T(x0, aperture/8, 1).
double lemma32_margin(const ModelSpace& space, const ConeSpec& cone, const BoundaryPoint& xi,
                      const std::vector<Point>& points);

// Points of T(x0, aperture/8, 1) in the plane of the axis and xi: offsets
// across the cone at the given distances from the vertex.
std::vector<Point> lemma32_cone_points(const ModelSpace& space, const ConeSpec& cone,
                                       const Vec& toward, const std::vector<double>& distances);

struct Lemma32Fit {
  std::vector<double> theta0;
  std::vector<double> margin;
  LinearFit fit;  // margin against log(1/theta0)
  double log_c4 = 0.0;  // intercept shifted so every margin is covered
  double c4 = 0.0;
  double c5 = 0.0;
  double axis_slope = 0.0;  // slope of log P along the axis, upper half of the distances
  int positive_residuals = 0;
};

// Cone at o about e_0 with aperture theta0, kernel pole at angle
// 1.25 theta0 from the axis; exact kernel, ball model only.
Lemma32Fit lemma32_decay_fit(const ModelSpace& space, const std::vector<double>& theta_grid,
                             const std::vector<double>& distances);

// Nontangential growth and gradient bounds.

struct StolzFit {
  std::vector<double> rho;
  std::vector<double> log_p;
  std::vector<double> log_p_lo;
  std::vector<double> log_p_hi;
  double max_gromov = 0.0;  // largest (o|xi)_x over the samples
  LinearFit fit;
  double threshold = 0.0;  // a - 0.05
  bool passed = false;
};

// x runs along the ray from o to xi, so (o|xi)_x = 0 <= c'.
StolzFit stolz_growth_check(const ModelSpace& space, const BoundaryPoint& xi, double c_prime,
                            const std::vector<double>& t_list);
// Same with cap-ratio kernel estimates; the slope passes when it reaches
// the threshold within two standard errors.
StolzFit stolz_growth_check_estimated(const ModelSpace& space, const BoundaryPoint& xi,
                                      double c_prime, const std::vector<double>& t_list,
                                      const WalkConfig& config, std::int64_t N, double T);

struct HarnackYauReport {
  double sup_gradient = 0.0;
  double sup_refined = 0.0;
  double refinement_change = 0.0;  // relative
  double radial_large_rho = 0.0;   // gradient at the outermost radial node
  double at_origin = 0.0;
  double entropy = 0.0;
  int nodes = 0;
  int skipped = 0;
};

// Central differences of log P(., xi) along two orthogonal geodesic
// directions over a polar grid of radii (0, step, ..., rho_max) and
// `angles` directions; the refined pass halves the radial step.
HarnackYauReport harnack_yau_check(const ModelSpace& space, const BoundaryPoint& xi, double rho_max,
                                   double rho_step, int angles, double h = 1e-4);

// Sphere measures converging to the boundary measure.

// f(eta) = offset + sum_j c_j * angle(xi_j, eta)^beta.
struct HolderFunction {
  struct Term {
    BoundaryPoint center;
    double coefficient;
  };
  std::vector<Term> terms;
  double beta = 1.0;
  double offset = 1.0;

  static HolderFunction make(std::vector<Term> terms, double beta, double offset);
  double operator()(const BoundaryPoint& eta) const;
  double seminorm_bound() const;
  double norm_bound() const;
};

// lambda = a^2 beta / (a beta + 2K).
double theorem72_rate(double a, double beta, double K);
// R = (1/a)(2K/a + beta) log(1/alpha).
double theorem72_radius(double a, double beta, double K, double alpha);

struct SphereRow {
  double R;
  double mean_sphere;    // <f, (pi_R)_* mu_{o,R}>
  double mean_boundary;  // <f, mu_o>
  double e;
  double sigma;  // standard error of the paired difference
};

struct SphereConvergence {
  std::vector<SphereRow> rows;
  double lambda = 0.0;
  std::optional<LinearFit> rate_fit;  // log e against R over resolved rows
  double fitted_constant = 0.0;       // max (e + 2 sigma) e^{lambda R}
  bool inconclusive = false;          // every e within 2 sigma of zero
  bool within_noise = true;           // every e <= 3 sigma
};

SphereConvergence sphere_convergence_experiment(const ModelSpace& space, const HolderFunction& f,
                                                const std::vector<double>& R_list, double R_max,
                                                const WalkConfig& config, std::int64_t N, double K);

// Concentration of harmonic measure in caps.

struct ConcentrationCell {
  double rho;
  double alpha;
  CapMass complement;
  bool censored = false;  // no hits: only the upper bound is informative
  std::optional<double> exact;
};

struct ConcentrationFit {
  double alpha;
  std::optional<LinearFit> fit;  // log mass against rho over cells with > 30 hits
};

struct Concentration {
  std::vector<ConcentrationCell> cells;
  std::vector<ConcentrationFit> fits;
  bool monotone = true;  // slopes non-increasing in alpha up to 2 standard errors
};

Concentration concentration_experiment(const ModelSpace& space, const BoundaryPoint& xi,
                                       const std::vector<double>& rho_list,
                                       const std::vector<double>& alpha_list, const WalkConfig& config,
                                       std::int64_t N);

// Cap-ratio kernel estimate at (x, xi) with cap-mass checks against the
// exact kernel on the ball model. mu_x uses the base seed and mu_o a derived
// one, so the two measures are independent.
struct CapCheck {
  double alpha;
  CapMass mass;
  std::optional<double> exact;
  std::optional<double> z;  // (mass - exact) / binomial sigma
};

struct KernelEstimateReport {
  CapRatioEstimate estimate;
  std::optional<double> exact;
  std::vector<CapCheck> caps;
};

KernelEstimateReport estimate_kernel_experiment(const ModelSpace& space, const Point& x,
                                                const BoundaryPoint& xi, const WalkConfig& config,
                                                std::int64_t N, const std::vector<double>& schedule,
                                                const std::vector<double>& test_caps);

}  // namespace hadamard
