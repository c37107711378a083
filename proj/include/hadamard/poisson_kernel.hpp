#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hadamard/brownian.hpp"
#include "hadamard/invariants.hpp"
#include "hadamard/model_space.hpp"
#include "hadamard/statistics.hpp"

namespace hadamard {

enum class KernelMethod { closed_form, busemann_formula, cap_ratio };
const char* to_string(KernelMethod method);

struct KernelValue {
  double value = 1.0;
  KernelMethod method = KernelMethod::closed_form;
  double error_estimate = 0.0;
  Interval ci;  // [value, value] for exact methods
};

// P(x, xi) = e^{h B(o, x, xi)} with h = (n - 1) a and B in closed form.
KernelValue exact_kernel_ball(const ModelSpace& space, const Point& x, const BoundaryPoint& xi);
KernelValue exact_kernel_ball(int n, double a, const Point& x, const BoundaryPoint& xi);

// e^{h B} with B from the truncated Busemann limit; ball model only.
KernelValue kernel_busemann_formula(const ModelSpace& space, const Point& x, const BoundaryPoint& xi,
                                    double T);

// log P - (-2h(o|xi)_x + h d(o,x)) and log P - (2h(x|xi)_o - h d(o,x)).
std::pair<double, double> kernel_identity_slack(const ModelSpace& space, const Point& x,
                                                const BoundaryPoint& xi, double T);

struct Envelopes {
  double lower;
  double upper;
};
// ((1/C) e^{-2K g_ox} e^{a d}, C e^{2K g_xo} e^{-a d}).
Envelopes theorem11_envelopes(double a, double K, double C, double d, double g_ox, double g_xo);

std::vector<double> default_cap_schedule();

struct CapRatioLevel {
  double alpha;
  std::int64_t hits_x;
  std::int64_t hits_o;
  std::optional<RatioEstimate> ratio;  // empty when a count is zero
};

struct CapRatioEstimate {
  KernelValue kernel;
  std::vector<CapRatioLevel> levels;
  std::size_t used_level = 0;
  bool non_stabilized = false;
};

// mu_x(cap_i) / mu_o(cap_i) over a decreasing cap schedule about xi. The
// estimate is the last level with at least 100 hits in both measures.
// Throws InsufficientSamples naming the first failing radius when no level
// qualifies.
CapRatioEstimate estimate_kernel_cap_ratio(const EmpiricalMeasure& mu_x, const EmpiricalMeasure& mu_o,
                                           const BoundaryPoint& xi, const std::vector<double>& schedule,
                                           std::int64_t min_hits = 100);

// Exact harmonic measure of a closed cap (or its complement) seen from x,
// by adaptive quadrature of the closed-form kernel against the uniform law.
double exact_cap_mass_ball(const ModelSpace& space, const Point& x, const CapSpec& cap,
                           bool complement = false);

}  // namespace hadamard
