#pragma once

#include <cstdint>
#include <vector>

namespace hadamard {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for k successes out of n trials.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = kZ95);

// Ratio of two binomial proportions (k1/n1) / (k2/n2) with the Katz
// log-normal interval.
struct RatioEstimate {
  double ratio = 0.0;
  double log_se = 0.0;
  Interval ci;
};
RatioEstimate binomial_ratio(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                             double z = kZ95);

// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  std::size_t points = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// One-sample Kolmogorov-Smirnov test of samples in [0, 1] against the
// uniform law, with the asymptotic Kolmogorov p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_uniform(std::vector<double> samples);

struct MeanEstimate {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double se = 0.0;  // standard error of the mean
};
MeanEstimate mean_estimate(const std::vector<double>& values);

}  // namespace hadamard
