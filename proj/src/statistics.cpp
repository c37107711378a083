#include "hadamard/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "hadamard/errors.hpp"

namespace hadamard {

Interval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0 || k < 0 || k > n) throw DomainError("Wilson interval needs 0 <= k <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

RatioEstimate binomial_ratio(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                             double z) {
  if (k1 <= 0 || k2 <= 0 || n1 < k1 || n2 < k2) {
    throw DomainError("binomial ratio needs positive counts");
  }
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  RatioEstimate e;
  e.ratio = p1 / p2;
  e.log_se = std::sqrt(std::max(0.0, 1.0 / static_cast<double>(k1) - 1.0 / static_cast<double>(n1) +
                                         1.0 / static_cast<double>(k2) - 1.0 / static_cast<double>(n2)));
  e.ci = {e.ratio * std::exp(-z * e.log_se), e.ratio * std::exp(z * e.log_se)};
  return e;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw FitFailure("regression needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitFailure("regression abscissae are all equal");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_se = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

KsResult ks_uniform(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double u = samples[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  // Stephens' finite-sample correction of the Kolmogorov limit law.
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

MeanEstimate mean_estimate(const std::vector<double>& v) {
  if (v.empty()) throw DomainError("mean of an empty sample");
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {m, sd, sd / std::sqrt(n)};
}

}  // namespace hadamard
