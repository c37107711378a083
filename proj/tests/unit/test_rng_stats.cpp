#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "hadamard/errors.hpp"
#include "hadamard/rng.hpp"
#include "hadamard/statistics.hpp"
#include "support.hpp"

using namespace hadamard;
using doctest::Approx;

TEST_SUITE("rng_stats") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = std::array<std::uint32_t, 4>;
    using K = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("counter streams are deterministic and distinct") {
    const CounterRng a(42, 7);
    const CounterRng b(42, 7);
    CHECK(a.uniforms(3) == b.uniforms(3));
    CHECK(a.uniforms(3) != a.uniforms(4));
    CHECK(a.uniforms(3, 0) != a.uniforms(3, 1));
    CHECK(a.uniforms(3) != CounterRng(42, 8).uniforms(3));
    CHECK(a.uniforms(3) != CounterRng(43, 7).uniforms(3));
    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 100; ++s) seeds.insert(derive_seed(5, s));
    CHECK(seeds.size() == 100);
    CHECK(derive_seed(5, 1) != derive_seed(6, 1));
  }

  TEST_CASE("uniforms lie in the open unit interval and pass KS") {
    const CounterRng r(1, 0);
    std::vector<double> u;
    for (std::uint64_t s = 0; s < 50000; ++s) {
      for (double v : r.uniforms(s)) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        u.push_back(v);
      }
    }
    CHECK(ks_uniform(u).p_value > 0.01);
  }

  TEST_CASE("unit vectors are uniform on the sphere") {
    for (int dim : {2, 3, 4}) {
      const CounterRng r(9, 1);
      std::vector<double> proj;
      double sq0 = 0.0;
      const int N = 50000;
      for (int s = 0; s < N; ++s) {
        const Vec v = r.unit_vector(dim, s);
        CHECK(norm(v) == Approx(1.0).epsilon(1e-14));
        for (int k = dim; k < kMaxDim; ++k) CHECK(v[k] == 0.0);
        sq0 += v[0] * v[0];
        if (dim == 2) proj.push_back((std::atan2(v[1], v[0]) + std::numbers::pi) / (2.0 * std::numbers::pi));
        if (dim == 3) proj.push_back((v[2] + 1.0) / 2.0);
      }
      CHECK(sq0 / N == Approx(1.0 / dim).epsilon(0.02));
      if (!proj.empty()) CHECK(ks_uniform(proj).p_value > 0.01);
    }
  }

  TEST_CASE("Wilson interval") {
    const Interval zero = wilson_interval(0, 10);
    const double z2 = kZ95 * kZ95;
    CHECK(zero.lo == Approx(0.0));
    CHECK(zero.hi == Approx(z2 / (10.0 + z2)));
    const Interval full = wilson_interval(10, 10);
    CHECK(full.lo == Approx(10.0 / (10.0 + z2)));
    CHECK(full.hi == Approx(1.0));
    const Interval mid = wilson_interval(30, 100);
    const double p = 0.3;
    const double center = (p + z2 / 200.0) / (1.0 + z2 / 100.0);
    const double half = kZ95 * std::sqrt(p * (1 - p) / 100.0 + z2 / 40000.0) / (1.0 + z2 / 100.0);
    CHECK(mid.lo == Approx(center - half));
    CHECK(mid.hi == Approx(center + half));
    CHECK_THROWS_AS(wilson_interval(5, 0), DomainError);
    CHECK_THROWS_AS(wilson_interval(11, 10), DomainError);
  }

  TEST_CASE("binomial ratio interval") {
    const RatioEstimate r = binomial_ratio(300, 1000, 100, 1000);
    CHECK(r.ratio == Approx(3.0));
    const double se = std::sqrt(1.0 / 300 - 1.0 / 1000 + 1.0 / 100 - 1.0 / 1000);
    CHECK(r.log_se == Approx(se));
    CHECK(r.ci.lo == Approx(3.0 * std::exp(-kZ95 * se)));
    CHECK(r.ci.hi == Approx(3.0 * std::exp(kZ95 * se)));
    CHECK_THROWS_AS(binomial_ratio(0, 10, 5, 10), DomainError);
  }

  TEST_CASE("least squares") {
    const LinearFit exact = least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(exact.slope == Approx(2.0));
    CHECK(exact.intercept == Approx(1.0));
    CHECK(exact.r2 == Approx(1.0));
    CHECK(exact.slope_se == Approx(0.0));
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{0.1, 0.9, 2.2, 2.8, 4.1};
    const LinearFit f = least_squares(x, y);
    double sxx = 0, sxy = 0, mx = 2.0, my = 0.0;
    for (double v : y) my += v / 5.0;
    for (int i = 0; i < 5; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0, tss = 0;
    for (int i = 0; i < 5; ++i) {
      const double e = y[i] - (my + slope * (x[i] - mx));
      rss += e * e;
      tss += (y[i] - my) * (y[i] - my);
    }
    CHECK(f.slope == Approx(slope));
    CHECK(f.r2 == Approx(1.0 - rss / tss));
    CHECK(f.slope_se == Approx(std::sqrt(rss / 3.0 / sxx)));
    CHECK(f.points == 5);
    CHECK_THROWS_AS(least_squares({1.0}, {2.0}), FitFailure);
    CHECK_THROWS_AS(least_squares({1.0, 1.0}, {2.0, 3.0}), FitFailure);
  }

  TEST_CASE("Kolmogorov-Smirnov uniformity test") {
    CHECK(ks_uniform({0.5}).statistic == Approx(0.5));
    CHECK(ks_uniform({0.25, 0.75}).statistic == Approx(0.25));
    test::Rand rng(89);
    std::vector<double> u;
    std::vector<double> skewed;
    for (int i = 0; i < 10000; ++i) {
      const double v = rng.uniform();
      u.push_back(v);
      skewed.push_back(v * v);
    }
    CHECK(ks_uniform(u).p_value > 0.01);
    CHECK(ks_uniform(skewed).p_value < 1e-6);
  }

  TEST_CASE("mean estimate") {
    const MeanEstimate m = mean_estimate({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == Approx(2.5));
    CHECK(m.sd == Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.se == Approx(std::sqrt(5.0 / 3.0) / 2.0));
  }
}
