#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hadamard/errors.hpp"
#include "hadamard/poisson_kernel.hpp"
#include "support.hpp"

using namespace hadamard;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// ((1 - |u|^2) / |u - xi|^2)^{n-1} in ball coordinates of curvature -a^2.
double classical_kernel(const Point& x, const BoundaryPoint& xi, int n, double a) {
  const Vec u = test::ball_coords(x, a);
  const Vec d = u - xi.dir;
  return std::pow((1.0 - dot(u, u)) / dot(d, d), n - 1);
}

// Exact sample of the disk exit law from z: Mobius image of a uniform angle.
EmpiricalMeasure disk_exit_law(cplx z, std::int64_t N, std::uint64_t seed) {
  test::Rand rng(seed);
  EmpiricalMeasure mu;
  mu.space_id = "ball(n=2,a=1)";
  mu.dim = 2;
  mu.exit_radius = 12.0;
  mu.seed = seed;
  for (std::int64_t i = 0; i < N; ++i) {
    const cplx w = std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
    const cplx eta = (w + z) / (1.0 + std::conj(z) * w);
    mu.hits.push_back(Vec::planar(eta.real(), eta.imag()) * (1.0 / std::abs(eta)));
  }
  return mu;
}

// Harmonic measure of the arc (t1, t2) seen from z in the unit disk.
double disk_arc_measure(cplx z, double t1, double t2) {
  const double arg = std::arg((std::polar(1.0, t2) - z) / (std::polar(1.0, t1) - z));
  double v = arg / kPi - (t2 - t1) / (2.0 * kPi);
  v -= std::floor(v);
  return v;
}

const ModelSpace& disk() {
  static const ModelSpace s = ModelSpace::ball(2, 1.0);
  return s;
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("closed-form kernel examples") {
    const Point o = Point::origin();
    const Point x = Point::from_ball_coords(Vec::planar(0.5, 0.0), 1.0);
    const BoundaryPoint e0{Vec::axis(0)};
    CHECK(exact_kernel_ball(2, 1.0, o, e0).value == Approx(1.0));
    CHECK(exact_kernel_ball(2, 1.0, x, e0).value == Approx(3.0).epsilon(1e-14));
    CHECK(exact_kernel_ball(3, 1.0, x, e0).value == Approx(9.0).epsilon(1e-14));
    CHECK(exact_kernel_ball(2, 1.0, x, BoundaryPoint{Vec::axis(0, -1.0)}).value == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(exact_kernel_ball(2, 1.0, x, e0).method == KernelMethod::closed_form);
    CHECK_THROWS_AS(exact_kernel_ball(ModelSpace::default_warped(), x, e0), UnsupportedSpace);
  }

  TEST_CASE("closed-form kernel agrees with the classical ball formula") {
    test::Rand rng(61);
    for (int n : {2, 3, 4}) {
      for (double a : {0.5, 1.0, 2.0}) {
        for (int i = 0; i < 100; ++i) {
          const Point x = rng.point(n, 4.0 / a);
          const BoundaryPoint xi{rng.direction(n)};
          CHECK(exact_kernel_ball(n, a, x, xi).value == Approx(classical_kernel(x, xi, n, a)).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("Busemann formula and Gromov identities reproduce the kernel") {
    const Point x = Point::from_ball_coords(Vec::planar(0.5, 0.0), 1.0);
    const auto r0 = kernel_identity_slack(disk(), Point::origin(), BoundaryPoint{Vec::axis(1)}, 30.0);
    CHECK(r0.first == Approx(0.0));
    CHECK(r0.second == Approx(0.0));
    const auto r = kernel_identity_slack(disk(), x, BoundaryPoint{Vec::axis(0)}, 30.0);
    CHECK(std::abs(r.first) < 1e-9);
    CHECK(std::abs(r.second) < 1e-9);
    test::Rand rng(67);
    for (int n : {2, 3}) {
      const ModelSpace s = ModelSpace::ball(n, 1.0);
      for (int i = 0; i < 1000; ++i) {
        const Point y = rng.point(n, 8.0);
        const BoundaryPoint xi{rng.direction(n)};
        const auto res = kernel_identity_slack(s, y, xi, 30.0);
        CHECK(std::abs(res.first) < 1e-6);
        CHECK(std::abs(res.second) < 1e-6);
        if (i < 100) {
          const KernelValue b = kernel_busemann_formula(s, y, xi, 30.0);
          CHECK(b.value == Approx(exact_kernel_ball(s, y, xi).value).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("two-sided envelopes") {
    const Envelopes at_o = theorem11_envelopes(1.0, 1.0, 2.0, 0.0, 0.0, 0.0);
    CHECK(at_o.lower == Approx(0.5));
    CHECK(at_o.upper == Approx(2.0));
    CHECK_THROWS_AS(theorem11_envelopes(1.0, 1.0, 0.5, 0.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(theorem11_envelopes(1.0, 0.0, 1.0, 0.0, 0.0, 0.0), DomainError);
    test::Rand rng(71);
    const Point o = Point::origin();
    for (int i = 0; i < 200; ++i) {
      const Point x = rng.point(2, 6.0);
      const BoundaryPoint xi{rng.direction(2)};
      const double d = disk().distance(o, x);
      const double g_ox = gromov_product_ideal(disk(), x, Target{o}, xi, 30.0).value;
      const double g_xo = gromov_product_ideal(disk(), o, Target{x}, xi, 30.0).value;
      const Envelopes e = theorem11_envelopes(1.0, 1.0, 1.0, d, g_ox, g_xo);
      const double P = exact_kernel_ball(disk(), x, xi).value;
      CHECK(e.lower == Approx(P).epsilon(1e-7));
      CHECK(e.upper == Approx(P).epsilon(1e-7));
      const Envelopes loose = theorem11_envelopes(1.0, 1.5, 2.0, d, g_ox, g_xo);
      CHECK(loose.lower <= loose.upper);
    }
    double prev = 0.0;
    for (double t = 1.0; t <= 6.0; t += 1.0) {
      const Envelopes e = theorem11_envelopes(1.0, 1.0, 1.5, t, 0.0, t);
      CHECK(e.lower == Approx(std::exp(t) / 1.5));
      CHECK(e.lower > prev);
      prev = e.lower;
    }
  }

  TEST_CASE("cap-ratio estimate on exact exit samples") {
    const EmpiricalMeasure mu_o = disk_exit_law(0.0, 100000, 1);
    const EmpiricalMeasure mu_x = disk_exit_law(0.5, 100000, 2);
    const auto est = estimate_kernel_cap_ratio(mu_x, mu_o, BoundaryPoint{Vec::axis(0)}, default_cap_schedule());
    CHECK(est.kernel.method == KernelMethod::cap_ratio);
    CHECK(est.kernel.ci.lo <= 3.0);
    CHECK(est.kernel.ci.hi >= 3.0);
    CHECK(est.kernel.ci.hi - est.kernel.ci.lo < 1.5);
    CHECK_FALSE(est.non_stabilized);
    const auto anti = estimate_kernel_cap_ratio(mu_x, mu_o, BoundaryPoint{Vec::axis(0, -1.0)}, default_cap_schedule());
    CHECK(anti.kernel.ci.lo <= 1.0 / 3.0);
    CHECK(anti.kernel.ci.hi >= 1.0 / 3.0);
  }

  TEST_CASE("cap-ratio estimate degenerate cases") {
    const EmpiricalMeasure mu = disk_exit_law(0.0, 20000, 3);
    const auto same = estimate_kernel_cap_ratio(mu, mu, BoundaryPoint{Vec::axis(1)}, default_cap_schedule());
    for (const auto& level : same.levels) {
      if (level.ratio) CHECK(level.ratio->ratio == 1.0);
    }
    CHECK(same.kernel.value == 1.0);
    const EmpiricalMeasure few = disk_exit_law(0.0, 50, 4);
    try {
      estimate_kernel_cap_ratio(few, few, BoundaryPoint{Vec::axis(0)}, default_cap_schedule());
      FAIL("expected insufficient samples");
    } catch (const InsufficientSamples& e) {
      CHECK(e.alpha == Approx(kPi));
    }
    CHECK_THROWS_AS(estimate_kernel_cap_ratio(mu, mu, BoundaryPoint{Vec::axis(0)}, {0.5, 1.0}), DomainError);
    EmpiricalMeasure spike = mu;
    for (auto& h : spike.hits) h = Vec::axis(0);
    CHECK(estimate_kernel_cap_ratio(spike, mu, BoundaryPoint{Vec::axis(0)}, default_cap_schedule()).non_stabilized);
  }

  TEST_CASE("cap quadrature oracles") {
    const Point o = Point::origin();
    const BoundaryPoint e0{Vec::axis(0)};
    for (double al : {0.3, 1.0, 2.5, kPi}) {
      const CapSpec cap = CapSpec::make(e0, al);
      CHECK(exact_cap_mass_ball(disk(), o, cap) == Approx(al / kPi).epsilon(1e-12));
      CHECK(exact_cap_mass_ball(ModelSpace::ball(3, 1.0), o, cap) == Approx((1.0 - std::cos(al)) / 2.0).epsilon(1e-12));
      CHECK(exact_cap_mass_ball(ModelSpace::ball(4, 1.0), o, cap) ==
            Approx((al - std::sin(al) * std::cos(al)) / kPi).epsilon(1e-12));
    }
    test::Rand rng(73);
    for (int i = 0; i < 100; ++i) {
      const Point x = rng.point(2, 5.0);
      const double c = rng.uniform(0.0, 2.0 * kPi);
      const double al = rng.uniform(0.05, kPi - 0.05);
      const CapSpec cap = CapSpec::make(BoundaryPoint::from_angle(c), al);
      const Vec u = test::ball_coords(x, 1.0);
      const double oracle = disk_arc_measure(cplx(u[0], u[1]), c - al, c + al);
      CHECK(exact_cap_mass_ball(disk(), x, cap) == Approx(oracle).epsilon(1e-8));
      CHECK(exact_cap_mass_ball(disk(), x, cap, true) == Approx(1.0 - oracle).epsilon(1e-8));
    }
    for (int n : {3, 4}) {
      const ModelSpace s = ModelSpace::ball(n, 1.0);
      for (int i = 0; i < 20; ++i) {
        const Point x = rng.point(n, 4.0);
        const CapSpec cap = CapSpec::make(BoundaryPoint{rng.direction(n)}, rng.uniform(0.1, 3.0));
        CHECK(exact_cap_mass_ball(s, x, cap) + exact_cap_mass_ball(s, x, cap, true) == Approx(1.0).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("kernel integrates to one against the uniform law") {
    test::Rand rng(79);
    const std::int64_t N = 200000;
    for (int n : {2, 3}) {
      const ModelSpace s = ModelSpace::ball(n, 1.0);
      const Point x = Point::polar(1.0, rng.direction(n));
      std::vector<double> values;
      for (std::int64_t i = 0; i < N; ++i) values.push_back(exact_kernel_ball(s, x, BoundaryPoint{rng.direction(n)}).value);
      const MeanEstimate m = mean_estimate(values);
      CHECK(std::abs(m.mean - 1.0) <= 3.0 * m.se);
    }
  }

  TEST_CASE("kernel is harmonic") {
    test::Rand rng(83);
    const double h = 1e-3;
    for (int n : {2, 3}) {
      const ModelSpace s = ModelSpace::ball(n, 1.0);
      for (int i = 0; i < 100; ++i) {
        const Point x = rng.point(n, 5.0);
        const BoundaryPoint xi{rng.direction(n)};
        auto P = [&](const Point& y) { return exact_kernel_ball(s, y, xi).value; };
        const double center = P(x);
        double lap = 0.0;
        for (int k = 0; k < n; ++k) {
          const Vec e = Vec::axis(k);
          lap += (P(s.exp_map(x, e, h)) + P(s.exp_map(x, -e, h)) - 2.0 * center) / (h * h);
        }
        CHECK(std::abs(lap) / center < 1e-4);
      }
    }
  }
}
