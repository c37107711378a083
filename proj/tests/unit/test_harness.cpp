#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "hadamard/errors.hpp"
#include "hadamard/harness.hpp"
#include "hadamard/report.hpp"
#include "support.hpp"

using namespace hadamard;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

const ModelSpace& disk() {
  static const ModelSpace s = ModelSpace::ball(2, 1.0);
  return s;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> out;
  for (double t = lo; t <= hi + 1e-12; t += step) out.push_back(t);
  return out;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("sampler is deterministic") {
    Sampler a(5, 3);
    Sampler b(5, 3);
    for (int i = 0; i < 100; ++i) {
      const Point p = a.point(4.0);
      const Point q = b.point(4.0);
      CHECK(p.r == q.r);
      CHECK(p.dir == q.dir);
      CHECK(p.r <= 4.0);
      CHECK(norm(p.dir) == Approx(1.0));
    }
  }

  TEST_CASE("identity sweep") {
    const IdentitySweep s = identity_sweep(ModelSpace::ball(3, 1.0), 300, 2, 8.0, 30.0);
    CHECK(s.rows.size() == 300);
    CHECK(s.max_kernel_residual < 1e-6);
    CHECK(s.max_busemann_residual < 1e-6);
    const IdentitySweep w = identity_sweep(ModelSpace::default_warped(), 20, 2, 4.0, 30.0);
    CHECK(std::isnan(w.rows.front().kernel_lower_form));
    CHECK(w.max_busemann_residual < 1e-4);
  }

  TEST_CASE("lemma sweep") {
    const LemmaSweep s = lemma_sweep(disk(), 200, 3, 4.0, 30.0);
    CHECK(s.rows.size() >= 200);
    for (int k = 0; k < 3; ++k) CHECK(s.min_slack[k] >= -1e-4);
    CHECK(s.max_slack[0] <= 1e-4);
    CHECK(s.max_slack[2] <= 1e-4);
    CHECK(std::string(to_string(LemmaKind::lemma42)) == "lemma42");
  }

  TEST_CASE("bound samples") {
    const auto samples = ball_bound_samples(disk(), 64, 1, 30.0);
    REQUIRE(samples.size() == 64);
    for (const auto& s : samples) {
      CHECK(s.d >= 0.0);
      CHECK(s.g_ox >= -1e-9);
      CHECK(s.g_xo >= -1e-9);
      CHECK(s.P.value > 0.0);
      const double shell = s.x.r * 2.0;
      CHECK(shell == Approx(std::round(shell)));
      CHECK(s.x.r <= 8.0);
    }
    const BoundSample o = make_bound_sample(disk(), Point::origin(), BoundaryPoint{Vec::axis(0)}, KernelValue{}, 30.0);
    CHECK(o.d == 0.0);
    CHECK(o.g_ox == 0.0);
  }

  TEST_CASE("default K grid") {
    const auto g = default_k_grid(ModelSpace::ball(3, 1.0));
    CHECK(g.size() == 21);
    CHECK(g.front() == Approx(0.5));
    CHECK(g.back() == Approx(8.0));
    CHECK(std::count(g.begin(), g.end(), 2.0) == 1);
    CHECK(std::is_sorted(g.begin(), g.end()));
    const auto w = default_k_grid(ModelSpace::default_warped());
    CHECK(w.size() == 20);
    CHECK(w.back() == Approx(8.0));
  }

  TEST_CASE("two-sided bound fit on the ball model") {
    for (int n : {2, 3}) {
      const ModelSpace s = ModelSpace::ball(n, 1.0);
      auto samples = ball_bound_samples(s, 500, 9, 30.0);
      const double h = n - 1.0;
      const FitReport fit = fit_theorem11_constants(samples, default_k_grid(s), 1.0, h);
      CHECK(fit.K == Approx(h));
      CHECK(fit.C_best <= 1.0 + 1e-6);
      CHECK(fit.C_at(h) <= 1.0 + 1e-6);
      CHECK(fit.violations == 0);
      CHECK(fit.samples == 500);
      for (const auto& b : samples) {
        CHECK(b.lower <= b.P.value * (1.0 + 1e-9));
        CHECK(b.upper >= b.P.value * (1.0 - 1e-9));
      }
      const FitReport plain = fit_theorem11_constants(samples, default_k_grid(s), 1.0);
      CHECK(plain.K <= h);
      CHECK(plain.C_best == Approx(fit.C_best));
      for (std::size_t i = 0; i < fit.K_grid.size(); ++i) {
        if (fit.K_grid[i] < (h + 1.0) / 2.0 - 0.1) CHECK(fit.C[i] > 1.0 + 1e-6);
      }
    }
  }

  TEST_CASE("two-sided bound fit edge cases") {
    std::vector<BoundSample> none;
    CHECK_THROWS_AS(fit_theorem11_constants(none, {1.0}, 1.0), DomainError);
    std::vector<BoundSample> one{make_bound_sample(disk(), Point::origin(), BoundaryPoint{Vec::axis(0)},
                                                   exact_kernel_ball(disk(), Point::origin(), BoundaryPoint{Vec::axis(0)}), 30.0)};
    const FitReport f = fit_theorem11_constants(one, {0.5, 1.0, 4.0}, 1.0);
    for (double c : f.C) CHECK(c == 1.0);
    CHECK_THROWS_AS(fit_theorem11_constants(one, {}, 1.0), DomainError);
    const Point x = Point::polar(2.0, Vec::axis(0));
    const BoundaryPoint xi{Vec::axis(1)};
    KernelValue wide = exact_kernel_ball(disk(), x, xi);
    wide.method = KernelMethod::cap_ratio;
    wide.ci = {0.5 * wide.value, 2.0 * wide.value};
    std::vector<BoundSample> ci{make_bound_sample(disk(), x, xi, wide, 30.0)};
    const FitReport g = fit_theorem11_constants(ci, {1.0}, 1.0);
    CHECK(g.C_best == Approx(1.0));
    CHECK(g.violations == 0);
  }

  TEST_CASE("cone decay") {
    const double pi = kPi;
    const auto d = range(1.0, 10.0, 0.1);
    const Lemma32Fit f = lemma32_decay_fit(disk(), {pi / 4, pi / 8, pi / 16, pi / 32}, d);
    const Lemma32Fit g = lemma32_decay_fit(disk(), {pi / 8, pi / 16, pi / 32, pi / 64}, d);
    CHECK(f.positive_residuals == 0);
    CHECK(f.axis_slope <= -1.0 + 0.05);
    CHECK(std::abs(f.c5 - g.c5) <= 0.2 * std::max(f.c5, g.c5));
    for (std::size_t i = 0; i < f.theta0.size(); ++i) {
      CHECK(f.log_c4 + f.c5 * std::log(1.0 / f.theta0[i]) >= 0.0);
    }
    const ConeSpec cone = ConeSpec::make(Point::origin(), Vec::axis(0), 0.4, 1.0);
    const auto pts = lemma32_cone_points(disk(), cone, Vec::axis(1), d);
    CHECK_FALSE(pts.empty());
    CHECK_THROWS_AS(lemma32_margin(disk(), cone, BoundaryPoint::from_angle(0.3), pts), DomainError);
    const Point x0p = disk().exp_map(Point::origin(), Vec::axis(0), 1.0);
    CHECK(lemma32_margin(disk(), cone, BoundaryPoint::from_angle(0.5), {x0p}) == Approx(0.0));
    CHECK_THROWS_AS(lemma32_decay_fit(ModelSpace::default_warped(), {0.5, 0.25}, d), UnsupportedSpace);
  }

  TEST_CASE("growth inside a Stolz angle") {
    const BoundaryPoint xi = BoundaryPoint::from_angle(0.7);
    const StolzFit two = stolz_growth_check(disk(), xi, 0.1, range(0.0, 8.0, 1.0));
    CHECK(two.fit.slope == Approx(1.0).epsilon(1e-9));
    CHECK(two.passed);
    CHECK(two.max_gromov <= 1e-9);
    const StolzFit three = stolz_growth_check(ModelSpace::ball(3, 1.0), BoundaryPoint{Vec::axis(2)}, 0.1, {1.0, 3.0});
    CHECK(three.fit.slope == Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(stolz_growth_check(disk(), xi, 0.1, {0.0}), FitFailure);
  }

  TEST_CASE("log-kernel gradient is bounded by the entropy") {
    const HarnackYauReport r = harnack_yau_check(disk(), BoundaryPoint::from_angle(1.0), 6.0, 0.5, 12, 1e-4);
    CHECK(r.radial_large_rho == Approx(1.0).epsilon(0.02));
    CHECK(r.at_origin <= 2.0 * r.entropy);
    CHECK(r.refinement_change <= 0.01);
    const HarnackYauReport r3 = harnack_yau_check(ModelSpace::ball(3, 1.0), BoundaryPoint{Vec::axis(2)}, 4.0, 1.0, 6, 1e-4);
    CHECK(r3.sup_gradient == Approx(2.0).epsilon(1e-4));
    CHECK_THROWS_AS(harnack_yau_check(ModelSpace::default_warped(), BoundaryPoint{}, 4.0, 1.0, 4, 1e-4), UnsupportedSpace);
  }

  TEST_CASE("Holder functions") {
    const HolderFunction f = HolderFunction::make({{BoundaryPoint{Vec::axis(0)}, 1.0}, {BoundaryPoint{Vec::axis(1)}, -0.5}},
                                                  0.5, 1.0 + 0.5 * std::sqrt(kPi));
    CHECK(f.seminorm_bound() == Approx(1.5));
    CHECK(f.norm_bound() >= f.seminorm_bound());
    test::Rand rng(5);
    for (int i = 0; i < 1000; ++i) {
      const BoundaryPoint u{rng.direction(2)};
      const BoundaryPoint v{rng.direction(2)};
      CHECK(f(u) > 0.0);
      CHECK(std::abs(f(u)) <= f.norm_bound());
      CHECK(std::abs(f(u) - f(v)) <= f.seminorm_bound() * std::pow(angle_between(u.dir, v.dir), 0.5) + 1e-12);
    }
    CHECK_THROWS_AS(HolderFunction::make({{BoundaryPoint{}, -1.0}}, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(HolderFunction::make({}, 1.5, 1.0), DomainError);
  }

  TEST_CASE("convergence rate formula") {
    CHECK(theorem72_rate(1.0, 1.0, 2.0) == 0.2);
    CHECK(theorem72_rate(2.0, 0.5, 1.0) == Approx(4.0 * 0.5 / (1.0 + 2.0)));
    CHECK(theorem72_radius(1.0, 1.0, 2.0, std::exp(-1.0)) == Approx(5.0));
    CHECK_THROWS_AS(theorem72_rate(1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(theorem72_radius(1.0, 1.0, 1.0, 1.0), DomainError);
  }

  TEST_CASE("sphere convergence") {
    WalkConfig c;
    c.step = 0.02;
    c.exit_radius = 8.0;
    c.base_seed = 3;
    const HolderFunction constant = HolderFunction::make({}, 1.0, 2.5);
    const SphereConvergence z = sphere_convergence_experiment(disk(), constant, {1.0, 2.0}, 8.0, c, 500, 1.0);
    for (const auto& r : z.rows) CHECK(r.e == 0.0);
    const HolderFunction f = HolderFunction::make({{BoundaryPoint{Vec::axis(0)}, 1.0}}, 1.0, 0.5);
    const SphereConvergence s = sphere_convergence_experiment(disk(), f, {2.0, 4.0}, 8.0, c, 4000, 1.0);
    CHECK(s.within_noise);
    CHECK(s.lambda == Approx(1.0 / 3.0));
    CHECK_THROWS_AS(sphere_convergence_experiment(disk(), f, {9.0}, 8.0, c, 10, 1.0), DomainError);
  }

  TEST_CASE("concentration") {
    WalkConfig c;
    c.step = 0.02;
    c.exit_radius = 8.0;
    c.base_seed = 4;
    const std::int64_t N = 4000;
    const Concentration k = concentration_experiment(disk(), BoundaryPoint{Vec::axis(0)}, {0.0, 2.0, 4.0},
                                                     {kPi / 2, kPi}, c, N);
    CHECK(k.cells.size() == 6);
    for (const auto& cell : k.cells) {
      REQUIRE(cell.exact.has_value());
      if (cell.alpha == kPi) {
        CHECK(cell.complement.hits == 0);
        CHECK(cell.censored);
        CHECK(cell.complement.ci.hi > 0.0);
      }
      if (cell.rho == 0.0 && cell.alpha == kPi / 2) {
        const double p = 0.5;
        CHECK(std::abs(cell.complement.fraction - p) <= 3.0 * std::sqrt(p * (1 - p) / N));
        CHECK(*cell.exact == Approx(p));
      }
    }
    REQUIRE(k.fits.size() == 2);
    REQUIRE(k.fits[0].fit.has_value());
    CHECK(k.fits[0].fit->slope < -0.5);
    CHECK_FALSE(k.fits[1].fit.has_value());
  }

  TEST_CASE("report tables and summaries") {
    CsvTable t({"name", "value", "count"});
    t.add("plain", 0.1, 3);
    t.add("a,b", 1.0 / 3.0, std::int64_t{-2});
    t.add("say \"hi\"", 2.0, 0);
    CHECK(t.str() == "name,value,count\nplain,0.10000000000000001,3\n\"a,b\",0.33333333333333331,-2\n"
                     "\"say \"\"hi\"\"\",2,0\n");
    CHECK_THROWS_AS(t.add("short"), LabError);
    Summary s("demo");
    s.inputs()["seed"] = 1;
    s.check("ok", true);
    s.check("bad", false, "detail");
    CHECK_FALSE(s.passed());
    CHECK(s.failures() == std::vector<std::string>{"bad"});
    CHECK(nlohmann::json::parse(s.str())["schema_version"] == kSummarySchemaVersion);
    CHECK(s.assertion_lines() == "PASS ok\nFAIL bad: detail\n");
    const auto dir = std::filesystem::temp_directory_path() / "hadamard_report_test";
    write_text_file(dir / "t.csv", t.str());
    std::ifstream in(dir / "t.csv");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all == t.str());
    CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
    std::filesystem::remove_all(dir);
  }
}
