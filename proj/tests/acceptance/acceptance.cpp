#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hadamard/harness.hpp"
#include "hadamard/poisson_kernel.hpp"

using namespace hadamard;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

WalkConfig walk(double step, double R, std::uint64_t seed) {
  WalkConfig c;
  c.step = step;
  c.exit_radius = R;
  c.base_seed = seed;
  return c;
}

Outcome identities() {
  Outcome o;
  for (int n : {2, 3}) {
    const IdentitySweep s = identity_sweep(ModelSpace::ball(n, 1.0), 1000, 11 + n, 8.0, 30.0);
    o.require(s.max_kernel_residual < 1e-6, "n=" + std::to_string(n) + " kernel residual " + num(s.max_kernel_residual));
    o.require(s.max_busemann_residual < 1e-6, "Busemann residual " + num(s.max_busemann_residual));
  }
  return o;
}

Outcome lemmas() {
  Outcome o;
  const ModelSpace ball = ModelSpace::ball(2, 1.0);
  const ModelSpace warped = ModelSpace::default_warped();
  for (const ModelSpace* s : {&ball, &warped}) {
    const LemmaSweep w = lemma_sweep(*s, 1000, 21, s->is_ball() ? 6.0 : 4.0, default_truncation(*s));
    const double lo = std::min({w.min_slack[0], w.min_slack[1], w.min_slack[2]});
    o.require(lo >= -1e-4, s->id() + " min slack " + num(lo));
    if (s->is_ball()) {
      o.require(w.max_slack[0] <= 1e-4 && w.max_slack[2] <= 1e-4,
                "equality 4.1/4.3 max slack " + num(std::max(w.max_slack[0], w.max_slack[2])));
    }
  }
  return o;
}

Outcome bound_fit() {
  Outcome o;
  for (int n : {2, 3}) {
    const ModelSpace s = ModelSpace::ball(n, 1.0);
    auto samples = ball_bound_samples(s, 1000, 31, 30.0);
    const double h = s.as_ball().entropy();
    const FitReport f = fit_theorem11_constants(samples, default_k_grid(s), 1.0, h);
    o.require(f.K == h && f.C_best <= 1.0 + 1e-6 && f.C_at(h) <= 1.0 + 1e-6,
              "n=" + std::to_string(n) + " K=" + num(f.K) + " C=" + num(f.C_best));
  }
  const ModelSpace w = ModelSpace::default_warped();
  auto est = estimated_bound_samples(w, 5, 10, 3.0, walk(0.02, 12.0, 32), 100000, default_truncation(w));
  const FitReport f = fit_theorem11_constants(est, default_k_grid(w), 1.0);
  o.require(f.violations == 0, "warped " + std::to_string(f.samples) + " estimated pairs, K=" + num(f.K) +
                                   " C=" + num(f.C_best) + ", " + std::to_string(f.violations) + " violations");
  return o;
}

Outcome kernel_oracle() {
  Outcome o;
  const ModelSpace disk = ModelSpace::ball(2, 1.0);
  const KernelEstimateReport r =
      estimate_kernel_experiment(disk, Point::from_ball_coords(Vec::planar(0.5, 0.0), 1.0), BoundaryPoint{Vec::axis(0)},
                                 walk(0.01, 12.0, 41), 100000, default_cap_schedule(), {kPi / 8, kPi / 4, kPi / 2, 3 * kPi / 4});
  const Interval ci = r.estimate.kernel.ci;
  o.require(ci.lo <= 3.0 && 3.0 <= ci.hi,
            "P = " + num(r.estimate.kernel.value) + " CI [" + num(ci.lo) + ", " + num(ci.hi) + "] around 3");
  o.require(!r.estimate.non_stabilized, "stabilized");
  for (const auto& c : r.caps) {
    o.require(c.z && std::abs(*c.z) <= 3.0, "cap " + num(c.alpha) + " z=" + (c.z ? num(*c.z) : "n/a"));
  }
  return o;
}

Outcome concentration() {
  Outcome o;
  const ModelSpace disk = ModelSpace::ball(2, 1.0);
  const std::int64_t N = 100000;
  const Concentration c = concentration_experiment(disk, BoundaryPoint{Vec::axis(0)}, {1, 2, 3, 4, 5, 6},
                                                   {kPi / 4, kPi / 2}, walk(0.01, 12.0, 51), N);
  for (const auto& f : c.fits) {
    const bool ok = f.fit && f.fit->slope >= -1.15 && f.fit->slope <= -0.85;
    o.require(ok, "alpha=" + num(f.alpha) + " slope " + (f.fit ? num(f.fit->slope) : "n/a"));
  }
  double worst = 0.0;
  for (const auto& cell : c.cells) {
    const double q = *cell.exact;
    worst = std::max(worst, std::abs(cell.complement.fraction - q) / std::sqrt(q * (1.0 - q) / N));
  }
  o.require(worst <= 3.0, "max |z| " + num(worst));
  return o;
}

Outcome sphere_convergence() {
  Outcome o;
  const HolderFunction f =
      HolderFunction::make({{BoundaryPoint{Vec::axis(0)}, 1.0}, {BoundaryPoint{Vec::axis(1)}, -0.5}}, 1.0, 1.0 + 0.5 * kPi);
  const SphereConvergence ball =
      sphere_convergence_experiment(ModelSpace::ball(2, 1.0), f, {2, 4, 6}, 12.0, walk(0.01, 12.0, 61), 100000, 1.0);
  std::string rows;
  for (const auto& r : ball.rows) rows += " e(" + num(r.R) + ")=" + num(r.e) + "/" + num(r.sigma);
  o.require(ball.within_noise, "ball e <= 3 sigma:" + rows);
  o.require(theorem72_rate(1.0, 1.0, 2.0) == 0.2, "lambda(1,1,2) = " + num(theorem72_rate(1.0, 1.0, 2.0)));

  const ModelSpace w = ModelSpace::default_warped();
  auto samples = estimated_bound_samples(w, 3, 5, 3.0, walk(0.02, 12.0, 62), 20000, default_truncation(w));
  const FitReport fit = fit_theorem11_constants(samples, default_k_grid(w), 1.0);
  const HolderFunction g =
      HolderFunction::make({{BoundaryPoint{Vec::axis(0)}, 1.0}, {BoundaryPoint{Vec::axis(1)}, -0.5}}, 0.5,
                           1.0 + 0.5 * std::sqrt(kPi));
  const SphereConvergence s = sphere_convergence_experiment(w, g, {2, 4, 6}, 12.0, walk(0.01, 12.0, 63), 100000, fit.K);
  std::string report = "warped (soft) K=" + num(fit.K) + " lambda=" + num(s.lambda) + " C=" + num(s.fitted_constant);
  for (const auto& r : s.rows) report += " e(" + num(r.R) + ")=" + num(r.e) + "/" + num(r.sigma);
  if (s.rate_fit) report += " fitted slope " + num(s.rate_fit->slope);
  if (s.inconclusive) report += " inconclusive";
  o.detail += "; " + report;
  return o;
}

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("hadamard_determinism_" + std::to_string(::getpid()));
  const std::vector<std::string> runs = {
      "identity-check --space ball --n 3 --samples 200",
      "lemma-check --space warped --samples 50",
      "estimate-kernel --space ball --N 3000 --step 0.02",
      "concentration --space ball --N 1000 --step 0.02 --rho-list 1,2,3",
      "sphere-convergence --space warped --N 500 --step 0.02",
      "stolz-growth --space warped --N 1000",
      "verify-bounds --space warped --N 500 --points 2 --per-point 3",
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::map<std::string, std::string> first;
    for (int threads : {1, 3, 3}) {
      const fs::path out = root / (std::to_string(i) + "_" + std::to_string(threads));
      fs::remove_all(out);
      const std::string cmd = std::string(HADLAB_PATH) + " " + runs[i] + " --seed 7 --threads " +
                              std::to_string(threads) + " --out " + out.string() + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      const auto csvs = read_csvs(out);
      if (status == -1 || WEXITSTATUS(status) > 1 || csvs.empty()) {
        o.require(false, "run failed: " + runs[i]);
        break;
      }
      if (first.empty()) {
        first = csvs;
        files += csvs.size();
      } else if (csvs != first) {
        o.require(false, "CSV differs with " + std::to_string(threads) + " threads: " + runs[i]);
      }
    }
  }
  fs::remove_all(root);
  if (o.passed) o.detail = std::to_string(runs.size()) + " experiments, " + std::to_string(files) + " CSVs identical across thread counts and reruns";
  return o;
}

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"c1", "kernel and Busemann identities", 10, identities},
      {"c2", "comparison lemmas", 120, lemmas},
      {"c3", "two-sided bound fit", 1200, bound_fit},
      {"c4", "Monte Carlo kernel oracle", 600, kernel_oracle},
      {"c5", "harmonic measure concentration", 900, concentration},
      {"c6", "sphere measure convergence", 1200, sphere_convergence},
      {"c7", "determinism", 600, determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs < c.budget_seconds, "runtime " + num(secs) + " s < " + num(c.budget_seconds) + " s");
    std::cout << (out.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << c.title << "): " << out.detail
              << std::endl;
    if (!out.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
