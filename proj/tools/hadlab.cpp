#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hadamard/errors.hpp"
#include "hadamard/harness.hpp"
#include "hadamard/measure_io.hpp"
#include "hadamard/model_space.hpp"
#include "hadamard/report.hpp"
#include "hadamard/warping.hpp"

using namespace hadamard;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Entry {
  const char* name;
  const char* anchor;
  const char* summary;
};

constexpr Entry kCatalog[] = {
    {"identity-check", "Eq. 1.3", "kernel and Busemann identities through Gromov products"},
    {"lemma-check", "Lem 4.1-4.3", "comparison-angle inequality slacks (alias: invariants)"},
    {"estimate-kernel", "Sec. 1", "Poisson kernel as a limit of harmonic-measure cap ratios"},
    {"verify-bounds", "Thm 1.1", "fit of the two-sided kernel bound constants (C, K)"},
    {"cone-decay", "Lem 3.2", "kernel decay inside cones away from the pole"},
    {"concentration", "Prop 7.1", "harmonic measure concentration along a ray"},
    {"sphere-convergence", "Thm 7.2", "sphere pushforward measures against the boundary measure"},
    {"stolz-growth", "Sec. 5", "exponential kernel growth inside a Stolz angle"},
    {"harnack-yau", "Lem 2.1", "bounded gradient of the log kernel"},
};

void print_catalog() {
  std::printf("hadlab experiments:\n");
  for (const auto& e : kCatalog) std::printf("  %-19s %-12s %s\n", e.name, e.anchor, e.summary);
}

std::string fmt(double v) { return format_double(v); }

// Short form for assertion names.
std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// All options of every experiment; each subcommand registers the ones it uses.
struct Params {
  std::string space;
  int n = 2;
  double a = 1.0;
  std::optional<double> b;
  std::string profile = "oscillating";
  std::string warping_table;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;

  int samples = 1000;
  std::optional<double> rho_max;
  std::optional<double> truncation;

  std::string x = "0.5";
  std::string xi = "1";
  std::optional<std::int64_t> N;
  std::optional<double> step;
  double exit_radius = 12.0;
  double max_step = 0.0;
  bool no_grow = false;
  std::string schedule;
  std::string test_caps = "pi/8,pi/4,pi/2,3pi/4";

  int pairs = 2000;
  int points = 5;
  int per_point = 10;
  std::string k_grid;

  std::string theta_grid = "pi/4,pi/8,pi/16,pi/32";
  double t_min = 1.0;
  double t_max = 10.0;
  double t_step = 0.1;

  std::string rho_list = "1,2,3,4,5,6";
  std::string alpha_list = "pi/4,pi/2";

  std::string R_list = "2,4,6";
  double R_max = 12.0;
  std::optional<double> beta;
  std::optional<double> K;

  double c_prime = 1.0;
  std::string t_list;

  double rho_step = 0.5;
  int angles = 16;
  double h = 1e-4;
};

// "0.5", "pi", "pi/4", "3pi/4", "-pi/2"
double parse_number(const std::string& token) {
  const auto p = token.find("pi");
  try {
    if (p == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw UsageError("");
      return v;
    }
    double coef = 1.0;
    const std::string head = token.substr(0, p);
    if (head == "-") coef = -1.0;
    else if (!head.empty()) coef = std::stod(head);
    double div = 1.0;
    const std::string tail = token.substr(p + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') throw UsageError("");
      div = std::stod(tail.substr(1));
    }
    return coef * kPi / div;
  } catch (const std::exception&) {
    throw UsageError("cannot parse number '" + token + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    if (!token.empty()) out.push_back(parse_number(token));
  }
  if (out.empty()) throw UsageError(what + " must not be empty");
  for (double v : out) {
    if (!std::isfinite(v)) throw UsageError(what + " holds a non-finite value");
  }
  return out;
}

Vec parse_vec(const std::string& text, int dim, const std::string& what) {
  const auto v = parse_list(text, what);
  if (static_cast<int>(v.size()) > dim) throw UsageError(what + " has more than n components");
  Vec out{};
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

BoundaryPoint parse_direction(const std::string& text, int dim, const std::string& what) {
  const Vec v = parse_vec(text, dim, what);
  if (!(norm(v) > 0.0)) throw UsageError(what + " must be a nonzero direction");
  return BoundaryPoint::from_direction(v);
}

ModelSpace build_space(const Params& p) {
  if (!(p.a > 0.0)) throw UsageError("--a must be positive");
  if (p.space == "ball") {
    if (p.n < 2 || p.n > 4) throw UsageError("ball model needs 2 <= n <= 4");
    if (p.b && *p.b != p.a) throw UsageError("ball model has constant curvature: --b must equal --a");
    if (!p.warping_table.empty()) throw UsageError("--warping-table applies to the warped surface");
    return ModelSpace::ball(p.n, p.a);
  }
  if (p.n != 2) throw UsageError("the warped surface is two-dimensional");
  const double b = p.b.value_or(2.0 * p.a);
  if (b < p.a) throw UsageError("--b must be at least --a");
  CurvatureProfile profile;
  if (p.profile == "oscillating") {
    profile = oscillating_profile(p.a, b);
  } else {
    if (p.b && *p.b != p.a) throw UsageError("constant profile needs --b equal to --a");
    profile = constant_curvature_profile(p.a);
  }
  if (p.warping_table.empty()) return ModelSpace::warped(profile);
  std::ifstream in(p.warping_table);
  if (!in) throw UsageError("cannot open warping table " + p.warping_table);
  return ModelSpace::warped(std::make_shared<const WarpingTable>(WarpingTable::read_csv(in, profile)));
}

WalkConfig walk_config(const Params& p, const ModelSpace& space, double default_step) {
  WalkConfig c;
  c.step = p.step.value_or(default_step);
  c.exit_radius = p.exit_radius;
  c.max_step = p.max_step;
  c.grow = !p.no_grow;
  c.base_seed = p.seed;
  c.threads = p.threads;
  if (p.threads < 1) throw UsageError("--threads must be positive");
  try {
    return c.resolved(space);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::int64_t walks(const Params& p, std::int64_t fallback) {
  const std::int64_t n = p.N.value_or(fallback);
  if (n < 2) throw UsageError("--N must be at least 2");
  return n;
}

void require_ball(const ModelSpace& space, const char* experiment) {
  if (!space.is_ball()) {
    throw UsageError(std::string(experiment) + " needs the closed-form kernel of the ball model");
  }
}

std::vector<std::string> columns(const std::string& prefix, int dim) {
  std::vector<std::string> out;
  for (int i = 0; i < dim; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void append_point(std::vector<std::string>& row, const Point& x, int dim) {
  row.push_back(fmt(x.r));
  for (int i = 0; i < dim; ++i) row.push_back(fmt(x.is_origin() ? 0.0 : x.dir[i]));
}

void append_dir(std::vector<std::string>& row, const Vec& v, int dim) {
  for (int i = 0; i < dim; ++i) row.push_back(fmt(v[i]));
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

json to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double d : v) out.push_back(d);
  return out;
}

json vec_json(const Vec& v, int dim) {
  json out = json::array();
  for (int i = 0; i < dim; ++i) out.push_back(v[i]);
  return out;
}

json fit_json(const LinearFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
              {"slope_se", f.slope_se}, {"points", f.points}};
}

json walk_json(const WalkConfig& c, std::int64_t N) {
  return json{{"walks", N},           {"step", c.step},     {"max_step", c.max_step},
              {"grow", c.grow},       {"exit_radius", c.exit_radius},
              {"max_steps", c.max_steps}, {"seed", c.base_seed}};
}

struct Output {
  Summary summary;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

Output make_output(const std::string& experiment, const ModelSpace& space, const Params& p) {
  Output o{Summary(experiment), {}};
  o.summary.inputs()["space"] = space.id();
  o.summary.inputs()["seed"] = p.seed;
  return o;
}

double truncation(const Params& p, const ModelSpace& space) {
  const double T = p.truncation.value_or(default_truncation(space));
  if (!(T > 0.0)) throw UsageError("--truncation must be positive");
  return T;
}

Output run_identity(const Params& p) {
  const ModelSpace space = build_space(p);
  const double T = truncation(p, space);
  const double rho_max = p.rho_max.value_or(8.0 / p.a);
  if (p.samples < 1) throw UsageError("--samples must be positive");
  Output o = make_output("identity-check", space, p);
  o.summary.inputs()["samples"] = p.samples;
  o.summary.inputs()["rho_max"] = rho_max;
  o.summary.inputs()["truncation"] = T;

  const IdentitySweep sweep = identity_sweep(space, p.samples, p.seed, rho_max, T);
  const int n = space.dim();
  CsvTable csv(concat(concat(concat({"space", "seed", "x_r"}, columns("x_u", n)), columns("xi_u", n)),
                      {"kernel_lower_form", "kernel_upper_form", "busemann_lower_form",
                       "busemann_upper_form"}));
  for (const auto& r : sweep.rows) {
    std::vector<std::string> row{space.id(), std::to_string(p.seed)};
    append_point(row, r.x, n);
    append_dir(row, r.xi.dir, n);
    for (double v : {r.kernel_lower_form, r.kernel_upper_form, r.busemann_lower_form, r.busemann_upper_form}) {
      row.push_back(fmt(v));
    }
    csv.add_row(std::move(row));
  }
  o.files.emplace_back("identity.csv", csv.str());
  o.summary.results()["max_busemann_residual"] = sweep.max_busemann_residual;
  o.summary.check("busemann_gromov_identity", sweep.max_busemann_residual < 1e-6,
                  "max residual " + fmt(sweep.max_busemann_residual) + " < 1e-6");
  if (space.is_ball()) {
    o.summary.results()["max_kernel_residual"] = sweep.max_kernel_residual;
    o.summary.check("kernel_identity", sweep.max_kernel_residual < 1e-6,
                    "max residual " + fmt(sweep.max_kernel_residual) + " < 1e-6");
  }
  return o;
}

Output run_lemmas(const Params& p) {
  const ModelSpace space = build_space(p);
  const double T = truncation(p, space);
  const double rho_max = p.rho_max.value_or(4.0 / p.a);
  if (p.samples < 1) throw UsageError("--samples must be positive");
  Output o = make_output("lemma-check", space, p);
  o.summary.inputs()["samples"] = p.samples;
  o.summary.inputs()["rho_max"] = rho_max;
  o.summary.inputs()["truncation"] = T;

  const LemmaSweep sweep = lemma_sweep(space, p.samples, p.seed, rho_max, T);
  const int n = space.dim();
  CsvTable csv(concat(concat(concat(concat({"space", "seed", "lemma", "x_r"}, columns("x_u", n)),
                                    concat({"eta_kind", "eta_r"}, columns("eta_u", n))),
                             columns("xi_u", n)),
                      {"lhs", "rhs", "slack"}));
  for (const auto& r : sweep.rows) {
    std::vector<std::string> row{space.id(), std::to_string(p.seed), to_string(r.kind)};
    append_point(row, r.x, n);
    if (const auto* y = std::get_if<Point>(&r.second)) {
      row.push_back("point");
      append_point(row, *y, n);
    } else {
      row.push_back("ideal");
      row.push_back("inf");
      append_dir(row, std::get<BoundaryPoint>(r.second).dir, n);
    }
    append_dir(row, r.xi.dir, n);
    if (r.terms) {
      row.push_back(fmt(r.terms->lhs));
      row.push_back(fmt(r.terms->rhs));
      row.push_back(fmt(r.terms->slack()));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    csv.add_row(std::move(row));
  }
  o.files.emplace_back("lemmas.csv", csv.str());
  o.summary.results()["collinear_skipped"] = sweep.skipped;
  for (auto kind : {LemmaKind::lemma41, LemmaKind::lemma42, LemmaKind::lemma43}) {
    const auto k = static_cast<std::size_t>(kind);
    const std::string name = to_string(kind);
    o.summary.results()[name] = json{{"min_slack", sweep.min_slack[k]}, {"max_slack", sweep.max_slack[k]}};
    o.summary.check(name + "_nonnegative", sweep.min_slack[k] >= -1e-4,
                    "min slack " + fmt(sweep.min_slack[k]) + " >= -1e-4");
    if (space.is_ball() && kind != LemmaKind::lemma42) {
      o.summary.check(name + "_equality", sweep.max_slack[k] <= 1e-4,
                      "max slack " + fmt(sweep.max_slack[k]) + " <= 1e-4");
    }
  }
  return o;
}

Output run_estimate_kernel(const Params& p) {
  const ModelSpace space = build_space(p);
  const int n = space.dim();
  const Vec u = parse_vec(p.x, n, "--x");
  if (!(norm(u) < 1.0)) throw UsageError("--x must lie in the open unit ball");
  const Point x = Point::from_ball_coords(u, p.a);
  const BoundaryPoint xi = parse_direction(p.xi, n, "--xi");
  const WalkConfig config = walk_config(p, space, 0.01);
  if (!(x.r < config.exit_radius)) throw UsageError("--x must lie inside the exit sphere");
  const std::int64_t N = walks(p, 100000);
  const auto schedule = p.schedule.empty() ? default_cap_schedule() : parse_list(p.schedule, "--schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) throw UsageError("--schedule must be strictly decreasing");
  }
  const auto caps = parse_list(p.test_caps, "--test-caps");
  for (const auto* list : {&schedule, &caps}) {
    for (double c : *list) {
      if (!(c > 0.0) || c > kPi) throw UsageError("cap radii must lie in (0, pi]");
    }
  }
  Output o = make_output("estimate-kernel", space, p);
  o.summary.inputs()["x_r"] = x.r;
  o.summary.inputs()["x_dir"] = vec_json(x.dir, n);
  o.summary.inputs()["xi_dir"] = vec_json(xi.dir, n);
  o.summary.inputs()["walk"] = walk_json(config, N);

  const KernelEstimateReport rep = estimate_kernel_experiment(space, x, xi, config, N, schedule, caps);
  CsvTable levels({"alpha", "hits_x", "hits_o", "ratio", "ci_lo", "ci_hi", "used"});
  for (std::size_t i = 0; i < rep.estimate.levels.size(); ++i) {
    const auto& l = rep.estimate.levels[i];
    const bool used = i == rep.estimate.used_level;
    if (l.ratio) {
      levels.add(l.alpha, l.hits_x, l.hits_o, l.ratio->ratio, l.ratio->ci.lo, l.ratio->ci.hi, used ? 1 : 0);
    } else {
      levels.add(l.alpha, l.hits_x, l.hits_o, "", "", "", used ? 1 : 0);
    }
  }
  CsvTable checks({"alpha", "hits", "walks", "fraction", "ci_lo", "ci_hi", "exact", "z"});
  for (const auto& c : rep.caps) {
    checks.add(c.alpha, c.mass.hits, c.mass.walks, c.mass.fraction, c.mass.ci.lo, c.mass.ci.hi,
               c.exact ? fmt(*c.exact) : std::string(), c.z ? fmt(*c.z) : std::string());
  }
  o.files.emplace_back("kernel_levels.csv", levels.str());
  o.files.emplace_back("cap_checks.csv", checks.str());

  const KernelValue& k = rep.estimate.kernel;
  o.summary.results()["kernel"] = k.value;
  o.summary.results()["ci"] = json::array({k.ci.lo, k.ci.hi});
  o.summary.results()["used_alpha"] = rep.estimate.levels[rep.estimate.used_level].alpha;
  o.summary.results()["non_stabilized"] = rep.estimate.non_stabilized;
  o.summary.check("kernel_positive", k.value > 0.0 && std::isfinite(k.value));
  if (rep.exact) {
    o.summary.results()["exact"] = *rep.exact;
    o.summary.check("exact_within_ci", k.ci.lo <= *rep.exact && *rep.exact <= k.ci.hi,
                    "exact " + fmt(*rep.exact) + " in [" + fmt(k.ci.lo) + ", " + fmt(k.ci.hi) + "]");
    o.summary.check("stabilized", !rep.estimate.non_stabilized);
    for (const auto& c : rep.caps) {
      o.summary.check("cap_mass_alpha_" + tag(c.alpha), std::abs(*c.z) <= 3.0, "z = " + fmt(*c.z));
    }
  }
  return o;
}

std::vector<double> k_grid(const Params& p, const ModelSpace& space) {
  if (p.k_grid.empty()) return default_k_grid(space);
  auto g = parse_list(p.k_grid, "--k-grid");
  for (double K : g) {
    if (!(K > 0.0)) throw UsageError("--k-grid values must be positive");
  }
  return g;
}

Output run_verify_bounds(const Params& p) {
  const ModelSpace space = build_space(p);
  const double T = truncation(p, space);
  const auto grid = k_grid(p, space);
  const int n = space.dim();
  Output o = make_output("verify-bounds", space, p);
  o.summary.inputs()["truncation"] = T;
  o.summary.inputs()["k_grid"] = to_json(grid);
  std::vector<BoundSample> samples;
  std::optional<double> h;
  if (space.is_ball()) {
    if (p.pairs < 1) throw UsageError("--pairs must be positive");
    o.summary.inputs()["pairs"] = p.pairs;
    h = space.as_ball().entropy();
    samples = ball_bound_samples(space, p.pairs, p.seed, T);
  } else {
    if (p.points < 1 || p.per_point < 1) throw UsageError("--points and --per-point must be positive");
    const WalkConfig config = walk_config(p, space, 0.02);
    const std::int64_t N = walks(p, 100000);
    const double rho_max = p.rho_max.value_or(3.0 / p.a);
    if (!(rho_max < config.exit_radius)) throw UsageError("--rho-max must lie inside the exit sphere");
    o.summary.inputs()["points"] = p.points;
    o.summary.inputs()["per_point"] = p.per_point;
    o.summary.inputs()["rho_max"] = rho_max;
    o.summary.inputs()["walk"] = walk_json(config, N);
    samples = estimated_bound_samples(space, p.points, p.per_point, rho_max, config, N, T);
  }
  const FitReport fit = fit_theorem11_constants(samples, grid, p.a, h);

  CsvTable s(concat(concat(concat({"x_r"}, columns("x_u", n)), columns("xi_u", n)),
                    {"d", "g_ox", "g_xo", "P", "P_lo", "P_hi", "method", "lower", "upper"}));
  for (const auto& b : samples) {
    std::vector<std::string> row;
    append_point(row, b.x, n);
    append_dir(row, b.xi.dir, n);
    for (double v : {b.d, b.g_ox, b.g_xo, b.P.value, b.P.ci.lo, b.P.ci.hi}) row.push_back(fmt(v));
    row.push_back(to_string(b.P.method));
    row.push_back(fmt(b.lower));
    row.push_back(fmt(b.upper));
    s.add_row(std::move(row));
  }
  CsvTable g({"K", "C_lower", "C_upper", "C"});
  for (std::size_t i = 0; i < grid.size(); ++i) g.add(grid[i], fit.C_lower[i], fit.C_upper[i], fit.C[i]);
  o.files.emplace_back("bound_samples.csv", s.str());
  o.files.emplace_back("k_grid.csv", g.str());

  o.summary.results()["K"] = fit.K;
  o.summary.results()["C"] = fit.C_best;
  o.summary.results()["samples"] = fit.samples;
  o.summary.results()["violations"] = fit.violations;
  o.summary.check("no_violations", fit.violations == 0, std::to_string(fit.violations) + " violations");
  if (h) {
    const double c_h = fit.C_at(*h);
    o.summary.results()["entropy"] = *h;
    o.summary.results()["C_at_entropy"] = c_h;
    o.summary.check("C_at_entropy", c_h <= 1.0 + 1e-6, "C(K = h) = " + fmt(c_h) + " <= 1 + 1e-6");
    double spacing = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] == fit.K) {
        if (i > 0) spacing = std::max(spacing, grid[i] - grid[i - 1]);
        if (i + 1 < grid.size()) spacing = std::max(spacing, grid[i + 1] - grid[i]);
      }
    }
    o.summary.check("K_brackets_entropy", std::abs(fit.K - *h) <= spacing + 1e-12,
                    "K = " + fmt(fit.K) + ", h = " + fmt(*h));
  }
  return o;
}

Output run_cone_decay(const Params& p) {
  const ModelSpace space = build_space(p);
  require_ball(space, "cone-decay");
  const auto grid = parse_list(p.theta_grid, "--theta-grid");
  for (double t : grid) {
    if (!(t > 0.0) || !(1.25 * t < kPi)) throw UsageError("--theta-grid values must lie in (0, 0.8 pi)");
  }
  if (!(p.t_min >= 1.0) || !(p.t_max > p.t_min) || !(p.t_step > 0.0)) {
    throw UsageError("need 1 <= --t-min < --t-max and --t-step > 0");
  }
  std::vector<double> distances;
  for (int i = 0;; ++i) {
    const double t = p.t_min + i * p.t_step;
    if (t > p.t_max + 1e-12) break;
    distances.push_back(t);
  }
  std::vector<double> halved;
  for (double t : grid) halved.push_back(0.5 * t);
  Output o = make_output("cone-decay", space, p);
  o.summary.inputs()["theta_grid"] = to_json(grid);
  o.summary.inputs()["distances"] = json{{"min", p.t_min}, {"max", p.t_max}, {"step", p.t_step}};

  const Lemma32Fit fit = lemma32_decay_fit(space, grid, distances);
  const Lemma32Fit half = lemma32_decay_fit(space, halved, distances);
  CsvTable csv({"grid", "theta0", "margin", "bound"});
  for (const auto* f : {&fit, &half}) {
    for (std::size_t i = 0; i < f->theta0.size(); ++i) {
      csv.add(f == &fit ? "base" : "halved", f->theta0[i], f->margin[i],
              f->log_c4 + f->c5 * std::log(1.0 / f->theta0[i]));
    }
  }
  o.files.emplace_back("cone_decay.csv", csv.str());
  const double a = p.a;
  const double drift = std::abs(half.c5 - fit.c5) / std::max(std::abs(fit.c5), std::abs(half.c5));
  o.summary.results()["c4"] = fit.c4;
  o.summary.results()["c5"] = fit.c5;
  o.summary.results()["fit"] = fit_json(fit.fit);
  o.summary.results()["halved_grid"] = json{{"c4", half.c4}, {"c5", half.c5}};
  o.summary.results()["c5_relative_change"] = drift;
  o.summary.results()["axis_slope"] = fit.axis_slope;
  o.summary.check("no_positive_residuals", fit.positive_residuals == 0 && half.positive_residuals == 0);
  o.summary.check("axis_decay", fit.axis_slope <= -a + 0.05,
                  "slope " + fmt(fit.axis_slope) + " <= " + fmt(-a + 0.05));
  o.summary.check("c5_stable", drift <= 0.2, "relative change " + fmt(drift) + " <= 0.2");
  return o;
}

Output run_concentration(const Params& p) {
  const ModelSpace space = build_space(p);
  const int n = space.dim();
  const BoundaryPoint xi = parse_direction(p.xi, n, "--xi");
  const WalkConfig config = walk_config(p, space, 0.01);
  const std::int64_t N = walks(p, 100000);
  const auto rhos = parse_list(p.rho_list, "--rho-list");
  const auto alphas = parse_list(p.alpha_list, "--alpha-list");
  for (double r : rhos) {
    if (!(r >= 0.0) || !(r < config.exit_radius)) throw UsageError("--rho-list must lie in [0, exit radius)");
  }
  for (double al : alphas) {
    if (!(al > 0.0) || al > kPi) throw UsageError("--alpha-list must lie in (0, pi]");
  }
  Output o = make_output("concentration", space, p);
  o.summary.inputs()["xi_dir"] = vec_json(xi.dir, n);
  o.summary.inputs()["rho_list"] = to_json(rhos);
  o.summary.inputs()["alpha_list"] = to_json(alphas);
  o.summary.inputs()["walk"] = walk_json(config, N);

  const Concentration c = concentration_experiment(space, xi, rhos, alphas, config, N);
  CsvTable csv({"rho", "alpha", "hits", "walks", "fraction", "ci_lo", "ci_hi", "censored", "exact", "z"});
  bool within = true;
  for (const auto& cell : c.cells) {
    std::string z;
    if (cell.exact) {
      const double q = *cell.exact;
      const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(N));
      const double zz = sigma > 0.0 ? (cell.complement.fraction - q) / sigma : 0.0;
      within = within && std::abs(zz) <= 3.0;
      z = fmt(zz);
    }
    csv.add(cell.rho, cell.alpha, cell.complement.hits, cell.complement.walks, cell.complement.fraction,
            cell.complement.ci.lo, cell.complement.ci.hi, cell.censored ? 1 : 0,
            cell.exact ? fmt(*cell.exact) : std::string(), z);
  }
  o.files.emplace_back("concentration.csv", csv.str());
  json fits = json::array();
  for (const auto& f : c.fits) {
    json j{{"alpha", f.alpha}};
    if (f.fit) {
      j["fit"] = fit_json(*f.fit);
      o.summary.check("decay_alpha_" + tag(f.alpha), f.fit->slope <= -p.a + 0.1,
                      "slope " + fmt(f.fit->slope) + " <= " + fmt(-p.a + 0.1));
    } else {
      j["fit"] = nullptr;
    }
    fits.push_back(std::move(j));
  }
  o.summary.results()["fits"] = std::move(fits);
  o.summary.results()["monotone"] = c.monotone;
  o.summary.check("monotone_in_alpha", c.monotone);
  if (space.is_ball()) o.summary.check("cells_match_quadrature", within, "every |z| <= 3");
  return o;
}

Output run_sphere_convergence(const Params& p) {
  const ModelSpace space = build_space(p);
  const int n = space.dim();
  const WalkConfig config = walk_config(p, space, 0.01);
  const std::int64_t N = walks(p, 100000);
  const auto R_list = parse_list(p.R_list, "--R-list");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0) || (i && !(R_list[i] > R_list[i - 1]))) {
      throw UsageError("--R-list must be positive and increasing");
    }
  }
  if (!(R_list.back() < p.R_max)) throw UsageError("--R-list must stay below --R-max");
  const double b = space.bounds().b;
  const double beta = p.beta.value_or(p.a / b);
  const double K = p.K.value_or(space.is_ball() ? space.as_ball().entropy() : (n - 1) * b);
  HolderFunction f;
  try {
    f = HolderFunction::make({{BoundaryPoint{Vec::axis(0)}, 1.0}, {BoundaryPoint{Vec::axis(1)}, -0.5}}, beta,
                             1.0 + 0.5 * std::pow(kPi, beta));
    theorem72_rate(p.a, beta, K);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  WalkConfig c = config;
  c.exit_radius = p.R_max;
  c.max_steps = 0;
  c = c.resolved(space);
  Output o = make_output("sphere-convergence", space, p);
  o.summary.inputs()["R_list"] = to_json(R_list);
  o.summary.inputs()["R_max"] = p.R_max;
  o.summary.inputs()["beta"] = beta;
  o.summary.inputs()["K"] = K;
  o.summary.inputs()["walk"] = walk_json(c, N);

  const SphereConvergence s = sphere_convergence_experiment(space, f, R_list, p.R_max, c, N, K);
  CsvTable csv({"R", "mean_sphere", "mean_boundary", "e", "sigma", "bound"});
  for (const auto& r : s.rows) {
    csv.add(r.R, r.mean_sphere, r.mean_boundary, r.e, r.sigma, s.fitted_constant * std::exp(-s.lambda * r.R));
  }
  o.files.emplace_back("sphere_convergence.csv", csv.str());
  o.summary.results()["lambda"] = s.lambda;
  o.summary.results()["fitted_constant"] = s.fitted_constant;
  o.summary.results()["inconclusive"] = s.inconclusive;
  o.summary.results()["within_noise"] = s.within_noise;
  if (s.rate_fit) {
    o.summary.results()["rate_fit"] = fit_json(*s.rate_fit);
    o.summary.results()["rate_consistent"] = s.rate_fit->slope <= -s.lambda + 2.0 * s.rate_fit->slope_se;
  }
  if (space.is_ball()) o.summary.check("pushforward_matches_boundary", s.within_noise, "every e(R) <= 3 sigma");
  return o;
}

Output run_stolz(const Params& p) {
  const ModelSpace space = build_space(p);
  const int n = space.dim();
  const BoundaryPoint xi = parse_direction(p.xi, n, "--xi");
  const auto t_list = parse_list(p.t_list.empty() ? (space.is_ball() ? "1,2,3,4,5,6,7,8" : "0.5,1,1.5,2")
                                                  : p.t_list,
                                 "--t-list");
  if (t_list.size() < 2) throw UsageError("--t-list needs at least two radii");
  for (double t : t_list) {
    if (!(t >= 0.0)) throw UsageError("--t-list radii must be nonnegative");
  }
  if (!(p.c_prime >= 0.0)) throw UsageError("--c-prime must be nonnegative");
  Output o = make_output("stolz-growth", space, p);
  o.summary.inputs()["xi_dir"] = vec_json(xi.dir, n);
  o.summary.inputs()["t_list"] = to_json(t_list);
  o.summary.inputs()["c_prime"] = p.c_prime;
  StolzFit fit;
  if (space.is_ball()) {
    fit = stolz_growth_check(space, xi, p.c_prime, t_list);
  } else {
    const WalkConfig config = walk_config(p, space, 0.02);
    const std::int64_t N = walks(p, 100000);
    for (double t : t_list) {
      if (!(t < config.exit_radius)) throw UsageError("--t-list must lie inside the exit sphere");
    }
    o.summary.inputs()["walk"] = walk_json(config, N);
    fit = stolz_growth_check_estimated(space, xi, p.c_prime, t_list, config, N, truncation(p, space));
  }
  CsvTable csv({"rho", "log_p", "log_p_lo", "log_p_hi"});
  for (std::size_t i = 0; i < fit.rho.size(); ++i) csv.add(fit.rho[i], fit.log_p[i], fit.log_p_lo[i], fit.log_p_hi[i]);
  o.files.emplace_back("stolz_growth.csv", csv.str());
  o.summary.results()["fit"] = fit_json(fit.fit);
  o.summary.results()["threshold"] = fit.threshold;
  o.summary.results()["max_gromov"] = fit.max_gromov;
  o.summary.check("exponential_growth", fit.passed,
                  "slope " + fmt(fit.fit.slope) + " (se " + fmt(fit.fit.slope_se) + ") >= " + fmt(fit.threshold));
  return o;
}

Output run_harnack_yau(const Params& p) {
  const ModelSpace space = build_space(p);
  require_ball(space, "harnack-yau");
  const int n = space.dim();
  const BoundaryPoint xi = parse_direction(p.xi, n, "--xi");
  const double rho_max = p.rho_max.value_or(8.0 / p.a);
  if (!(rho_max > 0.0) || !(p.rho_step > 0.0) || p.angles < 1 || !(p.h > 0.0)) {
    throw UsageError("need positive --rho-max, --rho-step, --angles and --fd-step");
  }
  Output o = make_output("harnack-yau", space, p);
  o.summary.inputs()["xi_dir"] = vec_json(xi.dir, n);
  o.summary.inputs()["rho_max"] = rho_max;
  o.summary.inputs()["rho_step"] = p.rho_step;
  o.summary.inputs()["angles"] = p.angles;
  o.summary.inputs()["h"] = p.h;

  const HarnackYauReport r = harnack_yau_check(space, xi, rho_max, p.rho_step, p.angles, p.h);
  CsvTable csv({"quantity", "value"});
  csv.add("sup_gradient", r.sup_gradient);
  csv.add("sup_refined", r.sup_refined);
  csv.add("refinement_change", r.refinement_change);
  csv.add("radial_large_rho", r.radial_large_rho);
  csv.add("at_origin", r.at_origin);
  csv.add("entropy", r.entropy);
  csv.add("nodes", r.nodes);
  csv.add("skipped", r.skipped);
  o.files.emplace_back("harnack_yau.csv", csv.str());
  o.summary.results()["sup_gradient"] = r.sup_gradient;
  o.summary.results()["sup_refined"] = r.sup_refined;
  o.summary.results()["entropy"] = r.entropy;
  const double radial_err = std::abs(r.radial_large_rho - r.entropy) / r.entropy;
  o.summary.check("refinement_stable", r.refinement_change <= 0.01, "change " + fmt(r.refinement_change));
  o.summary.check("radial_matches_entropy", radial_err <= 0.02, "relative error " + fmt(radial_err));
  o.summary.check("origin_bounded", r.at_origin <= 2.0 * r.entropy, "gradient at o " + fmt(r.at_origin));
  return o;
}

void add_common(CLI::App* sub, Params& p) {
  sub->add_option("--space", p.space, "Model space")->required()->check(CLI::IsMember({"ball", "warped"}));
  sub->add_option("--n", p.n, "Dimension")->capture_default_str();
  sub->add_option("--a", p.a, "Curvature bound: K <= -a^2")->capture_default_str();
  sub->add_option("--b", p.b, "Curvature bound: K >= -b^2 (warped default 2a)");
  sub->add_option("--profile", p.profile, "Warped curvature profile")
      ->check(CLI::IsMember({"oscillating", "constant"}))
      ->capture_default_str();
  sub->add_option("--warping-table", p.warping_table, "CSV warping table to load");
  sub->add_option("--seed", p.seed, "Base seed")->capture_default_str();
  sub->add_option("--threads", p.threads, "Worker threads; results do not depend on it")->capture_default_str();
  sub->add_option("--out", p.out, "Output directory (default $HADLAB_OUT or ./hadlab_out)");
  sub->add_option("--config", "INI file of option = value lines; command-line options win");
}

void add_walk(CLI::App* sub, Params& p) {
  sub->add_option("--N", p.N, "Walks per measure");
  sub->add_option("--step", p.step, "Walk step epsilon at o");
  sub->add_option("--exit-radius", p.exit_radius, "Exit sphere radius")->capture_default_str();
  sub->add_option("--max-step", p.max_step, "Largest step (0 selects 0.25/b)");
  sub->add_flag("--no-grow", p.no_grow, "Keep the step constant instead of growing with radius");
}

void add_truncation(CLI::App* sub, Params& p) {
  sub->add_option("--truncation", p.truncation, "Ideal-limit truncation T (default 30/a)");
}

// Flat INI entries become --key=value arguments placed before the command
// line ones, so later occurrences override them.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> out;
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw UsageError("config sections are not supported: " + item.fullname());
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw UsageError("config files cannot include other config files");
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> merge_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> merged;
  std::vector<std::string> rest;
  std::optional<std::string> config;
  bool seen_sub = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config = a.substr(9);
    } else if (!seen_sub && !a.empty() && a[0] != '-') {
      seen_sub = true;
      merged.push_back(a);
    } else {
      rest.push_back(a);
    }
  }
  if (config) {
    const auto c = config_arguments(*config);
    merged.insert(merged.end(), c.begin(), c.end());
  }
  merged.insert(merged.end(), rest.begin(), rest.end());
  return merged;
}

std::filesystem::path output_dir(const Params& p) {
  if (!p.out.empty()) return p.out;
  if (const char* env = std::getenv("HADLAB_OUT"); env && *env) return env;
  return "hadlab_out";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 1) {
    print_catalog();
    return 0;
  }
  Params p;
  CLI::App app{"Numerical laboratory for Poisson kernels on pinched Hadamard manifolds", "hadlab"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::map<CLI::App*, std::function<Output(const Params&)>> runners;

  auto* list = app.add_subcommand("list", "Print the experiment catalog");

  auto* identity = app.add_subcommand("identity-check", kCatalog[0].summary);
  add_common(identity, p);
  add_truncation(identity, p);
  identity->add_option("--samples", p.samples, "Random (x, xi) pairs")->capture_default_str();
  identity->add_option("--rho-max", p.rho_max, "Largest d(o, x) (default 8/a)");
  runners[identity] = run_identity;

  auto* lemmas = app.add_subcommand("lemma-check", kCatalog[1].summary);
  lemmas->alias("invariants");
  add_common(lemmas, p);
  add_truncation(lemmas, p);
  lemmas->add_option("--samples", p.samples, "Random triples")->capture_default_str();
  lemmas->add_option("--rho-max", p.rho_max, "Largest d(o, x) (default 4/a)");
  runners[lemmas] = run_lemmas;

  auto* kernel = app.add_subcommand("estimate-kernel", kCatalog[2].summary);
  add_common(kernel, p);
  add_walk(kernel, p);
  kernel->add_option("--x", p.x, "Base point in Poincare-ball coordinates, comma separated")->capture_default_str();
  kernel->add_option("--xi", p.xi, "Ideal point as a direction at o")->capture_default_str();
  kernel->add_option("--schedule", p.schedule, "Decreasing cap radii (default pi 2^-i, i = 0..8)");
  kernel->add_option("--test-caps", p.test_caps, "Cap radii for mass checks")->capture_default_str();
  runners[kernel] = run_estimate_kernel;

  auto* bounds = app.add_subcommand("verify-bounds", kCatalog[3].summary);
  add_common(bounds, p);
  add_truncation(bounds, p);
  add_walk(bounds, p);
  bounds->add_option("--pairs", p.pairs, "Ball model: exact-kernel sample pairs")->capture_default_str();
  bounds->add_option("--points", p.points, "Warped surface: base points")->capture_default_str();
  bounds->add_option("--per-point", p.per_point, "Warped surface: ideal points per base point")
      ->capture_default_str();
  bounds->add_option("--rho-max", p.rho_max, "Warped surface: largest d(o, x) (default 3/a)");
  bounds->add_option("--k-grid", p.k_grid, "Rates K to scan (default 20 log-spaced in [a/2, 4(n-1)b])");
  runners[bounds] = run_verify_bounds;

  auto* cone = app.add_subcommand("cone-decay", kCatalog[4].summary);
  add_common(cone, p);
  cone->add_option("--theta-grid", p.theta_grid, "Cone apertures")->capture_default_str();
  cone->add_option("--t-min", p.t_min, "Smallest distance from the vertex")->capture_default_str();
  cone->add_option("--t-max", p.t_max, "Largest distance from the vertex")->capture_default_str();
  cone->add_option("--t-step", p.t_step, "Distance spacing")->capture_default_str();
  runners[cone] = run_cone_decay;

  auto* conc = app.add_subcommand("concentration", kCatalog[5].summary);
  add_common(conc, p);
  add_walk(conc, p);
  conc->add_option("--xi", p.xi, "Ideal point as a direction at o")->capture_default_str();
  conc->add_option("--rho-list", p.rho_list, "Distances along the ray to xi")->capture_default_str();
  conc->add_option("--alpha-list", p.alpha_list, "Cap radii")->capture_default_str();
  runners[conc] = run_concentration;

  auto* sphere = app.add_subcommand("sphere-convergence", kCatalog[6].summary);
  add_common(sphere, p);
  add_walk(sphere, p);
  sphere->add_option("--R-list", p.R_list, "Sphere radii")->capture_default_str();
  sphere->add_option("--R-max", p.R_max, "Radius standing in for the boundary")->capture_default_str();
  sphere->add_option("--beta", p.beta, "Holder exponent (default a/b)");
  sphere->add_option("--K", p.K, "Rate K of the two-sided bound (default (n-1)b)");
  runners[sphere] = run_sphere_convergence;

  auto* stolz = app.add_subcommand("stolz-growth", kCatalog[7].summary);
  add_common(stolz, p);
  add_truncation(stolz, p);
  add_walk(stolz, p);
  stolz->add_option("--xi", p.xi, "Ideal point as a direction at o")->capture_default_str();
  stolz->add_option("--c-prime", p.c_prime, "Stolz aperture bound on (o|xi)_x")->capture_default_str();
  stolz->add_option("--t-list", p.t_list, "Distances along the ray to xi");
  runners[stolz] = run_stolz;

  auto* hy = app.add_subcommand("harnack-yau", kCatalog[8].summary);
  add_common(hy, p);
  hy->add_option("--xi", p.xi, "Ideal point as a direction at o")->capture_default_str();
  hy->add_option("--rho-max", p.rho_max, "Grid radius (default 8/a)");
  hy->add_option("--rho-step", p.rho_step, "Radial grid spacing")->capture_default_str();
  hy->add_option("--angles", p.angles, "Angular nodes per circle")->capture_default_str();
  hy->add_option("--fd-step", p.h, "Finite-difference step")->capture_default_str();
  runners[hy] = run_harnack_yau;

  try {
    auto args = merge_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }
  if (list->parsed()) {
    print_catalog();
    return 0;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Output out{Summary(chosen->get_name()), {}};
  try {
    out = runners.at(chosen)(p);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const UnsupportedSpace& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  const std::filesystem::path dir = output_dir(p) / chosen->get_name();
  try {
    for (const auto& [name, text] : out.files) write_text_file(dir / name, text);
    write_text_file(dir / "summary.json", out.summary.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::printf("%s", out.summary.assertion_lines().c_str());
  std::printf("wrote %s\n", dir.string().c_str());
  const auto failures = out.summary.failures();
  for (const auto& f : failures) std::fprintf(stderr, "assertion failed: %s\n", f.c_str());
  return failures.empty() ? 0 : 1;
}
