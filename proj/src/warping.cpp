#include "hadamard/warping.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hadamard/errors.hpp"

namespace hadamard {

namespace {

struct State {
  double f;
  double fp;
};

State rk4_step(const CurvatureProfile& K, double r, State s, double h) {
  auto rhs = [&](double rr, State y) { return State{y.fp, -K(rr) * y.f}; };
  const State k1 = rhs(r, s);
  const State k2 = rhs(r + 0.5 * h, {s.f + 0.5 * h * k1.f, s.fp + 0.5 * h * k1.fp});
  const State k3 = rhs(r + 0.5 * h, {s.f + 0.5 * h * k2.f, s.fp + 0.5 * h * k2.fp});
  const State k4 = rhs(r + h, {s.f + h * k3.f, s.fp + h * k3.fp});
  return {s.f + h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f),
          s.fp + h / 6.0 * (k1.fp + 2.0 * k2.fp + 2.0 * k3.fp + k4.fp)};
}

double quintic_hermite(double t, double h, double p0, double d0, double s0, double p1,
                       double d1, double s1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 0.5 * t3 - t4 + 0.5 * t5;
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return h0 * p0 + h5 * p1 + h * (h1 * d0 + h4 * d1) + h * h * (h2 * s0 + h3 * s1);
}

}  // namespace

double CurvatureProfile::derivative(double r) const {
  constexpr double h = 1e-5;
  if (r < h) return (curvature(r + h) - curvature(std::abs(r - h))) / (2.0 * h);
  return (curvature(r + h) - curvature(r - h)) / (2.0 * h);
}

CurvatureProfile constant_curvature_profile(double a) {
  if (!(a > 0.0)) throw DomainError("curvature rate must be positive");
  return {"constant", [k = -a * a](double) { return k; }, a, a};
}

CurvatureProfile oscillating_profile(double a, double b) {
  if (!(a > 0.0) || !(b >= a)) throw DomainError("need 0 < a <= b");
  const double a2 = a * a;
  const double span = b * b - a2;
  return {"oscillating",
          [a2, span](double r) { return -(a2 + span * 0.5 * (1.0 - std::cos(r))); }, a, b};
}

WarpingTable::WarpingTable(CurvatureProfile profile, double spacing, std::vector<double> f,
                           std::vector<double> fprime)
    : profile_(std::move(profile)), spacing_(spacing), f_(std::move(f)), fp_(std::move(fprime)) {
  if (f_.size() < 2 || f_.size() != fp_.size() || !(spacing_ > 0.0))
    throw DomainError("warping table needs at least two nodes and a positive spacing");
  fpp_.resize(f_.size());
  fppp_.resize(f_.size());
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const double r = node_r(i);
    const double k = profile_(r);
    fpp_[i] = -k * f_[i];
    fppp_[i] = -profile_.derivative(r) * f_[i] - k * fp_[i];
  }
  const double k0 = profile_(0.0);
  constexpr double h = 1e-3;
  const double k2 = (profile_(h) - k0) / (h * h);
  series3_ = -k0 / 6.0;
  series5_ = (k0 * k0 / 6.0 - k2) / 20.0;
}

WarpingTable::Jet WarpingTable::eval(double r) const {
  if (r < kSeriesRadius) {
    if (r < 0.0) throw DomainError("warping table queried at negative radius");
    const double r2 = r * r;
    return {r * (1.0 + r2 * (series3_ + r2 * series5_)),
            1.0 + r2 * (3.0 * series3_ + 5.0 * series5_ * r2)};
  }
  const double x = r / spacing_;
  auto i = static_cast<std::size_t>(x);
  if (i >= f_.size() - 1) {
    if (r > r_max() * (1.0 + 1e-14))
      throw DomainError("radius " + std::to_string(r) + " beyond warping table");
    i = f_.size() - 2;
  }
  const double t = x - static_cast<double>(i);
  return {quintic_hermite(t, spacing_, f_[i], fp_[i], fpp_[i], f_[i + 1], fp_[i + 1], fpp_[i + 1]),
          quintic_hermite(t, spacing_, fp_[i], fpp_[i], fppp_[i], fp_[i + 1], fpp_[i + 1],
                          fppp_[i + 1])};
}

double WarpingTable::inverse_f(double value) const {
  if (value < 0.0) throw DomainError("inverse_f of a negative value");
  if (value == 0.0) return 0.0;
  double lo = 0.0;
  double hi;
  if (value <= f(kSeriesRadius)) {
    hi = kSeriesRadius;
  } else {
    if (value > f_.back()) throw DomainError("inverse_f beyond warping table");
    const auto it = std::lower_bound(f_.begin(), f_.end(), value);
    const auto j = static_cast<std::size_t>(it - f_.begin());
    hi = node_r(j);
    lo = j > 0 ? std::max(node_r(j - 1), 0.0) : 0.0;
    lo = std::max(lo, std::min(kSeriesRadius, hi));
  }
  // Safeguarded Newton; f is convex and increasing so Newton from the right
  // converges monotonically.
  double r = hi;
  for (int it = 0; it < 60; ++it) {
    const Jet j = eval(r);
    double next = r - (j.f - value) / j.fprime;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (eval(next).f > value) hi = next; else lo = next;
    if (std::abs(next - r) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(r, 1e-300)) {
      return next;
    }
    r = next;
  }
  return r;
}

double WarpingTable::max_local_error() const {
  double worst = 0.0;
  // Step doubling against the build step: the coarse pass deviates by about
  // 15 times the local error of the tabulated values.
  const int sub = 5;
  const double h = spacing_ / sub;
  for (std::size_t i = 0; i + 1 < f_.size(); ++i) {
    State s{f_[i], fp_[i]};
    double r = node_r(i);
    for (int k = 0; k < sub; ++k, r += h) s = rk4_step(profile_, r, s, h);
    const double scale = std::max(1.0, std::abs(f_[i + 1]));
    worst = std::max(worst, std::abs(s.f - f_[i + 1]) / scale);
    worst = std::max(worst, std::abs(s.fp - fp_[i + 1]) / std::max(1.0, std::abs(fp_[i + 1])));
  }
  return worst / 15.0;
}

void WarpingTable::write_csv(std::ostream& out) const {
  out << "r,f,fprime\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f_.size(); ++i)
    out << node_r(i) << ',' << f_[i] << ',' << fp_[i] << '\n';
}

WarpingTable WarpingTable::read_csv(std::istream& in, CurvatureProfile profile, double tolerance) {
  std::string line;
  if (!std::getline(in, line) || line != "r,f,fprime")
    throw DomainError("warping CSV must start with header r,f,fprime");
  std::vector<double> r, f, fp;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[3];
    for (auto& c : cell)
      if (!std::getline(row, c, ',')) throw DomainError("malformed warping CSV row: " + line);
    r.push_back(std::stod(cell[0]));
    f.push_back(std::stod(cell[1]));
    fp.push_back(std::stod(cell[2]));
  }
  if (r.size() < 2) throw DomainError("warping CSV has fewer than two nodes");
  const double spacing = r[1] - r[0];
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::abs(r[i] - spacing * static_cast<double>(i)) > 1e-9 * std::max(1.0, r[i]))
      throw DomainError("warping CSV grid is not uniform from r = 0");
  }
  WarpingTable table(std::move(profile), spacing, std::move(f), std::move(fp));
  if (table.max_local_error() > tolerance)
    throw DomainError("warping CSV does not satisfy f'' = -K f for the given profile");
  return table;
}

WarpingTable solve_warping(const CurvatureProfile& profile, double r_max, double tol) {
  if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
  const double a2 = profile.a * profile.a;
  const double b2 = profile.b * profile.b;
  const double spacing = 1e-2 / profile.b;
  const int sub = 10;
  const double h = spacing / sub;
  const auto nodes = static_cast<std::size_t>(std::ceil(r_max / spacing)) + 1;

  std::vector<double> f(nodes), fp(nodes);
  State fine{0.0, 1.0};
  State coarse{0.0, 1.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double r = spacing * static_cast<double>(i);
    const double k = profile(r);
    const double slack = 1e-12 * b2;
    if (k > -a2 + slack || k < -b2 - slack) {
      std::ostringstream msg;
      msg << "curvature profile " << profile.name << " leaves [-b^2, -a^2] at node " << i
          << " (r = " << r << ", K = " << k << ")";
      throw PinchingViolation(msg.str(), i, r, k);
    }
    f[i] = fine.f;
    fp[i] = fine.fp;
    worst = std::max(worst, std::abs(fine.f - coarse.f) / 15.0 / std::max(1.0, std::abs(fine.f)));
    if (i + 1 == nodes) break;
    double rr = r;
    for (int k2 = 0; k2 < sub; ++k2, rr += h) fine = rk4_step(profile, rr, fine, h);
    rr = r;
    for (int k2 = 0; k2 < sub / 2; ++k2, rr += 2.0 * h) coarse = rk4_step(profile, rr, coarse, 2.0 * h);
    if (worst > tol) throw SolverFailure("warping ODE error estimate exceeds tolerance", r, r + spacing);
  }
  return WarpingTable(profile, spacing, std::move(f), std::move(fp));
}

}  // namespace hadamard
