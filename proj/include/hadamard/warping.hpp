#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hadamard {

// Gauss curvature of a rotationally symmetric surface as a function of the
// geodesic distance from the pole. Profiles must be even and smooth at r = 0.
struct CurvatureProfile {
  std::string name;
  std::function<double(double)> curvature;
  double a = 1.0;  // K(r) <= -a^2
  double b = 1.0;  // K(r) >= -b^2

  double operator()(double r) const { return curvature(r); }
  double derivative(double r) const;
};

CurvatureProfile constant_curvature_profile(double a);

// K(r) = -(a^2 + (b^2 - a^2)(1 - cos r)/2): sweeps the whole pinching
// interval along every radial ray.
CurvatureProfile oscillating_profile(double a, double b);

// Tabulated solution of f'' = -K f, f(0) = 0, f'(0) = 1 on a uniform grid.
// Values between nodes come from quintic Hermite interpolation using the
// ODE for the higher derivatives; below kSeriesRadius a Taylor series is used.
class WarpingTable {
 public:
  static constexpr double kSeriesRadius = 1e-3;

  WarpingTable(CurvatureProfile profile, double spacing, std::vector<double> f,
               std::vector<double> fprime);

  const CurvatureProfile& profile() const { return profile_; }
  double spacing() const { return spacing_; }
  double r_max() const { return spacing_ * static_cast<double>(f_.size() - 1); }
  std::size_t size() const { return f_.size(); }
  double node_r(std::size_t i) const { return spacing_ * static_cast<double>(i); }
  double node_f(std::size_t i) const { return f_[i]; }
  double node_fprime(std::size_t i) const { return fp_[i]; }

  struct Jet {
    double f;
    double fprime;
  };
  Jet eval(double r) const;
  double f(double r) const { return eval(r).f; }
  double fprime(double r) const { return eval(r).fprime; }
  double curvature(double r) const { return profile_(r); }

  // Smallest r with f(r) = value; f is strictly increasing.
  double inverse_f(double value) const;

  // Step-doubling estimate of the largest relative local error per node
  // interval of the tabulated solution.
  double max_local_error() const;

  void write_csv(std::ostream& out) const;
  static WarpingTable read_csv(std::istream& in, CurvatureProfile profile,
                               double tolerance = 1e-9);

 private:
  CurvatureProfile profile_;
  double spacing_;
  std::vector<double> f_, fp_, fpp_, fppp_;
  double series3_ = 0.0;
  double series5_ = 0.0;
};

// Integrates the warping ODE with classical RK4 at step 1e-3/b and stores
// nodes every 1e-2/b. Throws PinchingViolation if K leaves [-b^2, -a^2] at a
// node, SolverFailure if the step-doubling error estimate exceeds tol.
WarpingTable solve_warping(const CurvatureProfile& profile, double r_max, double tol = 1e-10);

}  // namespace hadamard
