#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hadamard {

class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: a point outside the space, a violated precondition.
class DomainError : public LabError {
 public:
  using LabError::LabError;
};

// Riemannian angle requested with an endpoint equal to the vertex.
class DegenerateAngle : public DomainError {
 public:
  using DomainError::DomainError;
};

class PinchingViolation : public DomainError {
 public:
  PinchingViolation(const std::string& what, std::size_t node, double r, double curvature)
      : DomainError(what), node(node), r(r), curvature(curvature) {}
  std::size_t node;
  double r;
  double curvature;
};

// A bracketed solver ran out of iterations; carries the last bracket.
class SolverFailure : public LabError {
 public:
  SolverFailure(const std::string& what, double lo, double hi)
      : LabError(what), lo(lo), hi(hi) {}
  double lo;
  double hi;
};

// A truncated ideal limit did not settle to the caller's tolerance.
class PrecisionError : public LabError {
 public:
  PrecisionError(const std::string& what, double at_t, double at_2t)
      : LabError(what), at_t(at_t), at_2t(at_2t) {}
  double at_t;
  double at_2t;
};

class UnsupportedSpace : public LabError {
 public:
  using LabError::LabError;
};

class InsufficientSamples : public LabError {
 public:
  InsufficientSamples(const std::string& what, double alpha) : LabError(what), alpha(alpha) {}
  double alpha;
};

class NonExitError : public LabError {
 public:
  NonExitError(const std::string& what, std::vector<std::int64_t> failed)
      : LabError(what), failed(std::move(failed)) {}
  std::vector<std::int64_t> failed;
};

class FitFailure : public LabError {
 public:
  using LabError::LabError;
};

}  // namespace hadamard
