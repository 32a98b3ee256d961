#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace kreinlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root bracket does not straddle a sign change.
class NoSignChange : public Error {
 public:
  NoSignChange(double lo, double hi, double f_lo, double f_hi);
  double lo, hi, f_lo, f_hi;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature hit its subdivision cap before meeting the requested
// tolerance. Carries the best estimate so callers can still report it.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(std::complex<double> best, double achieved, double requested);
  std::complex<double> best;
  double achieved;
  double requested;
};

class LightlikeBoundary : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  ContextMismatch() : Error("vectors belong to different Krein contexts") {}
};

class ContextInvalid : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public Error {
 public:
  NonHermitian(double deviation);
  double deviation;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace kreinlab
