#pragma once

#include <stdexcept>
#include <string>

namespace delaymid {

// Base class for all domain errors raised by the library. The CLI maps these
// to exit status 1 and prints what() verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// verify_multiplicity found every residual below tolerance.
class Indeterminate : public Error {
 public:
  using Error::Error;
};

// Contour passes (numerically) through a root.
class BoundaryRoot : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class DerivativeVanished : public Error {
 public:
  using Error::Error;
};

class PathLost : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class InsufficientOscillation : public Error {
 public:
  using Error::Error;
};

class PoleAtEvaluationPoint : public Error {
 public:
  using Error::Error;
};

}  // namespace delaymid
