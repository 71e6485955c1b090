#pragma once

#include <stdexcept>
#include <string>

namespace fracspec {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter outside the admissible domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No evaluation branch could certify the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Requested Fourier modes exceed the alias-free range of a grid.
class AliasError : public Error {
 public:
  using Error::Error;
};

/// Negative operator power applied to a field with a nonzero mean mode.
class ZeroModeError : public Error {
 public:
  using Error::Error;
};

/// The embedding estimate was requested outside its hypothesis.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Refinement did not certify the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Time samples are not on the uniform mesh an operation requires.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Data fails the regularity gate (a > N/2 with a finite Liouville norm).
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// The exponent grid does not bracket a convergence transition.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracspec
