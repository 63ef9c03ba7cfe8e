#pragma once

#include <stdexcept>
#include <string>

namespace kinplume {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its documented invariant (negative rate, bad grid, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Derived quantity requested that the kinetics cannot provide (e.g. R with mu = 0).
class DegenerateKinetics : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the domain of a formula (t = 0 scaling, lattice too small, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace kinplume
