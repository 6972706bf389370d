#pragma once

#include <stdexcept>
#include <string>

namespace vrmass {

/// Invalid input: bad configuration, precondition violated by the caller.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the radial domain of a metric or profile.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, shooting, Newton, fit) did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Improper integral whose integrand decays too slowly to converge.
class NonConvergentTail : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace vrmass
