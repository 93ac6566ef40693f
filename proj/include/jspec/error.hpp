#pragma once

#include <stdexcept>
#include <string>

namespace jspec {

/// Argument outside the mathematical domain of an operation (θ ∉ (0,π), α < -1/2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature too coarse for the requested number of modes.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure (bisection, root bracketing) failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Series or integral truncation could not reach the target accuracy.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jspec
