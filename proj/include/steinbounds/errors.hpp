#pragma once

#include <stdexcept>
#include <string>

namespace steinbounds {

// Input violates a documented precondition (sigma^2 <= 0, dof <= 4, ...).
class domain_error : public std::invalid_argument {
 public:
  explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested construction lies outside the closed-world catalog
// (e.g. the Steutel increment of a user-supplied grid law).
class unsupported_error : public std::runtime_error {
 public:
  explicit unsupported_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A quadrature or truncation loop could not reach the requested tolerance.
// Carries the tolerance that was actually achieved so callers can decide
// whether the partial result would have been usable.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, double requested, double achieved)
      : std::runtime_error(msg + " (requested tol " + std::to_string(requested) +
                           ", achieved " + std::to_string(achieved) + ")"),
        requested_tol(requested),
        achieved_tol(achieved) {}

  double requested_tol;
  double achieved_tol;
};

}  // namespace steinbounds
