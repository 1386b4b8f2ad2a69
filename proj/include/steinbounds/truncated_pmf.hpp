#pragma once

#include <cstddef>
#include <vector>

namespace steinbounds {

inline constexpr double norm_slack = 1e-12;

// A finite pmf over {0,1,...,K} plus the certified probability mass beyond K.
// The universal currency for integer laws in this project: constructors audit
// normalization, and distance operations propagate tail_mass into error bars.
class TruncatedPmf {
 public:
  TruncatedPmf(std::vector<double> probs, double tail_mass);

  const std::vector<double>& probs() const { return probs_; }
  double tail_mass() const { return tail_mass_; }
  std::size_t max_index() const { return probs_.size() - 1; }

  // Mass at j, zero beyond the truncation window.
  double at(std::size_t j) const { return j < probs_.size() ? probs_[j] : 0.0; }

  double mean() const;
  double second_moment() const;
  double variance() const;
  // P(X <= j) over the window.
  double cdf(std::size_t j) const;

  // Builds Pois(mean) truncated where cumulative mass >= 1 - tol.
  static TruncatedPmf poisson(double mean, double tol = 1e-12,
                              std::size_t max_support = 100000);

 private:
  std::vector<double> probs_;
  double tail_mass_;
};

// Completes a vector of computed masses into a TruncatedPmf, assigning the
// normalization defect to tail_mass. Throws convergence_error if the defect
// exceeds tol, domain_error if masses are invalid.
TruncatedPmf finish_pmf(std::vector<double> probs, double tol,
                        const char* what);

}  // namespace steinbounds
