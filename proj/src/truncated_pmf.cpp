#include "steinbounds/truncated_pmf.hpp"

#include <cmath>
#include <string>

#include "steinbounds/errors.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

TruncatedPmf::TruncatedPmf(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
  if (probs_.empty()) throw domain_error("TruncatedPmf: empty mass vector");
  if (tail_mass_ < 0 || tail_mass_ > 1)
    throw domain_error("TruncatedPmf: tail_mass outside [0,1]");
  double sum = 0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0))
      throw domain_error("TruncatedPmf: mass outside [0,1]: " + std::to_string(p));
    sum += p;
  }
  if (std::fabs(sum + tail_mass_ - 1.0) > norm_slack)
    throw domain_error("TruncatedPmf: normalization defect " +
                       std::to_string(sum + tail_mass_ - 1.0));
}

double TruncatedPmf::mean() const {
  double m = 0;
  for (std::size_t j = 1; j < probs_.size(); ++j) m += static_cast<double>(j) * probs_[j];
  return m;
}

double TruncatedPmf::second_moment() const {
  double m = 0;
  for (std::size_t j = 1; j < probs_.size(); ++j)
    m += static_cast<double>(j) * static_cast<double>(j) * probs_[j];
  return m;
}

double TruncatedPmf::variance() const {
  const double mu = mean();
  return second_moment() - mu * mu;
}

double TruncatedPmf::cdf(std::size_t j) const {
  double c = 0;
  for (std::size_t i = 0; i <= j && i < probs_.size(); ++i) c += probs_[i];
  return c;
}

TruncatedPmf TruncatedPmf::poisson(double mean, double tol, std::size_t max_support) {
  if (mean < 0) throw domain_error("poisson pmf: negative mean");
  std::vector<double> probs;
  double term = std::exp(-mean);
  double cum = term;
  probs.push_back(term);
  std::size_t j = 0;
  while (cum < 1.0 - tol && j < max_support) {
    ++j;
    term *= mean / static_cast<double>(j);
    probs.push_back(term);
    cum += term;
  }
  return finish_pmf(std::move(probs), tol, "poisson pmf");
}

TruncatedPmf finish_pmf(std::vector<double> probs, double tol, const char* what) {
  double sum = 0;
  for (double& p : probs) {
    // Quadrature round-off may produce tiny negative masses; clamp within slack.
    if (p < 0) {
      if (p < -norm_slack)
        throw domain_error(std::string(what) + ": negative mass " + std::to_string(p));
      p = 0.0;
    }
    sum += p;
  }
  double tail = 1.0 - sum;
  if (tail < 0) {
    if (tail < -norm_slack)
      throw domain_error(std::string(what) + ": masses exceed 1 by " +
                         std::to_string(-tail));
    // Absorb the overshoot so the normalization audit stays exact.
    for (double& p : probs) p /= sum;
    tail = 0.0;
  }
  if (tail > tol)
    throw convergence_error(std::string(what) + ": truncation tolerance unreachable",
                            tol, tail);
  return TruncatedPmf(std::move(probs), tail);
}

}  // namespace steinbounds
