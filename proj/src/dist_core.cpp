#include "steinbounds/dist_core.hpp"

#include <cmath>

#include "steinbounds/errors.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

double CompoundPoissonParams::mean_rate_mass() const {
  double m = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) m += (i + 1.0) * rates[i];
  return m;
}

TruncatedPmf CompoundPoissonParams::severity_pmf() const {
  if (!(total_rate > 0)) throw domain_error("severity_pmf: total rate must be positive");
  std::vector<double> p(rates.size() + 1, 0.0);
  for (std::size_t i = 0; i < rates.size(); ++i) p[i + 1] = rates[i] / total_rate;
  double sum = 0;
  for (double v : p) sum += v;
  return TruncatedPmf(std::move(p), std::max(0.0, 1.0 - sum));
}

TruncatedPmf mixed_poisson_pmf(const MixingLaw& mixing, std::size_t max_j, double tol) {
  if (!(tol > 0)) throw domain_error("mixed_poisson_pmf: tol must be positive");
  std::vector<double> probs;
  double cum = 0;
  // Tight per-term tolerance so the normalization audit stays within slack.
  const double term_tol = std::min(tol * 1e-3, 1e-15);
  for (std::size_t j = 0; j <= max_j; ++j) {
    const double mass =
        mixing.exp_tilted_moment(static_cast<int>(j), term_tol) *
        std::exp(-log_factorial(j));
    probs.push_back(mass);
    cum += mass;
    if (cum >= 1.0 - tol) break;
  }
  return finish_pmf(std::move(probs), tol, "mixed_poisson_pmf");
}

TruncatedPmf compound_poisson_pmf(const CompoundPoissonParams& params,
                                  std::size_t max_k, double tol) {
  if (!(params.total_rate > 0))
    throw domain_error("compound_poisson_pmf: total rate must be positive");
  for (double r : params.rates)
    if (r < 0) throw domain_error("compound_poisson_pmf: negative rate");
  std::vector<double> probs;
  probs.push_back(std::exp(-params.total_rate));
  double cum = probs[0];
  std::size_t k = 0;
  while (cum < 1.0 - tol && k < max_k) {
    ++k;
    double acc = 0;
    const std::size_t jmax = std::min(k, params.rates.size());
    for (std::size_t j = 1; j <= jmax; ++j)
      acc += static_cast<double>(j) * params.rates[j - 1] * probs[k - j];
    probs.push_back(acc / static_cast<double>(k));
    cum += probs.back();
  }
  return finish_pmf(std::move(probs), tol, "compound_poisson_pmf");
}

CompoundPoissonParams mp_cp_params(const MixingLaw& mixing, const IncrementLaw& increment,
                                   std::size_t max_i) {
  const double mean = mixing.mean();
  if (!(mean > 0)) throw domain_error("mp_cp_params: mixing mean must be positive");
  CompoundPoissonParams out;
  double y_cum = 0;  // cumulative mass of Y ~ MP(eta)
  for (std::size_t i = 1; i <= max_i; ++i) {
    const double y_mass = increment.exp_tilted_moment(static_cast<int>(i - 1)) *
                          std::exp(-log_factorial(i - 1));
    const double lam = mean * y_mass / static_cast<double>(i);
    out.rates.push_back(lam);
    out.total_rate += lam;
    y_cum += y_mass;
    // Remaining rate mass is at most E[xi] P(Y >= i) / (i+1).
    const double remainder = mean * std::max(0.0, 1.0 - y_cum) / (i + 1.0);
    if (remainder < 1e-16 && i >= 4) {
      out.rate_tail_bound = remainder;
      break;
    }
    out.rate_tail_bound = remainder;
  }
  return out;
}

}  // namespace steinbounds
