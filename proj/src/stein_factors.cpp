#include "steinbounds/stein_factors.hpp"

#include <cmath>

#include "steinbounds/biasing.hpp"
#include "steinbounds/errors.hpp"

namespace steinbounds {

const char* regime_name(regime_kind r) {
  switch (r) {
    case regime_kind::general:
      return "general";
    case regime_kind::monotone:
      return "monotone";
    case regime_kind::small_variance:
      return "small_variance";
  }
  return "?";
}

namespace {

constexpr double beta_degenerate = 1e-12;

struct candidate {
  double value;
  regime_kind regime;
};

void take_min(candidate& best, double value, regime_kind regime) {
  if (value < best.value) best = {value, regime};
}

}  // namespace

SteinFactorBounds mp_stein_factors(const MixingLaw& mixing, metric_kind metric,
                                   double tol) {
  if (metric == metric_kind::wasserstein)
    throw domain_error("mp_stein_factors: factors available for TV and Kolmogorov only");
  if (!mixing.is_catalog())
    throw unsupported_error("mp_stein_factors: grid mixings have no increment");

  const IncrementLaw eta = steutel_increment(mixing);
  const TruncatedPmf y = mp_sizebias_increment(mixing, std::min(tol, 1e-13));
  const double mean = mixing.mean();
  const double lambda1 = mean * eta.mean_exp_neg();

  // lambda = E(xi) E[1/(Y+1)], with the remainder beyond the window bounded
  // by tail/(K+2).
  double inv_moment = 0;
  for (std::size_t j = 0; j < y.probs().size(); ++j)
    inv_moment += y.probs()[j] / (static_cast<double>(j) + 1.0);
  const double lambda = mean * inv_moment;

  const double beta = mean * (eta.mean_exp_neg() - eta.mean_x_exp_neg());

  SteinFactorBounds out;
  out.metric = metric;
  out.lambda_total = lambda;
  out.beta = beta;

  const double general = std::min(1.0, 1.0 / lambda1) * std::exp(lambda);
  candidate m0{general, regime_kind::general};
  candidate m1{general, regime_kind::general};
  out.preconditions_passed.push_back("general");

  const bool monotone = is_monotone_mass(y);
  if (monotone) {
    out.preconditions_passed.push_back("monotone_mass");
    if (metric == metric_kind::kolmogorov) {
      take_min(m0, std::min(1.0, std::sqrt(2.0 / (M_E * lambda1))), regime_kind::monotone);
      take_min(m1, std::min(0.5, 1.0 / (lambda1 + 1.0)), regime_kind::monotone);
    } else if (beta > beta_degenerate) {
      out.preconditions_passed.push_back("beta_positive");
      take_min(m0, std::min(1.0, 2.0 / std::sqrt(beta)), regime_kind::monotone);
      const double logplus = std::max(0.0, std::log(2.0 * beta));
      take_min(m1, std::min(1.0, (1.0 / beta) * (1.0 / (4.0 * beta) + logplus)),
               regime_kind::monotone);
    }
    // beta ~ 0 (eta a point mass at 1): the TV bounds of the monotone regime
    // divide by beta and are treated as inapplicable.
  }

  const bool small_var = mixing.variance() < 0.5 * mean;
  if (small_var) {
    out.preconditions_passed.push_back("small_variance");
    const double denom = mean - 2.0 * mixing.variance();
    // Valid for TV, hence also for Kolmogorov.
    take_min(m0, std::sqrt(mean) / denom, regime_kind::small_variance);
    take_min(m1, 1.0 / denom, regime_kind::small_variance);
  }

  out.m0 = m0.value;
  out.m1 = m1.value;
  out.regime_m0 = m0.regime;
  out.regime = m1.regime;
  out.vacuous_scale =
      out.regime == regime_kind::general && std::exp(lambda) > 1e3;
  return out;
}

GaussianSteinFactors gaussian_stein_factors(double variance) {
  if (!(variance > 0)) throw domain_error("gaussian_stein_factors: variance <= 0");
  const double sigma = std::sqrt(variance);
  return {std::sqrt(2.0 / M_PI) / sigma, 2.0 / variance, 2.0};
}

}  // namespace steinbounds
