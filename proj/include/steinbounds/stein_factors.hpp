#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steinbounds/distances.hpp"
#include "steinbounds/mixing_law.hpp"

namespace steinbounds {

enum class regime_kind { general, monotone, small_variance };

const char* regime_name(regime_kind r);

// Bounds M0 on the Stein solution and M1 on its first difference for the
// mixed-Poisson Stein operator, per metric, with the regime that produced
// each winning value.
struct SteinFactorBounds {
  metric_kind metric;
  double m0 = 0.0;
  double m1 = 0.0;
  regime_kind regime;     // regime backing m1
  regime_kind regime_m0;  // regime backing m0
  double lambda_total = 0.0;
  std::optional<double> beta;
  std::vector<std::string> preconditions_passed;
  // Set when only the general regime applies and e^lambda > 1e3.
  bool vacuous_scale = false;
};

// Smallest applicable factor bounds for MP(mixing) in the given metric.
// Regimes: general (always), monotone mass of Y ~ MP(eta), and
// Var(xi) < E(xi)/2. Componentwise minimum across applicable regimes.
SteinFactorBounds mp_stein_factors(const MixingLaw& mixing, metric_kind metric,
                                   double tol = 1e-12);

struct GaussianSteinFactors {
  double sup_f1;         // sqrt(2/pi) / sigma
  double sup_f2;         // 2 / sigma^2
  double sup_f3_per_h2;  // multiplier of ||h''||, always 2
};

GaussianSteinFactors gaussian_stein_factors(double variance);

}  // namespace steinbounds
