#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steinbounds/distances.hpp"
#include "steinbounds/mixing_law.hpp"
#include "steinbounds/stein_factors.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

// A certified bound: value (absent when a precondition failed), its additive
// components, the precondition outcomes, and a canonical input digest.
struct BoundReport {
  std::string theorem_id;
  std::optional<double> value;
  std::vector<std::pair<std::string, double>> components;
  std::vector<std::pair<std::string, bool>> preconditions;
  std::vector<std::string> warnings;
  std::string inputs_digest;

  bool applicable() const { return value.has_value(); }
  double value_or_throw() const;
  // Sets value = sum of components after verifying non-negativity.
  void finalize();
};

// Aggregate moments of a sum W = Y_1 + ... + Y_n.
struct MomentSummary {
  double theta = 0.0;      // E W
  double sigma2 = 0.0;     // Var W
  double sum_m1 = 0.0;     // sum E[Y_k]
  double sum_m2 = 0.0;     // sum E[Y_k^2]
  double sum_m3 = 0.0;     // sum E[Y_k^3]
  double sum_sq_means = 0.0;  // sum (E Y_k)^2
  double cov_cross = 0.0;  // sum_{i != j} Cov(Y_i, Y_j)

  // sigma2 should equal sum_m2 - sum_sq_means + cov_cross.
  bool consistent(double tol = 1e-8) const;
};

struct mp_bound_options {
  // Compute both role assignments and keep the smaller bound.
  bool auto_orientation = true;
};

// Mixed Poisson vs mixed Poisson: (E xi) M1 d_W(nu, eta) + M0 |E mu - E xi|,
// with Stein factors taken from the z side.
BoundReport mp_distance_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                              metric_kind metric, const mp_bound_options& opt = {});

// Same bound when the w side is not a catalog law: caller supplies the w mean
// and the law of the increment obtained on size-biasing the w mixing.
BoundReport mp_distance_bound_with_increment(double w_mean,
                                             const GriddedLaw& w_increment,
                                             const MixingLaw& z_mixing,
                                             metric_kind metric);

// Ordered-increment corollary: requires stochastic dominance between the two
// increments (verified numerically); the increment distance collapses to the
// variance-over-mean gap.
BoundReport mp_ordered_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                             metric_kind metric);

enum class h_class_kind { wasserstein, tv, kolmogorov };

// Taylor/moment-matching bound: |E h(W) - E h(Z)| <=
// ||Delta^{k+1} h|| / (k+1)! * E|mu - xi|^{k+1} for any coupling. If
// coupling_moment is absent the comonotone (quantile) coupling moment is
// computed. First k moments of the mixings must agree.
BoundReport moment_matched_mp_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                                    int k, std::optional<double> coupling_moment,
                                    h_class_kind h_class);

// E|mu - xi|^{power} under the comonotone coupling, by quantile quadrature.
double comonotone_coupling_moment(const MixingLaw& a, const MixingLaw& b, int power);

// Generic Gaussian bound: E|xi|^3/E[xi^2] + sqrt(2/pi) sigma^{-1}
// |sigma^2 - lambda E[xi^2]| + stein_residual (unstandardized d_W(W,Z)).
BoundReport gauss_generic_bound(double moment3_abs, double moment2, double lambda,
                                double sigma2, double stein_residual);

// CLT with explicit error for negatively associated / associated summands
// (standardized d_W against N(0,1)).
BoundReport clt_neg_assoc_bound(const MomentSummary& m);
BoundReport clt_assoc_bound(const MomentSummary& m);

// Simple random sampling without replacement: moments from the closed forms.
MomentSummary srs_moment_summary(const std::vector<double>& values, long n);
BoundReport srs_bound(const std::vector<double>& values, long n);

// Urn overflow: excess-ball counts Y_j = (S_j - k + 1) 1(S_j >= k) with equal
// probabilities p = 1/m. Moments and Cov(Y_1,Y_2) from the closed forms,
// evaluated in exact rational arithmetic for n <= 30.
TruncatedPmf urn_y_pmf(long m, long n, long k);
double urn_moment(long m, long n, long k, int power);
double urn_cov_y1y2(long m, long n, long k);
MomentSummary urn_moment_summary(long m, long n, long k);
BoundReport urn_overflow_bound(long m, long n, long k, double p);

// Third-moment Gaussian bound: (1/3) ||h''|| (E[W^4] - 3), clamped at zero
// with a warning if the fourth moment dips below the Gaussian value.
BoundReport third_moment_bound(double fourth_moment, double h2_norm);

// Student's t specialisation: 2/(m-4) per unit ||h''||.
BoundReport student_t_bound(double dof);

// Bernoulli-weighted Poisson sums vs MP(c * Dickman): 5c^2/(2n) times the
// part-(a) factor with beta = c e^{-c}; metric tv (paper route) or k.
BoundReport dickman_proposition_bound(double c, long n, metric_kind metric);

}  // namespace steinbounds
