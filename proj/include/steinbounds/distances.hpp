#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "steinbounds/gridded_law.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

enum class metric_kind { tv, kolmogorov, wasserstein };

const char* metric_name(metric_kind m);

struct DistanceResult {
  enum class method_kind { exact_pmf, exact_grid, empirical };

  metric_kind metric;
  double value = 0.0;
  // Truncation slack for exact paths, 95% bootstrap half-width for empirical.
  double error_bar = 0.0;
  method_kind method = method_kind::exact_pmf;
};

DistanceResult tv_discrete(const TruncatedPmf& a, const TruncatedPmf& b);
DistanceResult wasserstein_discrete(const TruncatedPmf& a, const TruncatedPmf& b);
DistanceResult kolmogorov_discrete(const TruncatedPmf& a, const TruncatedPmf& b);

DistanceResult kolmogorov_grid(const GriddedLaw& a, const GriddedLaw& b);
// L1 distance between the CDFs on the merged grid; exact for step and
// piecewise-linear CDFs, with a curvature term in the error bar otherwise.
DistanceResult wasserstein_grid(const GriddedLaw& a, const GriddedLaw& b);

// Exact integral of |F_atoms - Phi((x-mean)/sigma)| via the antiderivative of
// the normal CDF.
double wasserstein_step_vs_gaussian(const GriddedLaw& atoms, double mean,
                                    double variance);

// Wasserstein distance between an empirical sample and a target CDF given as
// a callable, integrated over [lo, hi]; 95% bootstrap CI over 200 resamples.
DistanceResult empirical_wasserstein(std::vector<double> samples,
                                     const std::function<double(double)>& target_cdf,
                                     double lo, double hi, std::uint64_t seed);

// TV between observed counts (histogram of n_samples draws) and an exact pmf,
// with a bootstrap error bar over multinomial resamples.
DistanceResult empirical_tv_counts(const std::vector<std::uint64_t>& counts,
                                   std::uint64_t n_samples, const TruncatedPmf& pmf,
                                   std::uint64_t seed);

}  // namespace steinbounds
