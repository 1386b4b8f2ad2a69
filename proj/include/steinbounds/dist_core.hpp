#pragma once

#include <cstddef>
#include <vector>

#include "steinbounds/mixing_law.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

// Parameters lambda_1, lambda_2, ... of a compound Poisson law, truncated at
// a finite index with a certified bound on the dropped rate mass.
struct CompoundPoissonParams {
  std::vector<double> rates;  // rates[i] = lambda_{i+1}
  double total_rate = 0.0;
  double rate_tail_bound = 0.0;

  double rate(std::size_t i) const {  // 1-based index
    return (i >= 1 && i <= rates.size()) ? rates[i - 1] : 0.0;
  }
  // sum_i i*lambda_i; equals the mixing mean when derived from mp_cp_params.
  double mean_rate_mass() const;
  // Severity pmf P(xi = i) = lambda_i / lambda.
  TruncatedPmf severity_pmf() const;
};

// pmf of MP(mixing): P(Z=j) = E[e^{-xi} xi^j] / j!.
TruncatedPmf mixed_poisson_pmf(const MixingLaw& mixing, std::size_t max_j = 4096,
                               double tol = 1e-10);

// Panjer recursion for the compound Poisson pmf.
TruncatedPmf compound_poisson_pmf(const CompoundPoissonParams& params,
                                  std::size_t max_k = 4096, double tol = 1e-10);

// lambda_i = (E xi / i!) E[e^{-eta} eta^{i-1}] from the Steutel increment of
// the mixing law.
CompoundPoissonParams mp_cp_params(const MixingLaw& mixing, const IncrementLaw& increment,
                                   std::size_t max_i = 512);

}  // namespace steinbounds
