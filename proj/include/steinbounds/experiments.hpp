#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "steinbounds/bounds.hpp"
#include "steinbounds/gridded_law.hpp"
#include "steinbounds/rng.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

// W = sum_k B_k P_k with E B_k = 1/k and P_k ~ Pois(c k / n).
struct bps_spec {
  long n;
  double c;
};
struct srs_spec {
  std::vector<double> values;
  long n;
};
enum class urn_count_mode { urns, excess };
struct urn_spec {
  long m, n, k;
  urn_count_mode mode;
};
struct dickman_mp_spec {
  double c;
};
struct student_t_spec {
  double dof;
};

struct ExperimentSpec {
  std::variant<bps_spec, srs_spec, urn_spec, dickman_mp_spec, student_t_spec> kind;
  std::uint64_t seed = 1;
  long replicates = 100000;

  std::string to_json() const;
  static ExperimentSpec from_json(const std::string& text);
};

// Exact pmf of the Bernoulli-weighted Poisson sum, built from the exact
// rational law of the weighted Bernoulli sum (n <= 20).
TruncatedPmf bps_exact_pmf(long n, double c, double tol = 1e-12);
// Atom law of the increment (1 - B_I) c I / n obtained on size-biasing.
GriddedLaw bps_increment_atoms(long n, double c);
long bps_draw(long n, double c, counter_rng& rng);

struct srs_exact_result {
  GriddedLaw atoms;       // exact law of the sample sum W
  MomentSummary moments;  // closed-form moment summary
};
// Enumerates all C(m,n) subsets; refuses more than 10^6 of them.
srs_exact_result srs_exact_law(const std::vector<double>& values, long n);
double srs_draw(const std::vector<double>& values, long n, counter_rng& rng);

// Exact law of W = sum_j y(S_j) over multinomial(n; 1/m,...,1/m) counts,
// via a DP over urns; exact rational weights for n <= 30.
GriddedLaw urn_exact_law(long m, long n, long k, urn_count_mode mode);
long urn_draw(long m, long n, long k, urn_count_mode mode, counter_rng& rng);

// Recursive self-similarity sampler for the scale-c Dickman law; the
// truncation bias after `depth` rounds is 2^{-depth} in mean.
double dickman_draw(double c, counter_rng& rng, int depth = 48);

// Exact d_W between the size-bias increment law of the Bernoulli-weighted sum
// (at c = 1) and Uniform(0,1), from the closed-form CDF with harmonic numbers.
double overflow_harmonic_dw(long n);
struct harmonic_decomposition {
  double a;  // floor-part integral, exactly 1/(2n)
  double b;  // harmonic-sum integral
};
harmonic_decomposition overflow_harmonic_terms(long n);

}  // namespace steinbounds
