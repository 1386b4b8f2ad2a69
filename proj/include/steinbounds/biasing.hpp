#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "steinbounds/mixing_law.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

// out[j] proportional to j * law[j], renormalized over the same window.
TruncatedPmf size_bias_pmf(const TruncatedPmf& law);

// Closed-world Steutel catalog: Poisson -> point mass at 1, Binomial(n,p) ->
// Bernoulli(1-p), Gamma(a,r) -> Exponential(r), Dickman(c) -> Uniform(0,c),
// point mass -> point mass at 0. Grid mixings are refused.
IncrementLaw steutel_increment(const MixingLaw& mixing);

// Law of Y ~ MP(eta) with Z^s = Z + Y + 1.
TruncatedPmf mp_sizebias_increment(const MixingLaw& mixing, double tol = 1e-12);

// True iff masses are non-increasing over the window and the tail mass does
// not exceed the final retained mass.
bool is_monotone_mass(const TruncatedPmf& law);

// Z ~ MNB(xi, p) size-biases as Z + Y + G + 1 with Y ~ MNB(eta, p) and G
// geometric(p), all independent.
struct NegBinDecomposition {
  TruncatedPmf increment_mp;  // law of Y
  double geometric_p;
  int shift = 1;

  double total_mean() const;
};

NegBinDecomposition negbin_sizebias_decomposition(const MixingLaw& mixing, double p,
                                                  double tol = 1e-10);

// Whether the inner sum of the mixed-negative-binomial Stein coefficients is
// non-increasing over i = 1..imax (the regime where sharper factors exist).
bool negbin_inner_sum_monotone(const MixingLaw& mixing, double p, int imax = 64);

enum class bias_transform { size, zero, nonzero, genzero };

// A law viewed through the expectations the bias-identity oracle needs.
// Step-density and uniform-smoothed variants evaluate E f'(X) exactly by
// telescoping f, which keeps the oracle independent of quadrature error.
class BiasLaw {
 public:
  using fn = std::function<double(double)>;

  static BiasLaw pmf(TruncatedPmf law, long offset = 0);
  static BiasLaw gaussian(double mean, double variance);
  static BiasLaw dickman(double scale);
  static BiasLaw grid(GriddedLaw law);
  // base + Uniform(0,width), independent.
  static BiasLaw uniform_smoothed(BiasLaw base, double width);
  // Piecewise-constant density: levels[j] on [j, j+1).
  static BiasLaw step_density(std::vector<double> levels);

  double expect(const fn& f) const;
  // E f'(X); uses exact telescoping where the density is piecewise constant.
  double expect_derivative(const fn& f, const fn& fprime) const;
  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }
  // Bound on the mass this view cannot account for (pmf truncation etc).
  double tail_slack() const;

  struct impl;  // exposed for the free evaluation helpers

 private:
  explicit BiasLaw(std::shared_ptr<const impl> p) : impl_(std::move(p)) {}
  std::shared_ptr<const impl> impl_;
};

struct bias_test_fn {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;
};

// {1, x, x^2, x^3, cos x, e^-x} plus seeded random piecewise-linear functions
// with knots on [0, knot_hi].
std::vector<bias_test_fn> standard_test_battery(std::uint64_t seed, int n_random = 4,
                                                double knot_hi = 24.0);

struct bias_check_result {
  double max_residual = 0.0;
  std::string worst_fn;
  // Reported, not hidden: scale of the truncation slack entering the residual.
  double tail_slack = 0.0;
};

// Evaluates both sides of the defining identity of the transform, with
// `claimed` standing in for the transformed variable, and returns the largest
// residual over the battery. Preconditions on moments are enforced.
bias_check_result check_bias_identity(const BiasLaw& base, bias_transform transform,
                                      const BiasLaw& claimed,
                                      const std::vector<bias_test_fn>& fns);

}  // namespace steinbounds
