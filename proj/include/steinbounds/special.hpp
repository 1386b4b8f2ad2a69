#pragma once

#include <cstddef>

namespace steinbounds {

inline constexpr double euler_gamma = 0.577215664901532860606512090082;

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// Antiderivative of the standard normal CDF: x*Phi(x) + phi(x), with
// limit 0 at -infinity. Handy for exact L1 integrals against Phi.
double std_normal_cdf_antideriv(double x);
double std_normal_quantile(double u);

// Phi((x - mean)/sigma); variance must be positive.
double gaussian_cdf(double x, double mean, double variance);

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
double reg_lower_gamma(double a, double x);
// CDF of Gamma(shape, rate).
double gamma_cdf(double x, double shape, double rate);

double log_factorial(std::size_t n);
// e^{-mean} mean^j / j!, computed in log space for large j.
double poisson_pmf(double mean, std::size_t j);
// P(Pois(mean) >= k), summed forward over the tail (stable for small values).
double poisson_tail_geq(double mean, std::size_t k);

// Density of Student's t with dof degrees of freedom.
double student_t_pdf(double x, double dof);

}  // namespace steinbounds
