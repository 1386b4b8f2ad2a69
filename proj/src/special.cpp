#include "steinbounds/special.hpp"

#include <cmath>
#include <vector>

#include "steinbounds/errors.hpp"

namespace steinbounds {

namespace {
const double inv_sqrt_2pi = 0.3989422804014326779399461;
const double sqrt_2 = 1.4142135623730950488016887;
}  // namespace

double std_normal_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / sqrt_2); }

double std_normal_cdf_antideriv(double x) {
  // x*Phi(x) + phi(x); for x << 0 the two terms cancel, but the result is
  // bounded by phi(x)/x^2 and underflows harmlessly.
  return x * std_normal_cdf(x) + std_normal_pdf(x);
}

double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw domain_error("std_normal_quantile: u outside (0,1)");
  // Acklam's rational approximation followed by one Halley step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (u <= 1 - plow) {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = std_normal_cdf(x) - u;
  const double g = e / std_normal_pdf(x);
  x -= g / (1 + x * g / 2);
  return x;
}

double gaussian_cdf(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw domain_error("gaussian_cdf: variance must be positive");
  return std_normal_cdf((x - mean) / std::sqrt(variance));
}

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double lower_gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw convergence_error("reg_lower_gamma series did not converge", 1e-16, std::fabs(1.0));
}

// Continued fraction for Q(a,x) = 1 - P(a,x), valid for x >= a+1 (Lentz).
double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw convergence_error("reg_lower_gamma continued fraction did not converge", 1e-16, 1.0);
}

}  // namespace

double reg_lower_gamma(double a, double x) {
  if (x < 0 || a <= 0) throw domain_error("reg_lower_gamma: bad arguments");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_cf(a, x);
}

double gamma_cdf(double x, double shape, double rate) {
  if (shape <= 0 || rate <= 0) throw domain_error("gamma_cdf: bad parameters");
  if (x <= 0) return 0.0;
  return reg_lower_gamma(shape, rate * x);
}

double log_factorial(std::size_t n) {
  static std::vector<double> table = {0.0};
  if (n < table.size()) return table[n];
  if (n <= 4096) {
    while (table.size() <= n)
      table.push_back(table.back() + std::log(static_cast<double>(table.size())));
    return table[n];
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double poisson_pmf(double mean, std::size_t j) {
  if (mean < 0) throw domain_error("poisson_pmf: negative mean");
  if (mean == 0) return j == 0 ? 1.0 : 0.0;
  return std::exp(-mean + static_cast<double>(j) * std::log(mean) - log_factorial(j));
}

double poisson_tail_geq(double mean, std::size_t k) {
  if (k == 0) return 1.0;
  double term = poisson_pmf(mean, k);
  double sum = term;
  std::size_t j = k;
  while (term > sum * 1e-18 && j < k + 100000) {
    ++j;
    term *= mean / static_cast<double>(j);
    sum += term;
  }
  return sum;
}

double student_t_pdf(double x, double dof) {
  if (dof <= 0) throw domain_error("student_t_pdf: dof must be positive");
  const double lognorm = std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2) -
                         0.5 * std::log(dof * M_PI);
  return std::exp(lognorm - 0.5 * (dof + 1) * std::log1p(x * x / dof));
}

}  // namespace steinbounds
