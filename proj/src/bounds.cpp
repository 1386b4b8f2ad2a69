#include "steinbounds/bounds.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdio>

#include "steinbounds/biasing.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/quadrature.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

namespace {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bigint binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  bigint acc = 1;
  for (long i = 0; i < k; ++i) {
    acc *= n - i;
    acc /= i + 1;
  }
  return acc;
}

}  // namespace

double BoundReport::value_or_throw() const {
  if (!value) throw domain_error("BoundReport " + theorem_id + ": not applicable");
  return *value;
}

void BoundReport::finalize() {
  double sum = 0;
  for (const auto& [name, v] : components) sum += v;
  if (sum < 0 && sum > -1e-15) sum = 0;
  if (sum < 0) throw domain_error("BoundReport " + theorem_id + ": negative value");
  value = sum;
}

bool MomentSummary::consistent(double tol) const {
  return std::fabs(sigma2 - (sum_m2 - sum_sq_means + cov_cross)) <= tol;
}

namespace {

// One orientation of the mixed-Poisson bound: z supplies Stein factors.
BoundReport mp_bound_oriented(double w_mean, const GriddedLaw* w_increment,
                              const MixingLaw* w_mixing, const MixingLaw& z_mixing,
                              metric_kind metric) {
  BoundReport r;
  r.theorem_id = "mp";
  const SteinFactorBounds sf = mp_stein_factors(z_mixing, metric);
  const IncrementLaw eta = steutel_increment(z_mixing);

  double dw = 0, dw_bar = 0;
  if (w_mixing != nullptr) {
    const IncrementLaw nu = steutel_increment(*w_mixing);
    if (!nu.same_law(eta)) {
      const DistanceResult d = wasserstein_grid(nu.to_gridded(), eta.to_gridded());
      dw = d.value;
      dw_bar = d.error_bar;
    }
  } else {
    const DistanceResult d = wasserstein_grid(*w_increment, eta.to_gridded());
    dw = d.value;
    dw_bar = d.error_bar;
  }

  // Keep the bound an upper bound: absorb the distance error bar upward.
  r.components.emplace_back("increment_term", z_mixing.mean() * sf.m1 * (dw + dw_bar));
  r.components.emplace_back("mean_term",
                            sf.m0 * std::fabs(w_mean - z_mixing.mean()));
  r.preconditions.emplace_back("catalog_z_mixing", true);
  if (sf.vacuous_scale) r.warnings.push_back("vacuous_scale");
  r.finalize();
  return r;
}

}  // namespace

BoundReport mp_distance_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                              metric_kind metric, const mp_bound_options& opt) {
  BoundReport fwd = mp_bound_oriented(w_mixing.mean(), nullptr, &w_mixing, z_mixing, metric);
  fwd.inputs_digest = "mp(w=" + w_mixing.describe() + ",z=" + z_mixing.describe() +
                      ",metric=" + metric_name(metric) + ")";
  if (!opt.auto_orientation) return fwd;
  BoundReport rev = mp_bound_oriented(z_mixing.mean(), nullptr, &z_mixing, w_mixing, metric);
  if (rev.value_or_throw() < fwd.value_or_throw()) {
    rev.inputs_digest = fwd.inputs_digest;
    rev.warnings.push_back("orientation_swapped");
    return rev;
  }
  return fwd;
}

BoundReport mp_distance_bound_with_increment(double w_mean,
                                             const GriddedLaw& w_increment,
                                             const MixingLaw& z_mixing,
                                             metric_kind metric) {
  BoundReport r = mp_bound_oriented(w_mean, &w_increment, nullptr, z_mixing, metric);
  r.inputs_digest = "mp(w_mean=" + fmt(w_mean) + ",w_increment=grid,z=" +
                    z_mixing.describe() + ",metric=" + metric_name(metric) + ")";
  return r;
}

BoundReport mp_ordered_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                             metric_kind metric) {
  BoundReport r;
  r.theorem_id = "mp-ordered";
  r.inputs_digest = "mp-ordered(w=" + w_mixing.describe() + ",z=" + z_mixing.describe() +
                    ",metric=" + metric_name(metric) + ")";
  const IncrementLaw eta = steutel_increment(z_mixing);
  const IncrementLaw nu = steutel_increment(w_mixing);

  // Numerical stochastic-dominance check on a merged grid.
  const double hi = std::max(eta.support_hi(1e-14), nu.support_hi(1e-14));
  bool eta_ge = true, nu_ge = true;
  constexpr int grid_n = 4096;
  constexpr double slack = 1e-10;
  for (int i = 0; i <= grid_n; ++i) {
    const double x = hi * static_cast<double>(i) / grid_n;
    const double fe = eta.cdf(x), fn = nu.cdf(x);
    if (fe > fn + slack) eta_ge = false;  // eta >=st nu requires F_eta <= F_nu
    if (fn > fe + slack) nu_ge = false;
  }
  const bool ordered = eta_ge || nu_ge;
  r.preconditions.emplace_back("increments_stochastically_ordered", ordered);
  if (!ordered) return r;  // inapplicable: value stays absent

  const SteinFactorBounds sf = mp_stein_factors(z_mixing, metric);
  const double ratio_gap = std::fabs(w_mixing.variance() / w_mixing.mean() -
                                     z_mixing.variance() / z_mixing.mean());
  r.components.emplace_back("increment_term", z_mixing.mean() * sf.m1 * ratio_gap);
  r.components.emplace_back("mean_term",
                            sf.m0 * std::fabs(w_mixing.mean() - z_mixing.mean()));
  if (sf.vacuous_scale) r.warnings.push_back("vacuous_scale");
  r.finalize();
  return r;
}

double comonotone_coupling_moment(const MixingLaw& a, const MixingLaw& b, int power) {
  if (power < 1) throw domain_error("comonotone_coupling_moment: power must be >= 1");
  quad_options opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-9;
  opt.max_panels = 20000;
  // Quantile functions may jump; adaptive panels absorb the kinks.
  return integrate(
             [&](double u) {
               return std::pow(std::fabs(a.quantile(u) - b.quantile(u)),
                               static_cast<double>(power));
             },
             1e-12, 1.0 - 1e-12, opt)
      .value;
}

BoundReport moment_matched_mp_bound(const MixingLaw& w_mixing, const MixingLaw& z_mixing,
                                    int k, std::optional<double> coupling_moment,
                                    h_class_kind h_class) {
  if (k < 0) throw domain_error("moment_matched_mp_bound: k must be >= 0");
  BoundReport r;
  r.theorem_id = "mp-moment-matched";
  r.inputs_digest = "mp-moment-matched(w=" + w_mixing.describe() +
                    ",z=" + z_mixing.describe() + ",k=" + std::to_string(k) + ")";

  // First k moments must agree. Moments via quantile quadrature keeps this
  // uniform across catalog and grid kinds.
  bool match = true;
  for (int j = 1; j <= k; ++j) {
    quad_options opt;
    opt.abs_tol = 1e-11;
    opt.max_panels = 20000;
    auto mom = [&](const MixingLaw& law) {
      return integrate(
                 [&](double u) { return std::pow(law.quantile(u), j); }, 1e-12,
                 1.0 - 1e-12, opt)
          .value;
    };
    if (std::fabs(mom(w_mixing) - mom(z_mixing)) > 1e-8) {
      match = false;
      break;
    }
  }
  r.preconditions.emplace_back("first_k_moments_match", match);
  if (!match) return r;

  const double cm = coupling_moment ? *coupling_moment
                                    : comonotone_coupling_moment(w_mixing, z_mixing, k + 1);
  double h_norm = 1.0;
  if (h_class != h_class_kind::wasserstein) h_norm = std::pow(2.0, k + 1);
  double kfact = 1;
  for (int j = 2; j <= k + 1; ++j) kfact *= j;
  r.components.emplace_back("taylor_term", h_norm * cm / kfact);
  r.finalize();
  return r;
}

BoundReport gauss_generic_bound(double moment3_abs, double moment2, double lambda,
                                double sigma2, double stein_residual) {
  if (!(lambda > 0)) throw domain_error("gauss_generic_bound: lambda must be positive");
  if (!(sigma2 > 0)) throw domain_error("gauss_generic_bound: sigma2 must be positive");
  if (!(moment2 > 0)) throw domain_error("gauss_generic_bound: E[xi^2] must be positive");
  if (moment3_abs < 0 || stein_residual < 0)
    throw domain_error("gauss_generic_bound: negative inputs");
  BoundReport r;
  r.theorem_id = "gauss-generic";
  r.inputs_digest = "gauss-generic(m3=" + fmt(moment3_abs) + ",m2=" + fmt(moment2) +
                    ",lambda=" + fmt(lambda) + ",sigma2=" + fmt(sigma2) +
                    ",residual=" + fmt(stein_residual) + ")";
  const double sigma = std::sqrt(sigma2);
  r.components.emplace_back("third_moment_term", moment3_abs / moment2);
  r.components.emplace_back(
      "variance_mismatch_term",
      std::sqrt(2.0 / M_PI) / sigma * std::fabs(sigma2 - lambda * moment2));
  r.components.emplace_back("stein_residual", stein_residual);
  r.preconditions.emplace_back("positive_scales", true);
  r.finalize();
  return r;
}

namespace {

BoundReport clt_bound_impl(const MomentSummary& m, bool negatively_associated) {
  BoundReport r;
  r.theorem_id = negatively_associated ? "clt-na" : "clt-a";
  r.inputs_digest = r.theorem_id + "(m1=" + fmt(m.sum_m1) + ",m2=" + fmt(m.sum_m2) +
                    ",m3=" + fmt(m.sum_m3) + ",sqm=" + fmt(m.sum_sq_means) +
                    ",cov=" + fmt(m.cov_cross) + ",sigma2=" + fmt(m.sigma2) + ")";
  if (!(m.sigma2 > 0)) throw domain_error(r.theorem_id + ": sigma2 must be positive");
  if (!(m.sum_m2 > 0)) throw domain_error(r.theorem_id + ": sum E[Y^2] must be positive");

  const bool sign_ok =
      negatively_associated ? m.cov_cross <= 1e-10 : m.cov_cross >= -1e-10;
  r.preconditions.emplace_back("covariance_sign", sign_ok);
  if (!m.consistent())
    r.warnings.push_back("moment_identity_mismatch");
  if (!sign_ok) return r;

  const double sigma = std::sqrt(m.sigma2);
  r.components.emplace_back("third_moment_term", m.sum_m3 / (sigma * m.sum_m2));
  const double cov_part = negatively_associated ? -m.cov_cross : m.cov_cross;
  r.components.emplace_back(
      "covariance_term",
      std::sqrt(8.0 / M_PI) / m.sigma2 * (cov_part + m.sum_sq_means));
  r.finalize();
  return r;
}

}  // namespace

BoundReport clt_neg_assoc_bound(const MomentSummary& m) { return clt_bound_impl(m, true); }
BoundReport clt_assoc_bound(const MomentSummary& m) { return clt_bound_impl(m, false); }

MomentSummary srs_moment_summary(const std::vector<double>& values, long n) {
  const long m = static_cast<long>(values.size());
  if (n < 1 || n >= m) throw domain_error("srs: need 1 <= n < len(values)");
  double sc = 0, sc2 = 0, sc3 = 0;
  for (double c : values) {
    if (c < 0) throw domain_error("srs: values must be non-negative");
    if (std::fabs(c - std::round(c)) > 1e-9)
      throw domain_error("srs: values must be integers");
    sc += c;
    sc2 += c * c;
    sc3 += c * c * c;
  }
  const double spair = sc * sc - sc2;  // sum_{i != j} c_i c_j
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  MomentSummary ms;
  ms.theta = dn / dm * sc;
  ms.sum_m1 = ms.theta;
  ms.sum_m2 = dn / dm * sc2;
  ms.sum_m3 = dn / dm * sc3;
  ms.sum_sq_means = dn * (sc / dm) * (sc / dm);
  ms.cov_cross =
      dn * (dn - 1) / (dm * (dm - 1)) * spair - dn * (dn - 1) / (dm * dm) * sc * sc;
  ms.sigma2 = ms.sum_m2 - ms.sum_sq_means + ms.cov_cross;
  return ms;
}

BoundReport srs_bound(const std::vector<double>& values, long n) {
  MomentSummary ms = srs_moment_summary(values, n);
  if (!(ms.sigma2 > 1e-12))
    throw domain_error("srs_bound: degenerate input (zero variance)");
  BoundReport r = clt_neg_assoc_bound(ms);
  r.theorem_id = "srs";
  std::string vals;
  for (double c : values) vals += (vals.empty() ? "" : ",") + fmt(c);
  r.inputs_digest = "srs(values=[" + vals + "],n=" + std::to_string(n) + ")";
  return r;
}

namespace {

// Exact rational moments of the urn excess count; p = 1/m throughout.
rational urn_y_moment_exact(long m, long n, long k, int power) {
  rational acc = 0;
  const rational p(1, m);
  const rational q = 1 - p;
  for (long l = 1; l <= n - k + 1; ++l) {
    const long balls = l + k - 1;
    rational prob = rational(binom(n, balls));
    rational pw = 1;
    for (long i = 0; i < balls; ++i) pw *= p;
    for (long i = 0; i < n - balls; ++i) pw *= q;
    prob *= pw;
    rational lp = 1;
    for (int a = 0; a < power; ++a) lp *= l;
    acc += lp * prob;
  }
  return acc;
}

rational urn_cov_exact(long m, long n, long k) {
  const rational p(1, m);
  const rational one_minus_2p = 1 - 2 * p;
  rational cross = 0;
  for (long i = k; i <= n - k; ++i) {
    for (long j = k; j <= n - i; ++j) {
      // multinomial n!/(i! j! (n-i-j)!), zero when i+j > n by loop bounds
      bigint multi = binom(n, i) * binom(n - i, j);
      rational term = rational(multi);
      rational pw = 1;
      for (long a = 0; a < i + j; ++a) pw *= p;
      const long rest = n - i - j;
      if (rest > 0) {
        for (long a = 0; a < rest; ++a) pw *= one_minus_2p;
      }
      // rest == 0: (1-2p)^0 = 1 even when 1-2p = 0 (m = 2)
      term *= pw;
      term *= rational(i - k + 1) * rational(j - k + 1);
      cross += term;
    }
  }
  const rational mean = urn_y_moment_exact(m, n, k, 1);
  return cross - mean * mean;
}

}  // namespace

TruncatedPmf urn_y_pmf(long m, long n, long k) {
  if (k < 1 || m < 2 || n < 1) throw domain_error("urn_y_pmf: bad parameters");
  std::vector<double> probs(std::max<long>(n - k + 2, 1), 0.0);
  const double p = 1.0 / static_cast<double>(m);
  for (long l = 1; l <= n - k + 1; ++l) {
    const long balls = l + k - 1;
    const double logc = log_factorial(n) - log_factorial(balls) -
                        log_factorial(n - balls);
    probs[l] = std::exp(logc + balls * std::log(p) +
                        (n - balls) * std::log1p(-p));
  }
  double sum = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) sum += probs[i];
  probs[0] = std::max(0.0, 1.0 - sum);
  return TruncatedPmf(std::move(probs), 0.0);
}

double urn_moment(long m, long n, long k, int power) {
  if (n <= 30) return static_cast<double>(urn_y_moment_exact(m, n, k, power));
  // Compensated floating-point path for large n.
  const TruncatedPmf pmf = urn_y_pmf(m, n, k);
  double acc = 0, comp = 0;
  for (std::size_t l = 1; l < pmf.probs().size(); ++l) {
    const double term = std::pow(static_cast<double>(l), power) * pmf.probs()[l];
    const double y = term - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc;
}

double urn_cov_y1y2(long m, long n, long k) {
  if (k < 1 || m < 2 || n < 1) throw domain_error("urn_cov_y1y2: bad parameters");
  if (n <= 30) return static_cast<double>(urn_cov_exact(m, n, k));
  const double p = 1.0 / static_cast<double>(m);
  double acc = 0, comp = 0;
  for (long i = k; i <= n - k; ++i) {
    for (long j = k; j <= n - i; ++j) {
      const long rest = n - i - j;
      const double logmulti = log_factorial(n) - log_factorial(i) -
                              log_factorial(j) - log_factorial(rest);
      double logterm = logmulti + (i + j) * std::log(p);
      // log1p(-1) = -inf when m = 2 and rest > 0; exp gives the right 0.
      if (rest > 0) logterm += rest * std::log1p(-2 * p);
      const double term = (i - k + 1.0) * (j - k + 1.0) * std::exp(logterm);
      const double y = term - comp;
      const double t = acc + y;
      comp = (t - acc) - y;
      acc = t;
    }
  }
  const double mean = urn_moment(m, n, k, 1);
  return acc - mean * mean;
}

MomentSummary urn_moment_summary(long m, long n, long k) {
  MomentSummary ms;
  const double m1 = urn_moment(m, n, k, 1);
  const double m2 = urn_moment(m, n, k, 2);
  const double m3 = urn_moment(m, n, k, 3);
  const double cov = urn_cov_y1y2(m, n, k);
  const double dm = static_cast<double>(m);
  ms.theta = dm * m1;
  ms.sum_m1 = dm * m1;
  ms.sum_m2 = dm * m2;
  ms.sum_m3 = dm * m3;
  ms.sum_sq_means = dm * m1 * m1;
  ms.cov_cross = dm * (dm - 1) * cov;
  ms.sigma2 = dm * (m2 - m1 * m1) + dm * (dm - 1) * cov;
  return ms;
}

BoundReport urn_overflow_bound(long m, long n, long k, double p) {
  if (k < 1) throw domain_error("urn_overflow_bound: k must be >= 1");
  if (m < 2) throw domain_error("urn_overflow_bound: m must be >= 2");
  if (n < k) throw domain_error("urn_overflow_bound: need n >= k");
  if (std::fabs(p - 1.0 / static_cast<double>(m)) > 1e-12)
    throw domain_error("urn_overflow_bound: closed forms require p = 1/m");
  MomentSummary ms = urn_moment_summary(m, n, k);
  if (!(ms.sigma2 > 1e-14))
    throw domain_error("urn_overflow_bound: degenerate input (zero variance)");
  BoundReport r = clt_neg_assoc_bound(ms);
  r.theorem_id = "urn";
  r.inputs_digest = "urn(m=" + std::to_string(m) + ",n=" + std::to_string(n) +
                    ",k=" + std::to_string(k) + ",p=" + fmt(p) + ")";
  return r;
}

BoundReport third_moment_bound(double fourth_moment, double h2_norm) {
  if (h2_norm < 0) throw domain_error("third_moment_bound: negative ||h''||");
  if (fourth_moment < 3.0 - 1e-10)
    throw domain_error("third_moment_bound: fourth moment below the Gaussian value");
  BoundReport r;
  r.theorem_id = "third-moment";
  r.inputs_digest = "third-moment(m4=" + fmt(fourth_moment) + ",h2=" + fmt(h2_norm) + ")";
  double gap = fourth_moment - 3.0;
  if (gap < 0) {
    gap = 0;
    r.warnings.push_back("fourth_moment_clamped");
  }
  r.preconditions.emplace_back("fourth_moment_at_least_gaussian", true);
  r.components.emplace_back("fourth_moment_term", h2_norm * gap / 3.0);
  r.finalize();
  return r;
}

BoundReport student_t_bound(double dof) {
  if (!(dof > 4))
    throw domain_error("student_t_bound: dof must exceed 4 (fourth moment infinite)");
  BoundReport r;
  r.theorem_id = "t";
  r.inputs_digest = "t(dof=" + fmt(dof) + ")";
  r.preconditions.emplace_back("dof_gt_4", true);
  r.components.emplace_back("fourth_moment_term", 2.0 / (dof - 4.0));
  r.finalize();
  return r;
}

BoundReport dickman_proposition_bound(double c, long n, metric_kind metric) {
  if (!(c > 0)) throw domain_error("dickman bound: c must be positive");
  if (n < 1) throw domain_error("dickman bound: n must be >= 1");
  BoundReport r;
  r.theorem_id = "dickman";
  r.inputs_digest = "dickman(c=" + fmt(c) + ",n=" + std::to_string(n) +
                    ",metric=" + metric_name(metric) + ")";
  double m1;
  if (metric == metric_kind::tv) {
    const double beta = c * std::exp(-c);
    const double logplus = std::max(0.0, std::log(2.0 * beta));
    m1 = std::min(1.0, (1.0 / beta) * (1.0 / (4.0 * beta) + logplus));
  } else if (metric == metric_kind::kolmogorov) {
    // (E xi) E e^{-eta} = 1 - e^{-c} for the Uniform(0,c) increment.
    m1 = std::min(0.5, 1.0 / (2.0 - std::exp(-c)));
  } else {
    throw domain_error("dickman bound: metric must be tv or k");
  }
  r.preconditions.emplace_back("monotone_increment_mass", true);
  r.components.emplace_back("increment_term",
                            5.0 * c * c / (2.0 * static_cast<double>(n)) * m1);
  r.components.emplace_back("mean_term", 0.0);
  r.finalize();
  return r;
}

}  // namespace steinbounds
