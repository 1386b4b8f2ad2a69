#include "steinbounds/biasing.hpp"

#include <cmath>
#include <variant>

#include "steinbounds/dickman.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/quadrature.hpp"
#include "steinbounds/rng.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

TruncatedPmf size_bias_pmf(const TruncatedPmf& law) {
  const double mu = law.mean();
  if (!(mu > 0)) throw domain_error("size_bias_pmf: law has zero mean");
  std::vector<double> out(law.probs().size(), 0.0);
  double sum = 0;
  for (std::size_t j = 1; j < out.size(); ++j) {
    out[j] = static_cast<double>(j) * law.probs()[j] / mu;
    sum += out[j];
  }
  for (double& v : out) v /= sum;
  return TruncatedPmf(std::move(out), 0.0);
}

IncrementLaw steutel_increment(const MixingLaw& mixing) {
  const auto& k = mixing.kind();
  if (std::holds_alternative<point_mass_mixing>(k)) return IncrementLaw::bernoulli(0.0);
  if (std::holds_alternative<poisson_mixing>(k)) return IncrementLaw::point(1.0);
  if (const auto* bi = std::get_if<binomial_mixing>(&k))
    return IncrementLaw::bernoulli(1.0 - bi->success_prob);
  if (const auto* ga = std::get_if<gamma_mixing>(&k))
    return IncrementLaw::exponential(ga->rate);
  if (const auto* di = std::get_if<dickman_mixing>(&k))
    return IncrementLaw::uniform(di->scale);
  throw unsupported_error(
      "steutel_increment: no known decomposition for grid mixing laws");
}

TruncatedPmf mp_sizebias_increment(const MixingLaw& mixing, double tol) {
  const IncrementLaw eta = steutel_increment(mixing);
  std::vector<double> probs;
  double cum = 0;
  for (int j = 0; j <= 4096; ++j) {
    const double mass = eta.exp_tilted_moment(j) *
                        std::exp(-log_factorial(static_cast<std::size_t>(j)));
    probs.push_back(mass);
    cum += mass;
    if (cum >= 1.0 - tol) break;
  }
  return finish_pmf(std::move(probs), tol, "mp_sizebias_increment");
}

bool is_monotone_mass(const TruncatedPmf& law) {
  const auto& p = law.probs();
  for (std::size_t j = 1; j < p.size(); ++j) {
    // Tiny relative slack so analytically-equal neighbours (e.g. Pois(1) at
    // j=0,1) do not flip the verdict through rounding.
    if (p[j] > p[j - 1] + 1e-14 * (p[j - 1] + 1e-300)) return false;
  }
  return law.tail_mass() <= p.back() + 1e-14;
}

namespace {

// Rising factorial x(x+1)...(x+j-1); equals Gamma(x+j)/Gamma(x) with the
// correct limit at x = 0.
double pochhammer(double x, int j) {
  double acc = 1;
  for (int i = 0; i < j; ++i) acc *= x + i;
  return acc;
}

// E[ poch(eta, j) p^eta ] for a catalog increment.
double negbin_tilt(const IncrementLaw& eta, double p, int j) {
  const auto& k = eta.kind();
  if (const auto* pt = std::get_if<increment_point>(&k))
    return pochhammer(pt->location, j) * std::pow(p, pt->location);
  if (const auto* be = std::get_if<increment_bernoulli>(&k)) {
    const double at0 = (j == 0) ? 1.0 : 0.0;
    return (1.0 - be->mean) * at0 + be->mean * pochhammer(1.0, j) * p;
  }
  if (const auto* ex = std::get_if<increment_exponential>(&k)) {
    quad_options opt;
    opt.abs_tol = 1e-15;
    const double hi = 40.0 / ex->rate + 20.0;
    return integrate(
               [&](double x) {
                 return pochhammer(x, j) * std::pow(p, x) * ex->rate *
                        std::exp(-ex->rate * x);
               },
               0.0, hi, opt)
        .value;
  }
  if (const auto* un = std::get_if<increment_uniform>(&k)) {
    quad_options opt;
    opt.abs_tol = 1e-15;
    return integrate(
               [&](double x) { return pochhammer(x, j) * std::pow(p, x) / un->width; },
               0.0, un->width, opt)
        .value;
  }
  throw unsupported_error("negbin_tilt: grid increments unsupported");
}

}  // namespace

double NegBinDecomposition::total_mean() const {
  return increment_mp.mean() + (1.0 - geometric_p) / geometric_p + shift;
}

NegBinDecomposition negbin_sizebias_decomposition(const MixingLaw& mixing, double p,
                                                  double tol) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error("negbin_sizebias_decomposition: p outside (0,1)");
  const IncrementLaw eta = steutel_increment(mixing);
  // P(Y=j) = E[ Gamma(j+eta)/(j! Gamma(eta)) (1-p)^j p^eta ].
  std::vector<double> probs;
  double cum = 0;
  const double q = 1.0 - p;
  for (int j = 0; j <= 65536; ++j) {
    const double mass = negbin_tilt(eta, p, j) *
                        std::exp(j * std::log(q) - log_factorial(static_cast<std::size_t>(j)));
    probs.push_back(mass);
    cum += mass;
    if (cum >= 1.0 - tol) break;
  }
  return NegBinDecomposition{finish_pmf(std::move(probs), tol, "negbin increment"), p, 1};
}

bool negbin_inner_sum_monotone(const MixingLaw& mixing, double p, int imax) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("negbin_inner_sum_monotone: bad p");
  const IncrementLaw eta = steutel_increment(mixing);
  const double q = 1.0 - p;
  double prev = -1;
  for (int i = 1; i <= imax; ++i) {
    double s = 0;
    for (int j = 0; j <= i - 1; ++j) {
      const int l = i - j - 1;
      s += std::exp(i * std::log(q) - log_factorial(static_cast<std::size_t>(l))) *
           negbin_tilt(eta, p, l);
    }
    if (i > 1 && s > prev * (1.0 + 1e-12) + 1e-15) return false;
    prev = s;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bias-identity oracle
// ---------------------------------------------------------------------------

struct pmf_view {
  TruncatedPmf law;
  long offset;
};
struct gaussian_view {
  double mean, variance;
};
struct dickman_view {
  double scale;
};
struct grid_view {
  GriddedLaw law;
};
struct smoothed_view {
  std::shared_ptr<const struct BiasLaw::impl> base;
  double width;
};
struct step_view {
  std::vector<double> levels;
};

struct BiasLaw::impl {
  std::variant<pmf_view, gaussian_view, dickman_view, grid_view, smoothed_view,
               step_view>
      v;
};

BiasLaw BiasLaw::pmf(TruncatedPmf law, long offset) {
  return BiasLaw(std::make_shared<impl>(impl{pmf_view{std::move(law), offset}}));
}
BiasLaw BiasLaw::gaussian(double mean, double variance) {
  if (!(variance > 0)) throw domain_error("BiasLaw::gaussian: variance <= 0");
  return BiasLaw(std::make_shared<impl>(impl{gaussian_view{mean, variance}}));
}
BiasLaw BiasLaw::dickman(double scale) {
  if (!(scale > 0)) throw domain_error("BiasLaw::dickman: scale <= 0");
  return BiasLaw(std::make_shared<impl>(impl{dickman_view{scale}}));
}
BiasLaw BiasLaw::grid(GriddedLaw law) {
  return BiasLaw(std::make_shared<impl>(impl{grid_view{std::move(law)}}));
}
BiasLaw BiasLaw::uniform_smoothed(BiasLaw base, double width) {
  if (!(width > 0)) throw domain_error("BiasLaw::uniform_smoothed: width <= 0");
  return BiasLaw(std::make_shared<impl>(impl{smoothed_view{base.impl_, width}}));
}
BiasLaw BiasLaw::step_density(std::vector<double> levels) {
  double total = 0;
  for (double l : levels) {
    if (l < -norm_slack) throw domain_error("step_density: negative level");
    total += l;
  }
  if (std::fabs(total - 1.0) > 1e-6)
    throw domain_error("step_density: levels integrate to " + std::to_string(total));
  return BiasLaw(std::make_shared<impl>(impl{step_view{std::move(levels)}}));
}

namespace {

double view_expect(const BiasLaw::impl& im, const BiasLaw::fn& f);

double view_expect(const BiasLaw::impl& im, const BiasLaw::fn& f) {
  if (const auto* pv = std::get_if<pmf_view>(&im.v)) {
    double acc = 0;
    for (std::size_t j = 0; j < pv->law.probs().size(); ++j)
      acc += pv->law.probs()[j] * f(static_cast<double>(static_cast<long>(j) + pv->offset));
    return acc;
  }
  if (const auto* gv = std::get_if<gaussian_view>(&im.v)) {
    const double s = std::sqrt(gv->variance);
    quad_options opt;
    opt.abs_tol = 1e-13;
    return integrate(
               [&](double x) { return f(x) * std_normal_pdf((x - gv->mean) / s) / s; },
               gv->mean - 12 * s, gv->mean + 12 * s, opt)
        .value;
  }
  if (const auto* dv = std::get_if<dickman_view>(&im.v)) {
    const auto& t = dickman_table::instance();
    quad_options opt;
    opt.abs_tol = 1e-13;
    const double hi = dv->scale * 40.0;
    for (double b = dv->scale; b < hi; b += dv->scale) opt.breaks.push_back(b);
    return integrate([&](double x) { return f(x) * t.density(x, dv->scale); }, 0.0, hi,
                     opt)
        .value;
  }
  if (const auto* gr = std::get_if<grid_view>(&im.v)) {
    const GriddedLaw& law = gr->law;
    if (law.law_kind() == GriddedLaw::kind::atoms) {
      double acc = 0, prev = 0;
      for (std::size_t i = 0; i < law.grid().size(); ++i) {
        acc += f(law.grid()[i]) * (law.cdf_values()[i] - prev);
        prev = law.cdf_values()[i];
      }
      return acc;
    }
    double acc = law.cdf_values().front() * f(law.support_lo());
    quad_options opt;
    opt.abs_tol = 1e-13;
    for (std::size_t i = 1; i < law.grid().size(); ++i) {
      const double mass = law.cdf_values()[i] - law.cdf_values()[i - 1];
      if (mass <= 0) continue;
      const double a = law.grid()[i - 1], b = law.grid()[i];
      acc += mass / (b - a) * integrate(f, a, b, opt).value;
    }
    return acc;
  }
  if (const auto* sv = std::get_if<smoothed_view>(&im.v)) {
    // E f(B + U) = (1/w) \int_0^w E f(B + u) du; adaptive in u since f may
    // carry kinks (piecewise-linear battery functions).
    const double w = sv->width;
    quad_options opt;
    opt.abs_tol = 1e-11;
    opt.rel_tol = 1e-10;
    opt.max_panels = 512;
    return integrate(
               [&](double u) {
                 return view_expect(*sv->base, [&](double x) { return f(x + u); });
               },
               0.0, w, opt)
               .value /
           w;
  }
  const auto& st = std::get<step_view>(im.v);
  // Per-cell Gauss-Legendre; cells are unit intervals [j, j+1).
  static const double gx4[4] = {-0.8611363115940526, -0.3399810435848563,
                                0.3399810435848563, 0.8611363115940526};
  static const double gw4[4] = {0.3478548451374538, 0.6521451548625461,
                                0.6521451548625461, 0.3478548451374538};
  double acc = 0;
  for (std::size_t j = 0; j < st.levels.size(); ++j) {
    if (st.levels[j] == 0) continue;
    double cell = 0;
    for (int m = 0; m < 4; ++m) cell += gw4[m] * f(j + 0.5 + 0.5 * gx4[m]);
    acc += st.levels[j] * cell * 0.5;
  }
  return acc;
}

double view_expect_derivative(const BiasLaw::impl& im, const BiasLaw::fn& f,
                              const BiasLaw::fn& fprime) {
  if (const auto* sv = std::get_if<smoothed_view>(&im.v)) {
    // Exact telescoping: E f'(B+U) = (1/w) E[f(B+w) - f(B)].
    const double w = sv->width;
    const double hi = view_expect(*sv->base, [&](double x) { return f(x + w); });
    const double lo = view_expect(*sv->base, f);
    return (hi - lo) / w;
  }
  if (const auto* st = std::get_if<step_view>(&im.v)) {
    double acc = 0;
    for (std::size_t j = 0; j < st->levels.size(); ++j)
      if (st->levels[j] != 0)
        acc += st->levels[j] * (f(static_cast<double>(j + 1)) - f(static_cast<double>(j)));
    return acc;
  }
  return view_expect(im, fprime);
}

}  // namespace

double BiasLaw::expect(const fn& f) const { return view_expect(*impl_, f); }

double BiasLaw::expect_derivative(const fn& f, const fn& fprime) const {
  return view_expect_derivative(*impl_, f, fprime);
}

double BiasLaw::mean() const {
  return expect([](double x) { return x; });
}

double BiasLaw::second_moment() const {
  return expect([](double x) { return x * x; });
}

double BiasLaw::tail_slack() const {
  if (const auto* pv = std::get_if<pmf_view>(&impl_->v)) return pv->law.tail_mass();
  if (const auto* sv = std::get_if<smoothed_view>(&impl_->v)) {
    if (const auto* pb = std::get_if<pmf_view>(&sv->base->v)) return pb->law.tail_mass();
    return 0.0;
  }
  return 0.0;
}

std::vector<bias_test_fn> standard_test_battery(std::uint64_t seed, int n_random,
                                                double knot_hi) {
  std::vector<bias_test_fn> fns;
  fns.push_back({"const1", [](double) { return 1.0; }, [](double) { return 0.0; }});
  fns.push_back({"x", [](double x) { return x; }, [](double) { return 1.0; }});
  fns.push_back({"x^2", [](double x) { return x * x; }, [](double x) { return 2 * x; }});
  fns.push_back(
      {"x^3", [](double x) { return x * x * x; }, [](double x) { return 3 * x * x; }});
  fns.push_back({"cos", [](double x) { return std::cos(x); },
                 [](double x) { return -std::sin(x); }});
  fns.push_back({"exp(-x)", [](double x) { return std::exp(-x); },
                 [](double x) { return -std::exp(-x); }});
  constexpr int knots = 17;
  for (int r = 0; r < n_random; ++r) {
    counter_rng rng(seed, 0x706c696eULL, static_cast<std::uint64_t>(r));
    auto values = std::make_shared<std::vector<double>>(knots);
    for (double& v : *values) v = rng.uniform(-1.0, 1.0);
    const double step = knot_hi / (knots - 1);
    auto f = [values, step](double x) {
      const int n = static_cast<int>(values->size());
      if (x <= 0) return values->front();
      const double pos = x / step;
      if (pos >= n - 1) return values->back();
      const int i = static_cast<int>(pos);
      const double t = pos - i;
      return (*values)[i] + t * ((*values)[i + 1] - (*values)[i]);
    };
    auto fp = [values, step](double x) {
      const int n = static_cast<int>(values->size());
      if (x <= 0 || x / step >= n - 1) return 0.0;
      const int i = static_cast<int>(x / step);
      return ((*values)[i + 1] - (*values)[i]) / step;
    };
    fns.push_back({"pwl" + std::to_string(r), f, fp});
  }
  return fns;
}

bias_check_result check_bias_identity(const BiasLaw& base, bias_transform transform,
                                      const BiasLaw& claimed,
                                      const std::vector<bias_test_fn>& fns) {
  const double mu = base.mean();
  const double m2 = base.second_moment();
  const double var = m2 - mu * mu;
  switch (transform) {
    case bias_transform::size:
      if (!(mu > 0)) throw domain_error("check_bias_identity: size-bias needs E X > 0");
      break;
    case bias_transform::zero:
      if (std::fabs(mu) > 1e-9)
        throw domain_error("check_bias_identity: zero-bias needs E X = 0");
      if (!(m2 > 0)) throw domain_error("check_bias_identity: zero-bias needs E X^2 > 0");
      break;
    case bias_transform::nonzero:
      if (!(var > 0)) throw domain_error("check_bias_identity: non-zero-bias needs Var X > 0");
      break;
    case bias_transform::genzero:
      if (!(m2 > 0))
        throw domain_error("check_bias_identity: generalized-zero-bias needs E X^2 > 0");
      break;
  }

  bias_check_result out;
  out.tail_slack = base.tail_slack() + claimed.tail_slack();
  for (const auto& tf : fns) {
    double lhs = 0, rhs = 0;
    switch (transform) {
      case bias_transform::size:
        lhs = claimed.expect(tf.f);
        rhs = base.expect([&](double x) { return x * tf.f(x); }) / mu;
        break;
      case bias_transform::zero:
        lhs = claimed.expect_derivative(tf.f, tf.fprime);
        rhs = base.expect([&](double x) { return x * tf.f(x); }) / m2;
        break;
      case bias_transform::nonzero:
        lhs = claimed.expect_derivative(tf.f, tf.fprime);
        rhs = base.expect([&](double x) { return (x - mu) * tf.f(x); }) / var;
        break;
      case bias_transform::genzero: {
        lhs = claimed.expect_derivative(tf.f, tf.fprime);
        const double f0 = tf.f(0.0);
        rhs = base.expect([&](double x) { return x * (tf.f(x) - f0); }) / m2;
        break;
      }
    }
    const double resid = std::fabs(lhs - rhs);
    if (resid > out.max_residual) {
      out.max_residual = resid;
      out.worst_fn = tf.name;
    }
  }
  return out;
}

}  // namespace steinbounds
