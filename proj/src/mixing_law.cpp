#include "steinbounds/mixing_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "steinbounds/dickman.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/quadrature.hpp"
#include "steinbounds/rng.hpp"
#include "steinbounds/special.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// E[g(xi)] for a grid law: exact sums over atoms, per-cell quadrature
// against the piecewise structure otherwise.
double grid_expect(const GriddedLaw& law, const std::function<double(double)>& g,
                   double tol) {
  if (law.law_kind() == GriddedLaw::kind::atoms) {
    double acc = 0, prev = 0;
    for (std::size_t i = 0; i < law.grid().size(); ++i) {
      acc += g(law.grid()[i]) * (law.cdf_values()[i] - prev);
      prev = law.cdf_values()[i];
    }
    return acc;
  }
  const auto& grid = law.grid();
  double acc = law.cdf_values().front() * g(grid.front());
  quad_options opt;
  opt.abs_tol = tol;
  opt.rel_tol = 1e-12;
  if (law.has_density()) {
    const auto& dens = law.density_values();
    auto f = [&](double x) {
      // Piecewise-linear density interpolation.
      auto it = std::upper_bound(grid.begin(), grid.end(), x);
      std::size_t i = it == grid.begin() ? 1 : static_cast<std::size_t>(it - grid.begin());
      if (i >= grid.size()) i = grid.size() - 1;
      const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
      return g(x) * (dens[i - 1] + t * (dens[i] - dens[i - 1]));
    };
    opt.breaks.assign(grid.begin() + 1, grid.end() - 1);
    if (opt.breaks.size() > 512) opt.breaks.resize(512);
    opt.max_panels = 8000;
    return acc + integrate(f, grid.front(), grid.back(), opt).value;
  }
  // CDF-only: uniform mass inside each cell.
  double total = acc;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mass = law.cdf_values()[i] - law.cdf_values()[i - 1];
    if (mass <= 0) continue;
    const double a = grid[i - 1], b = grid[i];
    total += mass / (b - a) * integrate(g, a, b, opt).value;
  }
  return total;
}

}  // namespace

MixingLaw MixingLaw::point_mass(double location) {
  if (!(location > 0)) throw domain_error("point_mass mixing: location must be positive");
  return MixingLaw(point_mass_mixing{location}, location, 0.0);
}

MixingLaw MixingLaw::poisson(double mean) {
  if (!(mean > 0)) throw domain_error("poisson mixing: mean must be positive");
  return MixingLaw(poisson_mixing{mean}, mean, mean);
}

MixingLaw MixingLaw::binomial(long trials, double success_prob) {
  if (trials < 1) throw domain_error("binomial mixing: trials must be >= 1");
  if (!(success_prob > 0.0 && success_prob <= 1.0))
    throw domain_error("binomial mixing: success probability outside (0,1]");
  const double m = trials * success_prob;
  return MixingLaw(binomial_mixing{trials, success_prob}, m, m * (1 - success_prob));
}

MixingLaw MixingLaw::gamma(double shape, double rate) {
  if (!(shape > 0) || !(rate > 0)) throw domain_error("gamma mixing: bad parameters");
  return MixingLaw(gamma_mixing{shape, rate}, shape / rate, shape / (rate * rate));
}

MixingLaw MixingLaw::dickman(double scale) {
  if (!(scale > 0)) throw domain_error("dickman mixing: scale must be positive");
  // Standard law has mean 1 and variance 1/2.
  return MixingLaw(dickman_mixing{scale}, scale, 0.5 * scale * scale);
}

MixingLaw MixingLaw::grid(GriddedLaw law, bool assumed_infinitely_divisible) {
  const double m = law.mean();
  const double v = law.variance();
  if (!(m > 0)) throw domain_error("grid mixing: mean must be positive");
  if (law.support_lo() < -norm_slack)
    throw domain_error("grid mixing: support must be non-negative");
  return MixingLaw(grid_mixing{std::move(law), assumed_infinitely_divisible}, m, v);
}

double MixingLaw::exp_tilted_moment(int j, double tol) const {
  if (j < 0) throw domain_error("exp_tilted_moment: negative order");
  auto tilt = [j](double x) {
    if (x == 0.0) return j == 0 ? 1.0 : 0.0;
    return std::exp(-x + j * std::log(x));
  };
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_)) return tilt(pm->location);
  if (const auto* po = std::get_if<poisson_mixing>(&kind_)) {
    // sum_k pois(mu,k) k^j e^{-k}
    double acc = 0;
    double term = std::exp(-po->mean);
    for (long k = 0; k < 100000; ++k) {
      if (k > 0) term *= po->mean / k;
      const double contrib = term * tilt(static_cast<double>(k));
      acc += contrib;
      if (k > po->mean && term < tol * 1e-3) break;
    }
    return acc;
  }
  if (const auto* bi = std::get_if<binomial_mixing>(&kind_)) {
    double acc = 0;
    for (long k = 0; k <= bi->trials; ++k) {
      const double logc = log_factorial(bi->trials) - log_factorial(k) -
                          log_factorial(bi->trials - k);
      double logp = logc;
      logp += k * std::log(bi->success_prob);
      if (bi->trials > k) logp += (bi->trials - k) * std::log1p(-bi->success_prob);
      acc += std::exp(logp) * tilt(static_cast<double>(k));
    }
    return acc;
  }
  if (const auto* ga = std::get_if<gamma_mixing>(&kind_)) {
    // r^a Gamma(a+j) / (Gamma(a) (1+r)^{a+j})
    return std::exp(ga->shape * std::log(ga->rate) -
                    (ga->shape + j) * std::log1p(ga->rate) +
                    std::lgamma(ga->shape + j) - std::lgamma(ga->shape));
  }
  if (const auto* di = std::get_if<dickman_mixing>(&kind_)) {
    const auto& table = dickman_table::instance();
    const double c = di->scale;
    // Integrand decays both through e^{-x} x^j and through the density tail.
    const double hi = std::min(c * table.table_upper(), j + 12.0 * std::sqrt(j + 1.0) + 40.0);
    quad_options opt;
    opt.abs_tol = std::min(tol, 1e-15);
    opt.rel_tol = 1e-13;
    opt.max_panels = 6000;
    for (double b = c; b < hi; b += c) opt.breaks.push_back(b);
    return integrate([&](double x) { return tilt(x) * table.density(x, c); }, 0.0, hi, opt)
        .value;
  }
  const auto& gl = std::get<grid_mixing>(kind_).law;
  return grid_expect(gl, tilt, std::min(tol, 1e-14));
}

double MixingLaw::cdf(double x) const {
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_))
    return x >= pm->location ? 1.0 : 0.0;
  if (const auto* po = std::get_if<poisson_mixing>(&kind_)) {
    if (x < 0) return 0.0;
    double acc = 0, term = std::exp(-po->mean);
    for (long k = 0; k <= static_cast<long>(x); ++k) {
      if (k > 0) term *= po->mean / k;
      acc += term;
    }
    return std::min(acc, 1.0);
  }
  if (const auto* bi = std::get_if<binomial_mixing>(&kind_)) {
    if (x < 0) return 0.0;
    double acc = 0;
    for (long k = 0; k <= std::min(bi->trials, static_cast<long>(x)); ++k) {
      const double logc = log_factorial(bi->trials) - log_factorial(k) -
                          log_factorial(bi->trials - k);
      double logp = logc + k * std::log(bi->success_prob);
      if (bi->trials > k) logp += (bi->trials - k) * std::log1p(-bi->success_prob);
      acc += std::exp(logp);
    }
    return std::min(acc, 1.0);
  }
  if (const auto* ga = std::get_if<gamma_mixing>(&kind_))
    return gamma_cdf(x, ga->shape, ga->rate);
  if (const auto* di = std::get_if<dickman_mixing>(&kind_))
    return dickman_table::instance().cdf(x, di->scale);
  return std::get<grid_mixing>(kind_).law.cdf(x);
}

double MixingLaw::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw domain_error("mixing quantile: u outside [0,1]");
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_)) return pm->location;
  if (std::holds_alternative<poisson_mixing>(kind_) ||
      std::holds_alternative<binomial_mixing>(kind_)) {
    long k = 0;
    while (cdf(static_cast<double>(k)) < u && k < 1000000) ++k;
    return static_cast<double>(k);
  }
  if (const auto* ga = std::get_if<gamma_mixing>(&kind_)) {
    if (u <= 0) return 0.0;
    if (u >= 1) return support_hi(1e-15);
    double lo = 0.0, hi = (ga->shape + 1.0) / ga->rate;
    while (gamma_cdf(hi, ga->shape, ga->rate) < u) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gamma_cdf(mid, ga->shape, ga->rate) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  if (const auto* di = std::get_if<dickman_mixing>(&kind_))
    return dickman_table::instance().quantile(u, di->scale);
  return std::get<grid_mixing>(kind_).law.quantile(u);
}

double MixingLaw::support_hi(double tail_tol) const {
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_)) return pm->location;
  if (std::holds_alternative<poisson_mixing>(kind_)) return quantile(1.0 - tail_tol) + 1;
  if (const auto* bi = std::get_if<binomial_mixing>(&kind_))
    return static_cast<double>(bi->trials);
  if (std::holds_alternative<gamma_mixing>(kind_)) return quantile(1.0 - tail_tol);
  if (const auto* di = std::get_if<dickman_mixing>(&kind_))
    return di->scale * dickman_table::instance().table_upper();
  return std::get<grid_mixing>(kind_).law.support_hi();
}

double MixingLaw::sample(counter_rng& rng) const {
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_)) return pm->location;
  if (const auto* po = std::get_if<poisson_mixing>(&kind_))
    return static_cast<double>(rng.poisson(po->mean));
  // Inversion keeps every kind at one uniform per draw.
  return quantile(rng.uniform01());
}

std::string MixingLaw::describe() const {
  if (const auto* pm = std::get_if<point_mass_mixing>(&kind_))
    return "point_mass(" + fmt(pm->location) + ")";
  if (const auto* po = std::get_if<poisson_mixing>(&kind_))
    return "poisson(" + fmt(po->mean) + ")";
  if (const auto* bi = std::get_if<binomial_mixing>(&kind_))
    return "binomial(" + std::to_string(bi->trials) + "," + fmt(bi->success_prob) + ")";
  if (const auto* ga = std::get_if<gamma_mixing>(&kind_))
    return "gamma(" + fmt(ga->shape) + "," + fmt(ga->rate) + ")";
  if (const auto* di = std::get_if<dickman_mixing>(&kind_))
    return "dickman(" + fmt(di->scale) + ")";
  const auto& g = std::get<grid_mixing>(kind_);
  return "grid(points=" + std::to_string(g.law.grid().size()) +
         ",mean=" + fmt(mean_) + ",var=" + fmt(variance_) + ")";
}

IncrementLaw IncrementLaw::point(double location) {
  if (location < 0) throw domain_error("increment point: negative location");
  return IncrementLaw(increment_point{location}, location);
}

IncrementLaw IncrementLaw::bernoulli(double mean) {
  if (!(mean >= 0.0 && mean <= 1.0))
    throw domain_error("increment bernoulli: mean outside [0,1]");
  return IncrementLaw(increment_bernoulli{mean}, mean);
}

IncrementLaw IncrementLaw::exponential(double rate) {
  if (!(rate > 0)) throw domain_error("increment exponential: rate must be positive");
  return IncrementLaw(increment_exponential{rate}, 1.0 / rate);
}

IncrementLaw IncrementLaw::uniform(double width) {
  if (!(width > 0)) throw domain_error("increment uniform: width must be positive");
  return IncrementLaw(increment_uniform{width}, 0.5 * width);
}

IncrementLaw IncrementLaw::grid(GriddedLaw law) {
  const double m = law.mean();
  if (law.support_lo() < -norm_slack)
    throw domain_error("increment grid: support must be non-negative");
  return IncrementLaw(increment_grid{std::move(law)}, m);
}

double IncrementLaw::exp_tilted_moment(int j) const {
  if (j < 0) throw domain_error("exp_tilted_moment: negative order");
  if (const auto* p = std::get_if<increment_point>(&kind_)) {
    if (p->location == 0.0) return j == 0 ? 1.0 : 0.0;
    return std::exp(-p->location + j * std::log(p->location));
  }
  if (const auto* b = std::get_if<increment_bernoulli>(&kind_)) {
    const double at_one = b->mean * std::exp(-1.0);
    return j == 0 ? (1.0 - b->mean) + at_one : at_one;
  }
  if (const auto* e = std::get_if<increment_exponential>(&kind_)) {
    // r j! / (1+r)^{j+1}
    return std::exp(std::log(e->rate) + log_factorial(j) -
                    (j + 1) * std::log1p(e->rate));
  }
  if (const auto* u = std::get_if<increment_uniform>(&kind_)) {
    // (1/w) int_0^w e^{-v} v^j dv = j! P(j+1, w) / w
    return std::exp(log_factorial(j)) * reg_lower_gamma(j + 1.0, u->width) / u->width;
  }
  throw unsupported_error("exp_tilted_moment: grid increments have no evaluator");
}

double IncrementLaw::cdf(double x) const {
  if (const auto* p = std::get_if<increment_point>(&kind_))
    return x >= p->location ? 1.0 : 0.0;
  if (const auto* b = std::get_if<increment_bernoulli>(&kind_)) {
    if (x < 0) return 0.0;
    return x >= 1.0 ? 1.0 : 1.0 - b->mean;
  }
  if (const auto* e = std::get_if<increment_exponential>(&kind_))
    return x <= 0 ? 0.0 : -std::expm1(-e->rate * x);
  if (const auto* u = std::get_if<increment_uniform>(&kind_)) {
    if (x <= 0) return 0.0;
    return x >= u->width ? 1.0 : x / u->width;
  }
  return std::get<increment_grid>(kind_).law.cdf(x);
}

double IncrementLaw::support_hi(double tail_tol) const {
  if (const auto* p = std::get_if<increment_point>(&kind_)) return p->location;
  if (std::holds_alternative<increment_bernoulli>(kind_)) return 1.0;
  if (const auto* e = std::get_if<increment_exponential>(&kind_))
    return -std::log(tail_tol) / e->rate;
  if (const auto* u = std::get_if<increment_uniform>(&kind_)) return u->width;
  return std::get<increment_grid>(kind_).law.support_hi();
}

GriddedLaw IncrementLaw::to_gridded(std::size_t points, double tail_tol) const {
  if (const auto* p = std::get_if<increment_point>(&kind_))
    return GriddedLaw::from_atoms({p->location}, {1.0});
  if (const auto* b = std::get_if<increment_bernoulli>(&kind_)) {
    if (b->mean <= 0.0) return GriddedLaw::from_atoms({0.0}, {1.0});
    if (b->mean >= 1.0) return GriddedLaw::from_atoms({1.0}, {1.0});
    return GriddedLaw::from_atoms({0.0, 1.0}, {1.0 - b->mean, b->mean});
  }
  if (const auto* u = std::get_if<increment_uniform>(&kind_)) {
    // Piecewise-linear CDF is exact for the uniform law.
    return GriddedLaw::from_cdf({0.0, u->width}, {0.0, 1.0});
  }
  if (const auto* e = std::get_if<increment_exponential>(&kind_)) {
    const double hi = -std::log(tail_tol) / e->rate;
    std::vector<double> grid(points), cdfv(points);
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = hi * static_cast<double>(i) / static_cast<double>(points - 1);
      cdfv[i] = -std::expm1(-e->rate * grid[i]);
    }
    return GriddedLaw::from_cdf(std::move(grid), std::move(cdfv));
  }
  return std::get<increment_grid>(kind_).law;
}

bool IncrementLaw::same_law(const IncrementLaw& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* p = std::get_if<increment_point>(&kind_))
    return p->location == std::get<increment_point>(other.kind_).location;
  if (const auto* b = std::get_if<increment_bernoulli>(&kind_))
    return b->mean == std::get<increment_bernoulli>(other.kind_).mean;
  if (const auto* e = std::get_if<increment_exponential>(&kind_))
    return e->rate == std::get<increment_exponential>(other.kind_).rate;
  if (const auto* u = std::get_if<increment_uniform>(&kind_))
    return u->width == std::get<increment_uniform>(other.kind_).width;
  return false;
}

std::string IncrementLaw::describe() const {
  if (const auto* p = std::get_if<increment_point>(&kind_))
    return "point(" + fmt(p->location) + ")";
  if (const auto* b = std::get_if<increment_bernoulli>(&kind_))
    return "bernoulli(" + fmt(b->mean) + ")";
  if (const auto* e = std::get_if<increment_exponential>(&kind_))
    return "exponential(" + fmt(e->rate) + ")";
  if (const auto* u = std::get_if<increment_uniform>(&kind_))
    return "uniform(0," + fmt(u->width) + ")";
  return "grid";
}

}  // namespace steinbounds
