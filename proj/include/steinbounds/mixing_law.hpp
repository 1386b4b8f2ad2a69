#pragma once

#include <string>
#include <variant>

#include "steinbounds/gridded_law.hpp"

namespace steinbounds {

class counter_rng;

struct point_mass_mixing {
  double location;
};
struct poisson_mixing {
  double mean;
};
struct binomial_mixing {
  long trials;
  double success_prob;
};
struct gamma_mixing {
  double shape;
  double rate;
};
struct dickman_mixing {
  double scale;
};
struct grid_mixing {
  GriddedLaw law;
  bool assumed_infinitely_divisible;
};

// Catalog entry for a non-negative mixing distribution. Catalog kinds carry
// closed-form moments and exponentially tilted moments E[e^{-xi} xi^j];
// grid kinds evaluate everything numerically and are flagged rather than
// verified for infinite divisibility.
class MixingLaw {
 public:
  using kind_variant = std::variant<point_mass_mixing, poisson_mixing, binomial_mixing,
                                    gamma_mixing, dickman_mixing, grid_mixing>;

  static MixingLaw point_mass(double location);
  static MixingLaw poisson(double mean);
  static MixingLaw binomial(long trials, double success_prob);
  static MixingLaw gamma(double shape, double rate);
  static MixingLaw dickman(double scale);
  static MixingLaw grid(GriddedLaw law, bool assumed_infinitely_divisible = false);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  bool is_catalog() const { return !std::holds_alternative<grid_mixing>(kind_); }
  const kind_variant& kind() const { return kind_; }

  // E[e^{-xi} xi^j]; closed form where available, adaptive quadrature for
  // Dickman and grid kinds.
  double exp_tilted_moment(int j, double tol = 1e-13) const;
  double cdf(double x) const;
  double quantile(double u) const;
  // Point beyond which at most tail_tol mass remains.
  double support_hi(double tail_tol = 1e-12) const;
  double sample(counter_rng& rng) const;
  // Canonical text form, used in input digests.
  std::string describe() const;

 private:
  MixingLaw(kind_variant kind, double mean, double variance)
      : kind_(std::move(kind)), mean_(mean), variance_(variance) {}

  kind_variant kind_;
  double mean_;
  double variance_;
};

struct increment_point {
  double location;
};
struct increment_bernoulli {
  double mean;  // mass at 1
};
struct increment_exponential {
  double rate;
};
struct increment_uniform {
  double width;  // Uniform(0, width)
};
struct increment_grid {
  GriddedLaw law;
};

// The independent increment eta with xi^s = xi + eta (Steutel decomposition).
class IncrementLaw {
 public:
  using kind_variant = std::variant<increment_point, increment_bernoulli,
                                    increment_exponential, increment_uniform,
                                    increment_grid>;

  static IncrementLaw point(double location);
  static IncrementLaw bernoulli(double mean);
  static IncrementLaw exponential(double rate);
  static IncrementLaw uniform(double width);
  static IncrementLaw grid(GriddedLaw law);

  double mean() const { return mean_; }
  const kind_variant& kind() const { return kind_; }

  // E[e^{-eta} eta^j]; throws unsupported_error for grid increments.
  double exp_tilted_moment(int j) const;
  double mean_exp_neg() const { return exp_tilted_moment(0); }
  double mean_x_exp_neg() const { return exp_tilted_moment(1); }

  double cdf(double x) const;
  double support_hi(double tail_tol = 1e-12) const;
  // Gridded CDF representation for distance computations; exact for atom and
  // uniform kinds, sampled for exponential.
  GriddedLaw to_gridded(std::size_t points = 4096, double tail_tol = 1e-12) const;
  bool same_law(const IncrementLaw& other) const;
  std::string describe() const;

 private:
  IncrementLaw(kind_variant kind, double mean) : kind_(std::move(kind)), mean_(mean) {}

  kind_variant kind_;
  double mean_;
};

}  // namespace steinbounds
