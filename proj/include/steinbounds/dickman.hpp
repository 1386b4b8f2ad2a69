#pragma once

#include <cstddef>
#include <vector>

namespace steinbounds {

// Dickman's function: rho = 1 on [0,1], x rho'(x) = -rho(x-1).
// Solved once on a fixed grid (step 1/1024) and interpolated; relative
// accuracy ~1e-12 out to x = 20 and beyond.
double dickman_rho(double x);

// Tabulated solution of rho plus the machinery for the Dickman density
// e^{-gamma} rho(x), its CDF and quantile. The standard law has mean 1;
// the scaled law (scale c) is c times a standard Dickman variable.
class dickman_table {
 public:
  static const dickman_table& instance();

  double rho(double x) const;
  // Density of the scale-c law at x (>= 0), normalized to integrate to 1
  // over the tabulated range.
  double density(double x, double c) const;
  double cdf(double x, double c) const;
  double quantile(double u, double c) const;

  // e^{-gamma} * integral of tabulated rho; should equal 1 up to solver error.
  double raw_total_mass() const { return raw_total_mass_; }
  double table_upper() const;  // upper end of the standard-law table

  static constexpr int nodes_per_panel = 1024;
  static constexpr int num_panels = 48;

 private:
  dickman_table();

  double interp_rho(double x) const;
  double partial_cell_integral(std::size_t cell, double frac) const;

  std::vector<double> rho_;       // node values, size num_panels*N + 1
  std::vector<double> cell_int_;  // integral of rho over each grid cell
  std::vector<double> cum_;       // cumulative cell integrals at nodes
  double total_rho_integral_;
  double raw_total_mass_;
};

}  // namespace steinbounds
