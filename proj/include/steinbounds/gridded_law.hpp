#pragma once

#include <string>
#include <vector>

namespace steinbounds {

// A real law carried on a finite grid. Two flavours:
//   continuous - CDF piecewise linear between grid points (density optional,
//                aligned with the grid);
//   atoms      - point masses at the grid positions, CDF a right-continuous
//                step function.
class GriddedLaw {
 public:
  enum class kind { continuous, atoms };

  static GriddedLaw from_atoms(std::vector<double> positions,
                               std::vector<double> masses);
  static GriddedLaw from_density(std::vector<double> grid,
                                 std::vector<double> density);
  static GriddedLaw from_cdf(std::vector<double> grid, std::vector<double> cdf);
  // CSV with header, two columns x,density, strictly increasing x.
  static GriddedLaw load_density_csv(const std::string& path);

  kind law_kind() const { return kind_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& cdf_values() const { return cdf_; }
  bool has_density() const { return !density_.empty(); }
  const std::vector<double>& density_values() const { return density_; }

  double cdf(double x) const;
  double quantile(double u) const;
  double mean() const;
  double moment(int k) const;
  double variance() const;
  // Mass not accounted for by the grid (1 - last CDF value).
  double tail_mass() const { return tail_mass_; }

  double support_lo() const { return grid_.front(); }
  double support_hi() const { return grid_.back(); }

 private:
  GriddedLaw(kind k, std::vector<double> grid, std::vector<double> cdf,
             std::vector<double> density);

  kind kind_;
  std::vector<double> grid_;
  std::vector<double> cdf_;
  std::vector<double> density_;
  double tail_mass_ = 0.0;
};

}  // namespace steinbounds
