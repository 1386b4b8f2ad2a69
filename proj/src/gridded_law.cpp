#include "steinbounds/gridded_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "steinbounds/errors.hpp"
#include "steinbounds/truncated_pmf.hpp"

namespace steinbounds {

GriddedLaw::GriddedLaw(kind k, std::vector<double> grid, std::vector<double> cdf,
                       std::vector<double> density)
    : kind_(k), grid_(std::move(grid)), cdf_(std::move(cdf)), density_(std::move(density)) {
  if (grid_.size() < 1 || grid_.size() != cdf_.size())
    throw domain_error("GriddedLaw: grid/cdf size mismatch");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw domain_error("GriddedLaw: grid not strictly increasing");
  double prev = -norm_slack;
  for (double c : cdf_) {
    if (c < prev - norm_slack || c > 1.0 + norm_slack)
      throw domain_error("GriddedLaw: cdf values not non-decreasing in [0,1]");
    prev = c;
  }
  if (!density_.empty() && density_.size() != grid_.size())
    throw domain_error("GriddedLaw: density not aligned with grid");
  tail_mass_ = std::max(0.0, 1.0 - cdf_.back());
}

GriddedLaw GriddedLaw::from_atoms(std::vector<double> positions,
                                  std::vector<double> masses) {
  if (positions.size() != masses.size() || positions.empty())
    throw domain_error("from_atoms: bad inputs");
  std::vector<std::size_t> idx(positions.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  std::vector<double> pos, cum;
  double running = 0;
  for (std::size_t i : idx) {
    if (masses[i] < -norm_slack) throw domain_error("from_atoms: negative mass");
    const double m = std::max(0.0, masses[i]);
    if (!pos.empty() && positions[i] == pos.back()) {
      running += m;
      cum.back() = running;
    } else {
      running += m;
      pos.push_back(positions[i]);
      cum.push_back(running);
    }
  }
  if (std::fabs(running - 1.0) > 1e-9)
    throw domain_error("from_atoms: masses sum to " + std::to_string(running));
  return GriddedLaw(kind::atoms, std::move(pos), std::move(cum), {});
}

GriddedLaw GriddedLaw::from_density(std::vector<double> grid,
                                    std::vector<double> density) {
  if (grid.size() != density.size() || grid.size() < 2)
    throw domain_error("from_density: need at least two grid points");
  std::vector<double> cdf(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (density[i] < 0 || density[i - 1] < 0)
      throw domain_error("from_density: negative density");
    cdf[i] = cdf[i - 1] +
             0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  // Trapezoid mass should be close to 1; rescale the defect but refuse junk.
  const double total = cdf.back();
  if (std::fabs(total - 1.0) > 1e-3)
    throw domain_error("from_density: density integrates to " + std::to_string(total));
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    cdf[i] /= total;
    density[i] /= total;
  }
  return GriddedLaw(kind::continuous, std::move(grid), std::move(cdf), std::move(density));
}

GriddedLaw GriddedLaw::from_cdf(std::vector<double> grid, std::vector<double> cdf) {
  return GriddedLaw(kind::continuous, std::move(grid), std::move(cdf), {});
}

GriddedLaw GriddedLaw::load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("load_density_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw domain_error("load_density_csv: empty file");
  // Header row is required; accept any two labels.
  std::vector<double> xs, ds;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string xf, df;
    if (!std::getline(ss, xf, ',') || !std::getline(ss, df))
      throw domain_error("load_density_csv: malformed line " + std::to_string(lineno));
    xs.push_back(std::stod(xf));
    ds.push_back(std::stod(df));
  }
  return from_density(std::move(xs), std::move(ds));
}

double GriddedLaw::cdf(double x) const {
  if (x < grid_.front()) return 0.0;
  if (kind_ == kind::atoms) {
    // Right-continuous step: last atom position <= x.
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    return cdf_[static_cast<std::size_t>(it - grid_.begin()) - 1];
  }
  if (x >= grid_.back()) return cdf_.back();
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double t = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
}

double GriddedLaw::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw domain_error("quantile: u outside [0,1]");
  if (kind_ == kind::atoms) {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return grid_.back();
    return grid_[static_cast<std::size_t>(it - cdf_.begin())];
  }
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return grid_.front();
  if (it == cdf_.end()) return grid_.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  const double span = cdf_[i] - cdf_[i - 1];
  if (span <= 0) return grid_[i];
  const double t = (u - cdf_[i - 1]) / span;
  return grid_[i - 1] + t * (grid_[i] - grid_[i - 1]);
}

double GriddedLaw::moment(int k) const {
  double m = 0;
  if (kind_ == kind::atoms) {
    double prev = 0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      m += std::pow(grid_[i], k) * (cdf_[i] - prev);
      prev = cdf_[i];
    }
    return m;
  }
  if (!density_.empty()) {
    // Trapezoid moment against the stored density.
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      const double fa = std::pow(grid_[i - 1], k) * density_[i - 1];
      const double fb = std::pow(grid_[i], k) * density_[i];
      m += 0.5 * (fa + fb) * (grid_[i] - grid_[i - 1]);
    }
    return m;
  }
  // CDF-only continuous law: piecewise-linear CDF means uniform mass on cells.
  double prev = cdf_.front();
  m += std::pow(grid_.front(), k) * prev;  // mass at/below the first point
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double mass = cdf_[i] - prev;
    prev = cdf_[i];
    if (mass <= 0) continue;
    // Exact moment of Uniform(grid[i-1], grid[i]).
    const double a = grid_[i - 1], b = grid_[i];
    m += mass * (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (b - a));
  }
  return m;
}

double GriddedLaw::mean() const { return moment(1); }

double GriddedLaw::variance() const {
  const double mu = mean();
  return moment(2) - mu * mu;
}

}  // namespace steinbounds
