#include "steinbounds/dickman.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "steinbounds/errors.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

namespace {

constexpr int N = dickman_table::nodes_per_panel;
constexpr int P = dickman_table::num_panels;
const double h = 1.0 / N;

// Integration weights over [alpha, alpha+1] (grid units) of the quintic
// interpolant through nodes 0..5; alpha = 0..4. Derived once from the moment
// equations sum_m w[alpha][m] m^q = ((alpha+1)^{q+1} - alpha^{q+1})/(q+1).
std::array<std::array<long double, 6>, 5> make_cell_weights() {
  std::array<std::array<long double, 6>, 5> w{};
  for (int alpha = 0; alpha < 5; ++alpha) {
    long double m[6][7];
    for (int q = 0; q < 6; ++q) {
      for (int j = 0; j < 6; ++j) m[q][j] = std::pow((long double)j, (long double)q);
      m[q][6] = (std::pow((long double)(alpha + 1), (long double)(q + 1)) -
                 std::pow((long double)alpha, (long double)(q + 1))) /
                (q + 1);
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 6; ++col) {
      int piv = col;
      for (int r = col + 1; r < 6; ++r)
        if (std::fabs((double)m[r][col]) > std::fabs((double)m[piv][col])) piv = r;
      std::swap(m[piv], m[col]);
      for (int r = col + 1; r < 6; ++r) {
        const long double f = m[r][col] / m[col][col];
        for (int cc = col; cc <= 6; ++cc) m[r][cc] -= f * m[col][cc];
      }
    }
    for (int r = 5; r >= 0; --r) {
      long double s = m[r][6];
      for (int cc = r + 1; cc < 6; ++cc) s -= m[r][cc] * w[alpha][cc];
      w[alpha][r] = s / m[r][r];
    }
  }
  return w;
}

const std::array<std::array<long double, 6>, 5>& cell_weights() {
  static const auto w = make_cell_weights();
  return w;
}

}  // namespace

dickman_table::dickman_table() {
  rho_.assign(static_cast<std::size_t>(P) * N + 1, 0.0);
  cell_int_.assign(static_cast<std::size_t>(P) * N, 0.0);

  // Panel 0: rho = 1. Panel 1: rho(x) = 1 - log x, with exact cell integrals
  // from the antiderivative 2t - t log t.
  for (int i = 0; i <= N; ++i) rho_[i] = 1.0;
  for (int i = 0; i < N; ++i) cell_int_[i] = h;
  for (int i = 1; i <= N; ++i) rho_[N + i] = 1.0 - std::log1p(i * h);
  auto anti1 = [](double t) { return 2.0 * t - t * std::log(t); };
  for (int i = 0; i < N; ++i)
    cell_int_[N + i] = anti1(1.0 + (i + 1) * h) - anti1(1.0 + i * h);

  const auto& w = cell_weights();

  std::vector<double> suffix(N + 1);
  for (int k = 2; k < P; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * N;  // node index of x = k
    // Suffix integrals of the previous panel: A_i = int_{k-1+ih}^{k} rho.
    suffix[N] = 0.0;
    for (int i = N - 1; i >= 0; --i)
      suffix[i] = suffix[i + 1] + cell_int_[base - N + i];

    // Sweep 0 uses backward stencils (which may cross the panel joint) to get
    // a seed; later sweeps use in-panel stencils and converge to their fixed
    // point, since future-node coupling is O(h) small.
    for (int sweep = 0; sweep < 5; ++sweep) {
      double b_running = 0.0;  // int_k^{t_{i-1}} rho with current values
      for (int i = 1; i <= N; ++i) {
        const int j = i - 1;  // cell being closed by node i
        int s;                // stencil start (node offset within panel)
        if (sweep == 0) {
          s = j - 4;  // backward; may dip into the previous panel
        } else {
          s = std::clamp(j - 2, 0, N - 5);
        }
        const int alpha = j - s;
        const auto& cw = w[alpha];
        double known = 0.0;
        double self_w = 0.0;
        for (int m = 0; m < 6; ++m) {
          const int node = s + m;  // panel-relative; may be negative in sweep 0
          if (node == i) {
            self_w = static_cast<double>(cw[m]);
          } else {
            known += static_cast<double>(cw[m]) * rho_[base + node];
          }
        }
        const double x = k + i * h;
        // x rho_i = A_i + B_{i-1} + h (known + self_w rho_i)
        const double rhs = suffix[i] + b_running + h * known;
        const double val = rhs / (x - h * self_w);
        rho_[base + i] = val;
        b_running += h * (known + self_w * val);
        cell_int_[base + j] = h * (known + self_w * val);
      }
    }
  }

  // Cumulative integrals at nodes for CDF evaluation.
  cum_.assign(rho_.size(), 0.0);
  for (std::size_t g = 0; g < cell_int_.size(); ++g) cum_[g + 1] = cum_[g] + cell_int_[g];
  total_rho_integral_ = cum_.back();
  raw_total_mass_ = std::exp(-euler_gamma) * total_rho_integral_;
}

const dickman_table& dickman_table::instance() {
  static const dickman_table table;
  return table;
}

double dickman_table::table_upper() const { return static_cast<double>(P); }

double dickman_table::interp_rho(double x) const {
  // 5-point Lagrange interpolation of log(rho) within the panel; rho spans
  // many decades, log keeps the interpolation relative-accurate.
  const int panel = std::min(static_cast<int>(x), P - 1);
  const double local = (x - panel) / h;
  int i0 = static_cast<int>(local) - 2;
  i0 = std::clamp(i0, 0, N - 4);
  const std::size_t base = static_cast<std::size_t>(panel) * N;
  double t = local - i0;
  double logs[5];
  for (int m = 0; m < 5; ++m) logs[m] = std::log(rho_[base + i0 + m]);
  double acc = 0;
  for (int m = 0; m < 5; ++m) {
    double lm = 1;
    for (int q = 0; q < 5; ++q) {
      if (q == m) continue;
      lm *= (t - q) / (m - q);
    }
    acc += lm * logs[m];
  }
  return std::exp(acc);
}

double dickman_table::rho(double x) const {
  if (x < 0) throw domain_error("dickman_rho: negative argument");
  if (x <= 1.0) return 1.0;
  if (x <= 2.0) return 1.0 - std::log(x);
  if (x >= P) return 0.0;
  return interp_rho(x);
}

double dickman_rho(double x) { return dickman_table::instance().rho(x); }

double dickman_table::density(double x, double c) const {
  if (c <= 0) throw domain_error("dickman density: scale must be positive");
  if (x < 0) return 0.0;
  const double u = x / c;
  if (u >= P) return 0.0;
  return std::exp(-euler_gamma) * rho(u) / (c * raw_total_mass_);
}

double dickman_table::partial_cell_integral(std::size_t cell, double frac) const {
  // Integral of rho over [t_cell, t_cell + frac*h] by 4-point Gauss-Legendre
  // on the interpolated values.
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};
  const double a = cell * h;
  const double b = a + frac * h;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0;
  for (int m = 0; m < 4; ++m) {
    const double x = mid + half * gx[m];
    double v;
    if (x <= 1.0)
      v = 1.0;
    else if (x <= 2.0)
      v = 1.0 - std::log(x);
    else
      v = interp_rho(x);
    acc += gw[m] * v;
  }
  return acc * half;
}

double dickman_table::cdf(double x, double c) const {
  if (c <= 0) throw domain_error("dickman cdf: scale must be positive");
  if (x <= 0) return 0.0;
  const double u = x / c;
  if (u >= P) return 1.0;
  const double pos = u / h;
  const std::size_t cell = std::min(static_cast<std::size_t>(pos), cell_int_.size() - 1);
  const double frac = pos - cell;
  double integral = cum_[cell];
  if (frac > 0) integral += partial_cell_integral(cell, frac);
  return integral / total_rho_integral_;
}

double dickman_table::quantile(double u, double c) const {
  if (!(u >= 0.0 && u <= 1.0)) throw domain_error("dickman quantile: u outside [0,1]");
  if (u <= 0) return 0.0;
  if (u >= 1) return c * P;
  const double target = u * total_rho_integral_;
  auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  std::size_t g = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
  // Bisection within the cell.
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double val = cum_[g] + partial_cell_integral(g, mid);
    (val < target ? lo : hi) = mid;
  }
  return c * (g + 0.5 * (lo + hi)) * h;
}

}  // namespace steinbounds
