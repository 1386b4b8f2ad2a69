#include "steinbounds/distances.hpp"

#include <algorithm>
#include <cmath>

#include "steinbounds/errors.hpp"
#include "steinbounds/rng.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

const char* metric_name(metric_kind m) {
  switch (m) {
    case metric_kind::tv:
      return "tv";
    case metric_kind::kolmogorov:
      return "k";
    case metric_kind::wasserstein:
      return "w";
  }
  return "?";
}

DistanceResult tv_discrete(const TruncatedPmf& a, const TruncatedPmf& b) {
  const std::size_t hi = std::max(a.probs().size(), b.probs().size());
  double sum = 0;
  for (std::size_t j = 0; j < hi; ++j) sum += std::fabs(a.at(j) - b.at(j));
  return {metric_kind::tv, 0.5 * sum, 0.5 * (a.tail_mass() + b.tail_mass()),
          DistanceResult::method_kind::exact_pmf};
}

DistanceResult wasserstein_discrete(const TruncatedPmf& a, const TruncatedPmf& b) {
  const std::size_t hi = std::max(a.probs().size(), b.probs().size());
  double fa = 0, fb = 0, sum = 0;
  for (std::size_t j = 0; j < hi; ++j) {
    fa += a.at(j);
    fb += b.at(j);
    sum += std::fabs(fa - fb);
  }
  // Beyond the union window both CDFs differ by at most the tail masses; the
  // bar is honest provided the un-truncated tails carry negligible mean.
  return {metric_kind::wasserstein, sum, a.tail_mass() + b.tail_mass(),
          DistanceResult::method_kind::exact_pmf};
}

DistanceResult kolmogorov_discrete(const TruncatedPmf& a, const TruncatedPmf& b) {
  const std::size_t hi = std::max(a.probs().size(), b.probs().size());
  double fa = 0, fb = 0, best = 0;
  for (std::size_t j = 0; j < hi; ++j) {
    fa += a.at(j);
    fb += b.at(j);
    best = std::max(best, std::fabs(fa - fb));
  }
  return {metric_kind::kolmogorov, best, a.tail_mass() + b.tail_mass(),
          DistanceResult::method_kind::exact_pmf};
}

namespace {

// Right-limit CDF value and slope of a GriddedLaw on the segment starting at x.
struct seg_view {
  double value;
  double slope;
};

seg_view law_segment(const GriddedLaw& law, double x) {
  const auto& grid = law.grid();
  const auto& cdf = law.cdf_values();
  if (x < grid.front()) {
    const double next = grid.front();
    if (law.law_kind() == GriddedLaw::kind::atoms || cdf.front() == 0.0)
      return {0.0, 0.0};
    (void)next;
    return {0.0, 0.0};
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (law.law_kind() == GriddedLaw::kind::atoms) return {cdf[i - 1], 0.0};
  if (i >= grid.size()) return {cdf.back(), 0.0};
  const double slope = (cdf[i] - cdf[i - 1]) / (grid[i] - grid[i - 1]);
  return {cdf[i - 1] + slope * (x - grid[i - 1]), slope};
}

// Integral of |d| over a segment where d is linear from dl to dr.
double abs_linear_integral(double dl, double dr, double len) {
  if (dl == 0 && dr == 0) return 0.0;
  if ((dl >= 0 && dr >= 0) || (dl <= 0 && dr <= 0))
    return 0.5 * (std::fabs(dl) + std::fabs(dr)) * len;
  // Sign change: two triangles around the root.
  const double al = std::fabs(dl), ar = std::fabs(dr);
  return 0.5 * len * (al * al + ar * ar) / (al + ar);
}

std::vector<double> merged_breakpoints(const GriddedLaw& a, const GriddedLaw& b) {
  std::vector<double> pts;
  pts.reserve(a.grid().size() + b.grid().size());
  pts.insert(pts.end(), a.grid().begin(), a.grid().end());
  pts.insert(pts.end(), b.grid().begin(), b.grid().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Trapezoid curvature bound: sum of cell-width-weighted second differences.
double curvature_bar(const GriddedLaw& law) {
  if (law.law_kind() == GriddedLaw::kind::atoms) return 0.0;
  const auto& g = law.grid();
  const auto& c = law.cdf_values();
  double acc = 0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double d2 = std::fabs((c[i + 1] - c[i]) - (c[i] - c[i - 1]));
    acc += d2 * (g[i + 1] - g[i - 1]) / 2.0;
  }
  return acc / 12.0;
}

}  // namespace

DistanceResult wasserstein_grid(const GriddedLaw& a, const GriddedLaw& b) {
  std::vector<double> pts = merged_breakpoints(a, b);
  double widen = 0.0;
  constexpr std::size_t cap = 1u << 20;
  if (pts.size() > cap) {
    // Thin to the cap; the dropped resolution widens the error bar by the
    // maximum CDF motion across removed cells.
    const std::size_t stride = (pts.size() + cap - 1) / cap;
    std::vector<double> thin;
    for (std::size_t i = 0; i < pts.size(); i += stride) thin.push_back(pts[i]);
    if (thin.back() != pts.back()) thin.push_back(pts.back());
    for (std::size_t i = 1; i < thin.size(); ++i) {
      const double da = a.cdf(thin[i]) - a.cdf(thin[i - 1]);
      const double db = b.cdf(thin[i]) - b.cdf(thin[i - 1]);
      widen += (da + db) * (thin[i] - thin[i - 1]);
    }
    pts.swap(thin);
  }
  double total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const seg_view va = law_segment(a, pts[i]);
    const seg_view vb = law_segment(b, pts[i]);
    const double len = pts[i + 1] - pts[i];
    const double dl = va.value - vb.value;
    const double dr = (va.value + va.slope * len) - (vb.value + vb.slope * len);
    total += abs_linear_integral(dl, dr, len);
  }
  const double bar =
      a.tail_mass() + b.tail_mass() + curvature_bar(a) + curvature_bar(b) + widen;
  return {metric_kind::wasserstein, total, bar, DistanceResult::method_kind::exact_grid};
}

DistanceResult kolmogorov_grid(const GriddedLaw& a, const GriddedLaw& b) {
  const std::vector<double> pts = merged_breakpoints(a, b);
  double best = 0;
  for (double x : pts) {
    // Left limits matter at atoms; nudge by comparing just before the point.
    best = std::max(best, std::fabs(a.cdf(x) - b.cdf(x)));
    const double before = std::nextafter(x, -1e308);
    best = std::max(best, std::fabs(a.cdf(before) - b.cdf(before)));
  }
  double curv = 0;
  for (const GriddedLaw* law : {&a, &b}) {
    if (law->law_kind() == GriddedLaw::kind::atoms) continue;
    const auto& c = law->cdf_values();
    for (std::size_t i = 1; i + 1 < c.size(); ++i)
      curv = std::max(curv, std::fabs((c[i + 1] - c[i]) - (c[i] - c[i - 1])) / 8.0);
  }
  return {metric_kind::kolmogorov, best, a.tail_mass() + b.tail_mass() + curv,
          DistanceResult::method_kind::exact_grid};
}

double wasserstein_step_vs_gaussian(const GriddedLaw& atoms, double mean,
                                    double variance) {
  if (atoms.law_kind() != GriddedLaw::kind::atoms)
    throw domain_error("wasserstein_step_vs_gaussian: expected an atom law");
  if (!(variance > 0)) throw domain_error("wasserstein_step_vs_gaussian: variance <= 0");
  const double sigma = std::sqrt(variance);
  const auto& pos = atoms.grid();
  const auto& cum = atoms.cdf_values();
  auto z = [&](double x) { return (x - mean) / sigma; };
  auto A = [](double u) { return std_normal_cdf_antideriv(u); };

  // Left tail: |0 - Phi|, right tail: |1 - Phi| = Phi(-u).
  double total = A(z(pos.front()));
  total += A(-z(pos.back()));
  for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
    const double c = cum[i];
    const double ul = z(pos[i]), ur = z(pos[i + 1]);
    // integral over [ul,ur] of |c - Phi(u)|, split at the crossing.
    double lo = ul, hi = ur;
    if (c > 0 && c < 1) {
      const double cross = std_normal_quantile(c);
      if (cross > ul && cross < ur) {
        // Phi < c on [ul, cross], Phi > c on [cross, ur].
        total += c * (cross - ul) - (A(cross) - A(ul));
        total += (A(ur) - A(cross)) - c * (ur - cross);
        continue;
      }
      if (cross <= ul) {
        total += (A(ur) - A(ul)) - c * (ur - ul);
        continue;
      }
      total += c * (ur - ul) - (A(ur) - A(ul));
      continue;
    }
    total += std::fabs(c * (hi - lo) - (A(hi) - A(lo)));
  }
  return sigma * total;
}

namespace {

// int over [lo,hi] of |Fhat - F| for a sorted sample; F monotone callable.
double empirical_w_value(const std::vector<double>& sorted,
                         const std::function<double(double)>& F, double lo, double hi) {
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const std::size_t n = sorted.size();
  // Smooth sub-pieces get GL8 on chunks short enough for full accuracy.
  auto smooth_part = [&](double p, double q, double level) {
    double acc = 0;
    const int chunks = std::max(1, static_cast<int>(std::ceil((q - p) / 0.25)));
    for (int ch = 0; ch < chunks; ++ch) {
      const double a2 = p + (q - p) * ch / chunks;
      const double b2 = p + (q - p) * (ch + 1) / chunks;
      const double mid = 0.5 * (a2 + b2), half = 0.5 * (b2 - a2);
      double s = 0;
      for (int m = 0; m < 8; ++m) s += gw[m] * std::fabs(level - F(mid + half * gx[m]));
      acc += s * half;
    }
    return acc;
  };
  auto piece = [&](double a, double b, double level) {
    if (b <= a) return 0.0;
    // |level - F| is not smooth at the crossing; split there by bisection.
    const double fa = F(a), fb = F(b);
    double split = b;
    if ((level - fa) * (level - fb) < 0) {
      double x0 = a, x1 = b;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (x0 + x1);
        ((F(m) < level) == (fa < level) ? x0 : x1) = m;
      }
      split = 0.5 * (x0 + x1);
    }
    double acc = 0;
    if (split > a) acc += smooth_part(a, split, level);
    if (b > split) acc += smooth_part(split, b, level);
    return acc;
  };

  double total = piece(lo, sorted.front(), 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    total += piece(sorted[i], sorted[i + 1], static_cast<double>(i + 1) / n);
  total += piece(sorted.back(), hi, 1.0);
  return total;
}

}  // namespace

DistanceResult empirical_wasserstein(std::vector<double> samples,
                                     const std::function<double(double)>& target_cdf,
                                     double lo, double hi, std::uint64_t seed) {
  if (samples.size() < 1000)
    throw domain_error("empirical_wasserstein: need at least 1000 samples");
  std::sort(samples.begin(), samples.end());
  const double value = empirical_w_value(samples, target_cdf, lo, hi);

  // Bootstrap the sampling error of the empirical CDF itself: the 97.5th
  // percentile of d_W(resample, sample) over 200 resamples. Between two
  // equal-size sorted samples the distance is the mean absolute quantile gap.
  constexpr int resamples = 200;
  std::vector<double> boot(resamples);
  const std::size_t n = samples.size();
  for (int r = 0; r < resamples; ++r) {
    counter_rng rng(seed, 0x626f6f74ULL, static_cast<std::uint64_t>(r));
    std::vector<double> re(n);
    for (std::size_t i = 0; i < n; ++i)
      re[i] = samples[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n) - 1))];
    std::sort(re.begin(), re.end());
    double gap = 0;
    for (std::size_t i = 0; i < n; ++i) gap += std::fabs(re[i] - samples[i]);
    boot[r] = gap / static_cast<double>(n);
  }
  std::sort(boot.begin(), boot.end());
  const double q_hi = boot[static_cast<int>(std::ceil(0.975 * (resamples - 1)))];
  return {metric_kind::wasserstein, value, q_hi,
          DistanceResult::method_kind::empirical};
}

DistanceResult empirical_tv_counts(const std::vector<std::uint64_t>& counts,
                                   std::uint64_t n_samples, const TruncatedPmf& pmf,
                                   std::uint64_t seed) {
  if (n_samples == 0) throw domain_error("empirical_tv_counts: no samples");
  auto tv_of = [&](const std::vector<std::uint64_t>& c) {
    const std::size_t hi = std::max(c.size(), pmf.probs().size());
    double sum = 0;
    for (std::size_t j = 0; j < hi; ++j) {
      const double freq = j < c.size() ? static_cast<double>(c[j]) / n_samples : 0.0;
      sum += std::fabs(freq - pmf.at(j));
    }
    return 0.5 * (sum + pmf.tail_mass());
  };
  const double value = tv_of(counts);

  // Multinomial bootstrap of the sampling error: 97.5th percentile of
  // TV(resampled frequencies, observed frequencies).
  std::vector<double> cumfreq(counts.size());
  double run = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    run += static_cast<double>(counts[j]) / n_samples;
    cumfreq[j] = run;
  }
  constexpr int resamples = 200;
  std::vector<double> boot(resamples);
  for (int r = 0; r < resamples; ++r) {
    counter_rng rng(seed, 0x74762d62ULL, static_cast<std::uint64_t>(r));
    std::vector<std::uint64_t> re(counts.size(), 0);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(cumfreq.begin(), cumfreq.end(), u);
      const std::size_t j = it == cumfreq.end() ? counts.size() - 1
                                                : static_cast<std::size_t>(it - cumfreq.begin());
      ++re[j];
    }
    double gap = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      gap += std::fabs(static_cast<double>(re[j]) - static_cast<double>(counts[j]));
    boot[r] = 0.5 * gap / static_cast<double>(n_samples);
  }
  std::sort(boot.begin(), boot.end());
  const double q_hi = boot[static_cast<int>(std::ceil(0.975 * (resamples - 1)))];
  return {metric_kind::tv, value, q_hi, DistanceResult::method_kind::empirical};
}

}  // namespace steinbounds
