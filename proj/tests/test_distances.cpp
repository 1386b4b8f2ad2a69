#include <doctest.h>

#include <cmath>

#include "steinbounds/distances.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/rng.hpp"
#include "steinbounds/special.hpp"
#include "oracles.hpp"

using namespace steinbounds;

TEST_CASE("tv_discrete examples") {
  const TruncatedPmf a = TruncatedPmf::poisson(1.0, 1e-12);
  const TruncatedPmf b = TruncatedPmf::poisson(1.1, 1e-12);
  CHECK(tv_discrete(a, a).value == 0.0);
  // Direct-summation oracle value at K = 60.
  CHECK(tv_discrete(a, b).value ==
        doctest::Approx(0.036729606576917562).epsilon(1e-9));
  const TruncatedPmf p0({1.0, 0.0}, 0.0);
  const TruncatedPmf p1({0.0, 1.0}, 0.0);
  CHECK(tv_discrete(p0, p1).value == doctest::Approx(1.0));
}

TEST_CASE("wasserstein_discrete examples") {
  const TruncatedPmf a = TruncatedPmf::poisson(1.0, 1e-12);
  const TruncatedPmf b = TruncatedPmf::poisson(1.2, 1e-12);
  // Stochastically ordered, so d_W equals the mean gap exactly.
  CHECK(wasserstein_discrete(a, b).value == doctest::Approx(0.2).epsilon(2e-9));
  CHECK(wasserstein_discrete(a, a).value == 0.0);
  // Shift by one: CDF area between a pmf and its shift is 1.
  std::vector<double> probs = a.probs();
  probs.insert(probs.begin(), 0.0);
  double sum = 0;
  for (double v : probs) sum += v;
  const TruncatedPmf shifted(probs, std::max(0.0, 1.0 - sum));
  CHECK(wasserstein_discrete(a, shifted).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kolmogorov examples") {
  const TruncatedPmf a = TruncatedPmf::poisson(1.0, 1e-12);
  const TruncatedPmf b = TruncatedPmf::poisson(2.0, 1e-12);
  CHECK(kolmogorov_discrete(a, a).value == 0.0);
  // CDF-scan oracle value.
  CHECK(kolmogorov_discrete(a, b).value ==
        doctest::Approx(0.32975303263304656).epsilon(1e-10));
}

TEST_CASE("kolmogorov_grid: shifted gaussians") {
  std::vector<double> grid, c1, c2;
  for (int i = 0; i <= 6000; ++i) {
    const double x = -6.0 + 12.0 * i / 6000.0;
    grid.push_back(x);
    c1.push_back(std_normal_cdf(x));
    c2.push_back(std_normal_cdf(x - 0.5));
  }
  const GriddedLaw a = GriddedLaw::from_cdf(grid, c1);
  const GriddedLaw b = GriddedLaw::from_cdf(grid, c2);
  CHECK(kolmogorov_grid(a, b).value ==
        doctest::Approx(0.19741265136584741).epsilon(1e-6));
}

TEST_CASE("wasserstein_grid: uniform vs the n=2 increment atom law") {
  // Atom law P(0) = 3/4, P(1) = 1/4 vs U(0,1): exact piecewise integral.
  const GriddedLaw atoms = GriddedLaw::from_atoms({0.0, 1.0}, {0.75, 0.25});
  const GriddedLaw unif = GriddedLaw::from_cdf({0.0, 1.0}, {0.0, 1.0});
  CHECK(wasserstein_grid(atoms, unif).value == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(wasserstein_grid(unif, unif).value == 0.0);
}

TEST_CASE("wasserstein_discrete equals greedy optimal coupling on small supports") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const TruncatedPmf a = oracles::random_pmf(seed, 6);
    const TruncatedPmf b = oracles::random_pmf(seed + 1000, 5);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < a.probs().size(); ++i) xs.push_back(double(i));
    for (std::size_t i = 0; i < b.probs().size(); ++i) ys.push_back(double(i));
    const double coupling = oracles::wasserstein_coupling(xs, a.probs(), ys, b.probs());
    CHECK(wasserstein_discrete(a, b).value == doctest::Approx(coupling).epsilon(1e-12));
  }
}

TEST_CASE("metric axioms and the K <= TV <= W chain on integer pairs") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const TruncatedPmf a = oracles::random_pmf(seed, 7);
    const TruncatedPmf b = oracles::random_pmf(seed + 500, 7);
    const TruncatedPmf c = oracles::random_pmf(seed + 900, 7);
    const double tab = tv_discrete(a, b).value;
    const double tba = tv_discrete(b, a).value;
    CHECK(tab == doctest::Approx(tba).epsilon(1e-14));  // symmetry
    CHECK(tv_discrete(a, a).value == 0.0);              // identity
    CHECK(tab <= tv_discrete(a, c).value + tv_discrete(c, b).value + 1e-14);
    const double k = kolmogorov_discrete(a, b).value;
    const double w = wasserstein_discrete(a, b).value;
    CHECK(k <= tab + 1e-14);
    CHECK(tab <= w + 1e-14);
  }
}

TEST_CASE("wasserstein_step_vs_gaussian: point mass at zero vs N(0,1)") {
  const GriddedLaw delta0 = GriddedLaw::from_atoms({0.0}, {1.0});
  // E|Z| = sqrt(2/pi)
  CHECK(wasserstein_step_vs_gaussian(delta0, 0.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  // Scale equivariance.
  CHECK(wasserstein_step_vs_gaussian(delta0, 0.0, 4.0) ==
        doctest::Approx(2 * std::sqrt(2.0 / M_PI)).epsilon(1e-12));
}

TEST_CASE("empirical_wasserstein: constant samples at 0 vs N(0,1)") {
  std::vector<double> samples(2000, 0.0);
  const auto d = empirical_wasserstein(
      std::move(samples), [](double x) { return std_normal_cdf(x); }, -9, 9, 7);
  CHECK(d.value == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-6));
}

TEST_CASE("empirical_wasserstein: shifted target recovers the shift") {
  const double delta = 0.35;
  std::vector<double> samples(20000);
  counter_rng rng(42, 0x736869ULL);
  for (double& v : samples) v = rng.normal01();
  const auto d = empirical_wasserstein(
      std::move(samples), [&](double x) { return std_normal_cdf(x - delta); }, -10, 10,
      42);
  CHECK(d.value == doctest::Approx(delta).epsilon(0.05));
}

TEST_CASE("empirical_wasserstein self-consistency calibration") {
  // Samples drawn from the target: value <= error_bar in >= 90% of runs.
  int hits = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> samples(2000);
    counter_rng rng(1000 + r, 0x63616cULL);
    for (double& v : samples) v = rng.normal01();
    const auto d = empirical_wasserstein(
        std::move(samples), [](double x) { return std_normal_cdf(x); }, -10, 10,
        1000 + r);
    if (d.value <= d.error_bar) ++hits;
  }
  CHECK(hits >= 45);
}

TEST_CASE("empirical_wasserstein rejects tiny samples") {
  std::vector<double> samples(10, 0.0);
  CHECK_THROWS_AS(empirical_wasserstein(
                      std::move(samples), [](double x) { return std_normal_cdf(x); },
                      -5, 5, 1),
                  domain_error);
}
