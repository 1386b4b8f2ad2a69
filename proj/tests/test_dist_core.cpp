#include <doctest.h>

#include <cmath>

#include "steinbounds/biasing.hpp"
#include "steinbounds/dickman.hpp"
#include "steinbounds/dist_core.hpp"
#include "steinbounds/distances.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/quadrature.hpp"
#include "steinbounds/special.hpp"
#include "oracles.hpp"

using namespace steinbounds;

TEST_CASE("truncated pmf invariants are audited") {
  CHECK_THROWS_AS(TruncatedPmf({0.5, 0.6}, 0.0), domain_error);
  CHECK_THROWS_AS(TruncatedPmf({0.5, 0.3}, 0.1), domain_error);
  CHECK_THROWS_AS(TruncatedPmf({-0.1, 1.1}, 0.0), domain_error);
  const TruncatedPmf ok({0.25, 0.25, 0.5}, 0.0);
  CHECK(ok.mean() == doctest::Approx(1.25));
}

TEST_CASE("mixed poisson pmf: point mass mixing is Poisson") {
  const TruncatedPmf pmf = mixed_poisson_pmf(MixingLaw::point_mass(2.0), 256, 1e-12);
  CHECK(pmf.at(0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  const TruncatedPmf direct = TruncatedPmf::poisson(2.0, 1e-12);
  CHECK(tv_discrete(pmf, direct).value < 1e-13);
}

TEST_CASE("mixed poisson pmf: Gamma(1,1) mixing gives Geometric(1/2)") {
  const TruncatedPmf pmf = mixed_poisson_pmf(MixingLaw::gamma(1.0, 1.0), 256, 1e-12);
  for (std::size_t j = 0; j < 20; ++j)
    CHECK(pmf.at(j) == doctest::Approx(std::pow(2.0, -(double(j) + 1.0))).epsilon(1e-12));
}

TEST_CASE("mixed poisson pmf: Dickman mixing recovers total-variance moments") {
  const TruncatedPmf pmf = mixed_poisson_pmf(MixingLaw::dickman(1.0), 512, 1e-12);
  CHECK(pmf.mean() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pmf.variance() == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("mixed poisson moment identities across the catalog") {
  for (const MixingLaw& mix :
       {MixingLaw::point_mass(1.5), MixingLaw::poisson(2.0), MixingLaw::binomial(10, 0.3),
        MixingLaw::gamma(2.0, 1.0), MixingLaw::dickman(0.7)}) {
    CAPTURE(mix.describe());
    const TruncatedPmf pmf = mixed_poisson_pmf(mix, 1024, 1e-12);
    CHECK(pmf.mean() == doctest::Approx(mix.mean()).epsilon(1e-6));
    CHECK(pmf.variance() ==
          doctest::Approx(mix.mean() + mix.variance()).epsilon(1e-6));
  }
}

TEST_CASE("dickman rho values") {
  CHECK(dickman_rho(0.5) == 1.0);
  CHECK(dickman_rho(1.0) == 1.0);
  // rho(x) = 1 - log x on [1,2]
  CHECK(dickman_rho(2.0) ==
        doctest::Approx(0.30685281944005469).epsilon(1e-9));
  // Frozen from an independent high-precision solve of the delay ODE.
  CHECK(dickman_rho(3.0) == doctest::Approx(0.048608388291131567).epsilon(1e-9));
  CHECK(dickman_rho(10.0) == doctest::Approx(2.7701718377261658e-11).epsilon(1e-9));
  CHECK(dickman_rho(15.0) == doctest::Approx(7.5899080043004544e-20).epsilon(1e-9));
  CHECK(dickman_rho(20.0) == doctest::Approx(2.4617828287668283e-29).epsilon(1e-9));
  CHECK_THROWS_AS(dickman_rho(-0.1), domain_error);
}

TEST_CASE("dickman density normalizes: integral of e^-gamma rho = 1") {
  CHECK(std::fabs(dickman_table::instance().raw_total_mass() - 1.0) < 1e-8);
}

TEST_CASE("dickman rho non-increasing on [1, inf)") {
  double prev = dickman_rho(1.0);
  for (double x = 1.05; x < 30.0; x += 0.05) {
    const double v = dickman_rho(x);
    CHECK(v <= prev * (1 + 1e-12));
    prev = v;
  }
}

TEST_CASE("compound poisson pmf: unit severity is Poisson") {
  CompoundPoissonParams params;
  params.rates = {2.0};
  params.total_rate = 2.0;
  const TruncatedPmf pmf = compound_poisson_pmf(params, 256, 1e-12);
  const TruncatedPmf direct = TruncatedPmf::poisson(2.0, 1e-12);
  CHECK(tv_discrete(pmf, direct).value < 1e-14);
}

TEST_CASE("compound poisson pmf: two-atom example") {
  CompoundPoissonParams params;
  params.rates = {0.5, 0.5};
  params.total_rate = 1.0;
  const TruncatedPmf pmf = compound_poisson_pmf(params, 256, 1e-12);
  // P(X=2) = e^{-1} (0.5 + 0.5^2/2) = 0.625 e^{-1}
  CHECK(pmf.at(2) == doctest::Approx(0.625 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("panjer recursion agrees with atom-count enumeration") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    counter_rng rng(seed, 0x70616e6aULL);
    CompoundPoissonParams params;
    double lambda = 0;
    for (int j = 0; j < 4; ++j) {
      const double r = rng.uniform(0.0, 0.5);
      params.rates.push_back(r);
      lambda += r;
    }
    if (lambda < 0.05) continue;
    params.total_rate = lambda;
    const TruncatedPmf pmf = compound_poisson_pmf(params, 512, 1e-12);
    const auto brute = oracles::cp_pmf_enumeration(params.rates, pmf.max_index(), 30);
    double tv = 0;
    for (std::size_t k2 = 0; k2 <= pmf.max_index(); ++k2)
      tv += std::fabs(pmf.at(k2) - brute[k2]);
    CHECK(tv / 2 < 1e-9);
  }
}

TEST_CASE("mp_cp_params for Poisson mixing: closed-form rates") {
  const MixingLaw mix = MixingLaw::poisson(2.0);
  const auto params = mp_cp_params(mix, steutel_increment(mix));
  // lambda_i = 2 e^{-1} / i!
  CHECK(params.rate(1) == doctest::Approx(2 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(params.rate(2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(params.total_rate ==
        doctest::Approx(2 * (1 - std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("mp_cp_params reproduces the mixed poisson law") {
  for (const MixingLaw& mix :
       {MixingLaw::poisson(2.0), MixingLaw::point_mass(1.0), MixingLaw::gamma(1.5, 2.0),
        MixingLaw::dickman(1.0)}) {
    CAPTURE(mix.describe());
    const auto params = mp_cp_params(mix, steutel_increment(mix));
    const TruncatedPmf via_cp = compound_poisson_pmf(params, 2048, 1e-11);
    const TruncatedPmf direct = mixed_poisson_pmf(mix, 2048, 1e-11);
    CHECK(tv_discrete(via_cp, direct).value < 1e-10);
  }
}

TEST_CASE("mp_cp_params mean identity: sum i lambda_i = E xi") {
  for (const MixingLaw& mix :
       {MixingLaw::binomial(1, 1.0), MixingLaw::poisson(2.0), MixingLaw::gamma(2.0, 3.0),
        MixingLaw::dickman(0.5)}) {
    CAPTURE(mix.describe());
    const auto params = mp_cp_params(mix, steutel_increment(mix));
    CHECK(params.mean_rate_mass() == doctest::Approx(mix.mean()).epsilon(1e-10));
  }
}

TEST_CASE("gaussian cdf") {
  CHECK(gaussian_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gaussian_cdf(1.96, 0.0, 1.0) ==
        doctest::Approx(0.97500210485177952).epsilon(1e-12));
  CHECK(gaussian_cdf(3.5, 3.5, 4.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_cdf(0.0, 0.0, 0.0), domain_error);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double u : {1e-9, 1e-4, 0.025, 0.3, 0.5, 0.7, 0.975, 1 - 1e-6}) {
    CHECK(std_normal_cdf(std_normal_quantile(u)) == doctest::Approx(u).epsilon(1e-11));
  }
}

TEST_CASE("quadrature: smooth and kinked integrands") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -8, 8, {});
  CHECK(r.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  quad_options opt;
  opt.breaks = {0.0};
  const auto r2 = integrate([](double x) { return std::fabs(x); }, -1, 2, opt);
  CHECK(r2.value == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("grid law csv loader round-trips a density") {
  const std::string path = "/tmp/steinbounds_grid_test.csv";
  {
    FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("x,density\n", f);
    for (int i = 0; i <= 100; ++i)
      std::fprintf(f, "%.10f,%.10f\n", i * 0.02, 0.5);
    std::fclose(f);
  }
  const GriddedLaw law = GriddedLaw::load_density_csv(path);
  CHECK(law.mean() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(law.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-9));
  const MixingLaw mix = MixingLaw::grid(law, true);
  // MP(U(0,2)): P(Z=0) = E e^{-xi} = (1 - e^{-2})/2
  const TruncatedPmf pmf = mixed_poisson_pmf(mix, 256, 1e-10);
  CHECK(pmf.at(0) == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-9));
}

TEST_CASE("mixed poisson rejects bad tolerances") {
  CHECK_THROWS_AS(mixed_poisson_pmf(MixingLaw::poisson(1.0), 256, -1.0), domain_error);
  // Unreachable tolerance within the window cap.
  CHECK_THROWS_AS(mixed_poisson_pmf(MixingLaw::poisson(40.0), 10, 1e-12),
                  convergence_error);
}
