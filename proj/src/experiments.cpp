#include "steinbounds/experiments.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>

#include "steinbounds/errors.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

namespace {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

// Exact law of S = sum_k k B_k, E B_k = 1/k: weight[s] = P(S = s).
std::vector<rational> weighted_bernoulli_sum_law(long n) {
  const long smax = n * (n + 1) / 2;
  std::vector<rational> dp(static_cast<std::size_t>(smax) + 1, 0);
  dp[0] = 1;
  for (long k = 1; k <= n; ++k) {
    const rational pk(1, k);
    for (long s = smax; s >= k; --s)
      dp[s] = dp[s] * (1 - pk) + dp[s - k] * pk;
    for (long s = k - 1; s >= 0; --s) dp[s] = dp[s] * (1 - pk);
  }
  return dp;
}

}  // namespace

TruncatedPmf bps_exact_pmf(long n, double c, double tol) {
  if (n < 1) throw domain_error("bps_exact_pmf: n must be >= 1");
  if (n > 20)
    throw domain_error("bps_exact_pmf: n > 20; use the sampler for large n");
  if (!(c > 0)) throw domain_error("bps_exact_pmf: c must be positive");
  const auto weights = weighted_bernoulli_sum_law(n);

  // Mixture of Poissons with means c*s/n; extend until the mixture tail
  // clears tol.
  std::vector<double> probs;
  double cum = 0;
  const std::size_t jcap = 65536;
  for (std::size_t j = 0; j < jcap && cum < 1.0 - tol; ++j) {
    double mass = 0;
    for (std::size_t s = 0; s < weights.size(); ++s) {
      if (weights[s] == 0) continue;
      mass += static_cast<double>(weights[s]) *
              poisson_pmf(c * static_cast<double>(s) / static_cast<double>(n), j);
    }
    probs.push_back(mass);
    cum += mass;
  }
  return finish_pmf(std::move(probs), tol, "bps_exact_pmf");
}

GriddedLaw bps_increment_atoms(long n, double c) {
  if (n < 1) throw domain_error("bps_increment_atoms: n must be >= 1");
  // P(0) = H_n / n, P(c k / n) = (1 - 1/k)/n.
  std::vector<double> pos{0.0}, mass{0.0};
  double h = 0;
  for (long k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  mass[0] = h / static_cast<double>(n);
  for (long k = 2; k <= n; ++k) {
    pos.push_back(c * static_cast<double>(k) / static_cast<double>(n));
    mass.push_back((1.0 - 1.0 / static_cast<double>(k)) / static_cast<double>(n));
  }
  return GriddedLaw::from_atoms(std::move(pos), std::move(mass));
}

long bps_draw(long n, double c, counter_rng& rng) {
  long w = 0;
  for (long k = 1; k <= n; ++k) {
    const bool b = rng.bernoulli(1.0 / static_cast<double>(k));
    const long p = rng.poisson(c * static_cast<double>(k) / static_cast<double>(n));
    if (b) w += p;
  }
  return w;
}

srs_exact_result srs_exact_law(const std::vector<double>& values, long n) {
  const long m = static_cast<long>(values.size());
  if (n < 1 || n > m) throw domain_error("srs_exact_law: need 1 <= n <= m");
  if (n == m) throw domain_error("srs_exact_law: n = m is a degenerate point mass");
  // C(m, n) feasibility guard.
  double log_count = 0;
  for (long i = 0; i < n; ++i)
    log_count += std::log(static_cast<double>(m - i) / static_cast<double>(i + 1));
  if (log_count > std::log(1e6))
    throw domain_error("srs_exact_law: more than 1e6 subsets; use the sampler");

  std::map<double, bigint> counts;
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  bigint total = 0;
  while (true) {
    double sum = 0;
    for (long i : idx) sum += values[static_cast<std::size_t>(i)];
    counts[sum] += 1;
    total += 1;
    // next combination
    long i = n - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (long j = i + 1; j < n; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  std::vector<double> pos, mass;
  for (const auto& [v, cnt] : counts) {
    pos.push_back(v);
    mass.push_back(static_cast<double>(rational(cnt, total)));
  }
  return {GriddedLaw::from_atoms(std::move(pos), std::move(mass)),
          srs_moment_summary(values, n)};
}

double srs_draw(const std::vector<double>& values, long n, counter_rng& rng) {
  const long m = static_cast<long>(values.size());
  if (n < 1 || n > m) throw domain_error("srs_draw: need 1 <= n <= m");
  std::vector<long> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  double sum = 0;
  for (long i = 0; i < n; ++i) {
    const long j = rng.uniform_int(i, m - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    sum += values[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
  }
  return sum;
}

GriddedLaw urn_exact_law(long m, long n, long k, urn_count_mode mode) {
  if (m < 1 || n < 0 || k < 1) throw domain_error("urn_exact_law: bad parameters");
  auto y_of = [&](long s) -> long {
    if (mode == urn_count_mode::excess) return s >= k ? s - k + 1 : 0;
    return s >= k ? 1 : 0;
  };
  const long wmax = mode == urn_count_mode::excess ? n : m;

  if (n <= 30) {
    // DP over urns with exact rational weights: dp[used][w] accumulates
    // sum over count splits of prod 1/s_j!.
    std::vector<std::vector<rational>> dp(
        static_cast<std::size_t>(n) + 1,
        std::vector<rational>(static_cast<std::size_t>(wmax) + 1, 0));
    dp[0][0] = 1;
    for (long urn = 0; urn < m; ++urn) {
      std::vector<std::vector<rational>> next(
          static_cast<std::size_t>(n) + 1,
          std::vector<rational>(static_cast<std::size_t>(wmax) + 1, 0));
      for (long used = 0; used <= n; ++used)
        for (long w = 0; w <= wmax; ++w) {
          if (dp[used][w] == 0) continue;
          for (long s = 0; s + used <= n; ++s) {
            const long w2 = w + y_of(s);
            if (w2 > wmax) continue;
            bigint fact = 1;
            for (long i = 2; i <= s; ++i) fact *= i;
            next[used + s][w2] += dp[used][w] / rational(fact);
          }
        }
      dp.swap(next);
    }
    bigint nfact = 1;
    for (long i = 2; i <= n; ++i) nfact *= i;
    bigint mpow = 1;
    for (long i = 0; i < n; ++i) mpow *= m;
    std::vector<double> pos, mass;
    for (long w = 0; w <= wmax; ++w) {
      if (dp[static_cast<std::size_t>(n)][static_cast<std::size_t>(w)] == 0) continue;
      const rational p =
          dp[static_cast<std::size_t>(n)][static_cast<std::size_t>(w)] * nfact / mpow;
      pos.push_back(static_cast<double>(w));
      mass.push_back(static_cast<double>(p));
    }
    return GriddedLaw::from_atoms(std::move(pos), std::move(mass));
  }

  // Floating-point DP in log-free form for larger n.
  std::vector<std::vector<double>> dp(
      static_cast<std::size_t>(n) + 1,
      std::vector<double>(static_cast<std::size_t>(wmax) + 1, 0.0));
  dp[0][0] = 1.0;
  for (long urn = 0; urn < m; ++urn) {
    std::vector<std::vector<double>> next(
        static_cast<std::size_t>(n) + 1,
        std::vector<double>(static_cast<std::size_t>(wmax) + 1, 0.0));
    for (long used = 0; used <= n; ++used)
      for (long w = 0; w <= wmax; ++w) {
        if (dp[used][w] == 0) continue;
        for (long s = 0; s + used <= n; ++s) {
          const long w2 = w + y_of(s);
          if (w2 > wmax) continue;
          next[used + s][w2] += dp[used][w] * std::exp(-log_factorial(s));
        }
      }
    dp.swap(next);
  }
  const double scale = log_factorial(n) - n * std::log(static_cast<double>(m));
  std::vector<double> pos, mass;
  for (long w = 0; w <= wmax; ++w) {
    const double p = dp[static_cast<std::size_t>(n)][static_cast<std::size_t>(w)];
    if (p == 0) continue;
    pos.push_back(static_cast<double>(w));
    mass.push_back(p * std::exp(scale));
  }
  return GriddedLaw::from_atoms(std::move(pos), std::move(mass));
}

long urn_draw(long m, long n, long k, urn_count_mode mode, counter_rng& rng) {
  std::vector<long> counts(static_cast<std::size_t>(m), 0);
  for (long b = 0; b < n; ++b) ++counts[static_cast<std::size_t>(rng.uniform_int(0, m - 1))];
  long w = 0;
  for (long s : counts) {
    if (mode == urn_count_mode::excess)
      w += s >= k ? s - k + 1 : 0;
    else
      w += s >= k ? 1 : 0;
  }
  return w;
}

double dickman_draw(double c, counter_rng& rng, int depth) {
  if (depth < 1) throw domain_error("dickman_draw: depth must be >= 1");
  double d = 0;
  for (int i = 0; i < depth; ++i) d = rng.uniform01() * (1.0 + d);
  return c * d;
}

harmonic_decomposition overflow_harmonic_terms(long n) {
  if (n < 1) throw domain_error("overflow_harmonic_terms: n must be >= 1");
  std::vector<double> harm(static_cast<std::size_t>(n) + 1, 0.0);
  for (long j = 1; j <= n; ++j)
    harm[static_cast<std::size_t>(j)] =
        harm[static_cast<std::size_t>(j - 1)] + 1.0 / static_cast<double>(j);
  double b = 0;
  for (long j = 0; j < n; ++j)
    b += (harm[static_cast<std::size_t>(n)] - harm[static_cast<std::size_t>(j)]) /
         static_cast<double>(n) / static_cast<double>(n);
  return {1.0 / (2.0 * static_cast<double>(n)), b};
}

double overflow_harmonic_dw(long n) {
  if (n < 1) throw domain_error("overflow_harmonic_dw: n must be >= 1");
  // F(x) = floor(nx)/n + (H_n - H_floor(nx))/n on [0,1); piecewise constant,
  // so the integral against |F - x| is exact.
  std::vector<double> harm(static_cast<std::size_t>(n) + 1, 0.0);
  for (long j = 1; j <= n; ++j)
    harm[static_cast<std::size_t>(j)] =
        harm[static_cast<std::size_t>(j - 1)] + 1.0 / static_cast<double>(j);
  double total = 0;
  for (long j = 0; j < n; ++j) {
    const double a = static_cast<double>(j) / static_cast<double>(n);
    const double b = static_cast<double>(j + 1) / static_cast<double>(n);
    const double level =
        a + (harm[static_cast<std::size_t>(n)] - harm[static_cast<std::size_t>(j)]) /
                static_cast<double>(n);
    if (level <= a)
      total += (a - level) * (b - a) + 0.5 * (b - a) * (b - a);
    else if (level >= b)
      total += (level - a) * (b - a) - 0.5 * (b - a) * (b - a);
    else
      total += 0.5 * ((level - a) * (level - a) + (b - level) * (b - level));
  }
  return total;
}

std::string ExperimentSpec::to_json() const {
  nlohmann::ordered_json j;
  if (const auto* b = std::get_if<bps_spec>(&kind)) {
    j["kind"] = "bps";
    j["n"] = b->n;
    j["c"] = b->c;
  } else if (const auto* s = std::get_if<srs_spec>(&kind)) {
    j["kind"] = "srs";
    j["values"] = s->values;
    j["n"] = s->n;
  } else if (const auto* u = std::get_if<urn_spec>(&kind)) {
    j["kind"] = "urn";
    j["m"] = u->m;
    j["n"] = u->n;
    j["k"] = u->k;
    j["count_mode"] = u->mode == urn_count_mode::excess ? "excess" : "urns";
  } else if (const auto* d = std::get_if<dickman_mp_spec>(&kind)) {
    j["kind"] = "dickman-mp";
    j["c"] = d->c;
  } else if (const auto* t = std::get_if<student_t_spec>(&kind)) {
    j["kind"] = "t";
    j["dof"] = t->dof;
  }
  j["seed"] = seed;
  j["replicates"] = replicates;
  return j.dump();
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ExperimentSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bps") {
    spec.kind = bps_spec{j.at("n").get<long>(), j.at("c").get<double>()};
  } else if (kind == "srs") {
    spec.kind = srs_spec{j.at("values").get<std::vector<double>>(), j.at("n").get<long>()};
  } else if (kind == "urn") {
    const std::string mode = j.at("count_mode").get<std::string>();
    if (mode != "excess" && mode != "urns")
      throw domain_error("ExperimentSpec: unknown count_mode " + mode);
    spec.kind = urn_spec{j.at("m").get<long>(), j.at("n").get<long>(),
                         j.at("k").get<long>(),
                         mode == "excess" ? urn_count_mode::excess : urn_count_mode::urns};
  } else if (kind == "dickman-mp") {
    spec.kind = dickman_mp_spec{j.at("c").get<double>()};
  } else if (kind == "t") {
    spec.kind = student_t_spec{j.at("dof").get<double>()};
  } else {
    throw domain_error("ExperimentSpec: unknown kind " + kind);
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("replicates")) spec.replicates = j.at("replicates").get<long>();
  return spec;
}

}  // namespace steinbounds
