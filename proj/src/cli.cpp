#include "steinbounds/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include "steinbounds/biasing.hpp"
#include "steinbounds/bounds.hpp"
#include "steinbounds/dist_core.hpp"
#include "steinbounds/distances.hpp"
#include "steinbounds/errors.hpp"
#include "steinbounds/experiments.hpp"
#include "steinbounds/quadrature.hpp"
#include "steinbounds/special.hpp"

namespace steinbounds {

namespace {

// ---------------------------------------------------------------------------
// Deterministic JSON emission: stable field order, %.17g reals.
// ---------------------------------------------------------------------------

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

class json_object {
 public:
  void field_raw(const std::string& key, std::string raw) {
    items_.emplace_back(key, std::move(raw));
  }
  void field(const std::string& key, double v) { field_raw(key, num17(v)); }
  void field(const std::string& key, const std::string& v) { field_raw(key, json_quote(v)); }
  void field(const std::string& key, const char* v) { field_raw(key, json_quote(v)); }
  void field(const std::string& key, bool v) { field_raw(key, v ? "true" : "false"); }
  void field_null(const std::string& key) { field_raw(key, "null"); }

  std::string str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i) out += ",";
      out += json_quote(items_[i].first) + ":" + items_[i].second;
    }
    out += "}";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

std::string report_json(const BoundReport& r) {
  json_object o;
  o.field("theorem_id", r.theorem_id);
  o.field("status", r.applicable() ? "ok" : "inapplicable");
  if (r.value)
    o.field("value", *r.value);
  else
    o.field_null("value");
  json_object comps;
  for (const auto& [k, v] : r.components) comps.field(k, v);
  o.field_raw("components", comps.str());
  json_object pre;
  for (const auto& [k, v] : r.preconditions) pre.field(k, v);
  o.field_raw("preconditions", pre.str());
  std::string warn = "[";
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    if (i) warn += ",";
    warn += json_quote(r.warnings[i]);
  }
  warn += "]";
  o.field_raw("warnings", warn);
  o.field("inputs_digest", r.inputs_digest);
  return o.str();
}

// ---------------------------------------------------------------------------
// Option bundle
// ---------------------------------------------------------------------------

struct cli_options {
  std::string command;
  std::string target;
  std::string w_mixing, z_mixing;
  std::string metric = "tv";
  std::string h_fn = "cos";
  std::string output;
  std::string sweep;
  std::vector<double> values;
  long n = -1, m = -1, k = -1;
  double c = 1.0;
  double dof = 8.0;
  double p = -1.0;
  std::uint64_t seed = 1;
  long samples = 100000;
  double tol = 1e-12;
  bool exact = false, mc = false, with_truth = false, quadrature = false;
  double theta = 0, sigma2 = -1, sum_m1 = 0, sum_m2 = 0, sum_m3 = 0, sum_sq_means = 0,
         cov_cross = 0;
  double moment3_abs = -1, moment2 = -1, lambda = -1, residual = 0;
  double fourth_moment = -1, h2_norm = 1.0;
};

metric_kind parse_metric(const std::string& s) {
  if (s == "tv") return metric_kind::tv;
  if (s == "k") return metric_kind::kolmogorov;
  if (s == "w") return metric_kind::wasserstein;
  throw domain_error("unknown metric '" + s + "' (expected tv|k|w)");
}

MixingLaw parse_mixing(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "grid") {
    if (rest.empty()) throw domain_error("grid mixing needs a CSV path");
    return MixingLaw::grid(GriddedLaw::load_density_csv(rest), true);
  }
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  auto want = [&](std::size_t k2) {
    if (args.size() != k2)
      throw domain_error("mixing '" + kind + "' expects " + std::to_string(k2) +
                         " parameter(s)");
  };
  if (kind == "point") {
    want(1);
    return MixingLaw::point_mass(args[0]);
  }
  if (kind == "poisson") {
    want(1);
    return MixingLaw::poisson(args[0]);
  }
  if (kind == "binomial") {
    want(2);
    return MixingLaw::binomial(static_cast<long>(std::llround(args[0])), args[1]);
  }
  if (kind == "gamma") {
    want(2);
    return MixingLaw::gamma(args[0], args[1]);
  }
  if (kind == "dickman") {
    want(1);
    return MixingLaw::dickman(args[0]);
  }
  throw domain_error("unknown mixing kind '" + kind +
                     "' (point|poisson|binomial|gamma|dickman|grid)");
}

long env_thread_cap() {
  const char* env = std::getenv("STEINBOUNDS_THREADS");
  if (env == nullptr) return 1;
  const long v = std::strtol(env, nullptr, 10);
  if (v < 1) return 1;
  return std::min<long>(v, static_cast<long>(std::thread::hardware_concurrency()));
}

// Deterministic replicate map: results land in slots indexed by replicate, so
// the outcome does not depend on the worker count.
template <typename F>
std::vector<double> sample_replicates(long count, F&& draw) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const long workers = std::min<long>(env_thread_cap(), count);
  if (workers <= 1) {
    for (long r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = draw(r);
    return out;
  }
  std::vector<std::thread> pool;
  for (long w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (long r = w; r < count; r += workers) out[static_cast<std::size_t>(r)] = draw(r);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------
// Bound dispatch
// ---------------------------------------------------------------------------

BoundReport compute_bound(const cli_options& o) {
  const metric_kind metric = parse_metric(o.metric);
  if (o.target == "mp" || o.target == "mp-ordered") {
    if (o.w_mixing.empty() || o.z_mixing.empty())
      throw domain_error(o.target + " needs --w-mixing and --z-mixing");
    const MixingLaw w = parse_mixing(o.w_mixing);
    const MixingLaw z = parse_mixing(o.z_mixing);
    if (o.target == "mp") return mp_distance_bound(w, z, metric);
    return mp_ordered_bound(w, z, metric);
  }
  if (o.target == "dickman") {
    if (o.n < 1) throw domain_error("dickman needs --n");
    return dickman_proposition_bound(o.c, o.n, metric);
  }
  if (o.target == "clt-na" || o.target == "clt-a") {
    if (o.sigma2 <= 0) throw domain_error(o.target + " needs --sigma2 > 0");
    MomentSummary ms{o.theta, o.sigma2, o.sum_m1, o.sum_m2, o.sum_m3,
                     o.sum_sq_means, o.cov_cross};
    return o.target == "clt-na" ? clt_neg_assoc_bound(ms) : clt_assoc_bound(ms);
  }
  if (o.target == "srs") {
    if (o.values.empty() || o.n < 1) throw domain_error("srs needs --values and --n");
    return srs_bound(o.values, o.n);
  }
  if (o.target == "urn") {
    if (o.m < 2 || o.n < 1 || o.k < 1) throw domain_error("urn needs --m, --n, --k");
    const double p = o.p > 0 ? o.p : 1.0 / static_cast<double>(o.m);
    return urn_overflow_bound(o.m, o.n, o.k, p);
  }
  if (o.target == "gauss-generic") {
    return gauss_generic_bound(o.moment3_abs, o.moment2, o.lambda, o.sigma2, o.residual);
  }
  if (o.target == "third-moment") {
    return third_moment_bound(o.fourth_moment, o.h2_norm);
  }
  if (o.target == "t") {
    return student_t_bound(o.dof);
  }
  throw domain_error("unknown target '" + o.target + "'");
}

// ---------------------------------------------------------------------------
// Ground truth for verify
// ---------------------------------------------------------------------------

struct truth_result {
  double value;
  double error_bar;
  std::string method;
  std::string experiment;  // serialized ExperimentSpec for MC paths
};

// |E cos(W) - E cos(Z)| for W the unit-variance scaled Student t.
truth_result student_t_truth(double dof) {
  if (!(dof > 4)) throw domain_error("t truth: dof must exceed 4");
  const double scale = std::sqrt((dof - 2.0) / dof);
  quad_options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-12;
  opt.max_panels = 20000;
  const double R = 500.0;
  opt.breaks = {-100, -10, -1, 0, 1, 10, 100};
  const double e_cos_w =
      integrate([&](double x) { return std::cos(scale * x) * student_t_pdf(x, dof); },
                -R, R, opt)
          .value;
  // Density tail beyond R, crudely bounded.
  const double tail = 2.0 * std::pow(R, -(dof - 1)) ;
  const double e_cos_z = std::exp(-0.5);
  return {std::fabs(e_cos_w - e_cos_z), 1e-11 + tail, "quadrature", ""};
}

truth_result compute_truth(const cli_options& o) {
  const metric_kind metric = parse_metric(o.metric);
  const bool use_mc = o.mc && !o.exact;

  if (o.target == "dickman") {
    if (o.n < 1) throw domain_error("dickman verify needs --n");
    const TruncatedPmf target = mixed_poisson_pmf(MixingLaw::dickman(o.c), 4096, o.tol);
    if (!use_mc) {
      const TruncatedPmf exact = bps_exact_pmf(o.n, o.c, o.tol);
      const DistanceResult d = metric == metric_kind::kolmogorov
                                   ? kolmogorov_discrete(exact, target)
                                   : tv_discrete(exact, target);
      return {d.value, d.error_bar, "exact_pmf", ""};
    }
    ExperimentSpec spec{bps_spec{o.n, o.c}, o.seed, o.samples};
    std::vector<double> draws = sample_replicates(o.samples, [&](long r) {
      counter_rng rng(o.seed, static_cast<std::uint64_t>(r));
      return static_cast<double>(bps_draw(o.n, o.c, rng));
    });
    std::vector<std::uint64_t> counts;
    for (double v : draws) {
      const auto j = static_cast<std::size_t>(v);
      if (j >= counts.size()) counts.resize(j + 1, 0);
      ++counts[j];
    }
    const DistanceResult d =
        empirical_tv_counts(counts, static_cast<std::uint64_t>(o.samples), target, o.seed);
    return {d.value, d.error_bar, "empirical", spec.to_json()};
  }

  if (o.target == "t") {
    return student_t_truth(o.dof);
  }

  if (o.target == "srs" || o.target == "urn") {
    GriddedLaw atoms = GriddedLaw::from_atoms({0.0}, {1.0});
    MomentSummary ms;
    ExperimentSpec spec;
    if (o.target == "srs") {
      if (o.values.empty() || o.n < 1) throw domain_error("srs verify needs --values and --n");
      auto res = srs_exact_law(o.values, o.n);
      atoms = res.atoms;
      ms = res.moments;
      spec = ExperimentSpec{srs_spec{o.values, o.n}, o.seed, o.samples};
    } else {
      if (o.m < 2 || o.n < 1 || o.k < 1) throw domain_error("urn verify needs --m, --n, --k");
      atoms = urn_exact_law(o.m, o.n, o.k, urn_count_mode::excess);
      ms = urn_moment_summary(o.m, o.n, o.k);
      spec = ExperimentSpec{urn_spec{o.m, o.n, o.k, urn_count_mode::excess}, o.seed,
                            o.samples};
    }
    if (!(ms.sigma2 > 0)) throw domain_error("verify: degenerate sigma^2");
    const double sigma = std::sqrt(ms.sigma2);
    if (!use_mc) {
      const double dw = wasserstein_step_vs_gaussian(atoms, ms.theta, ms.sigma2) / sigma;
      return {dw, 1e-12, "exact_grid", ""};
    }
    std::vector<double> draws = sample_replicates(o.samples, [&](long r) {
      counter_rng rng(o.seed, static_cast<std::uint64_t>(r));
      const double w = o.target == "srs"
                           ? srs_draw(o.values, o.n, rng)
                           : static_cast<double>(urn_draw(
                                 o.m, o.n, o.k, urn_count_mode::excess, rng));
      return (w - ms.theta) / sigma;
    });
    double lo = -8, hi = 8;
    for (double v : draws) {
      lo = std::min(lo, v - 1);
      hi = std::max(hi, v + 1);
    }
    const DistanceResult d = empirical_wasserstein(
        std::move(draws), [](double x) { return std_normal_cdf(x); }, lo, hi, o.seed);
    return {d.value, d.error_bar, "empirical", spec.to_json()};
  }

  if (o.target == "mp" || o.target == "mp-ordered") {
    if (o.w_mixing.empty() || o.z_mixing.empty())
      throw domain_error("mp verify needs --w-mixing and --z-mixing");
    const TruncatedPmf wp = mixed_poisson_pmf(parse_mixing(o.w_mixing), 4096, o.tol);
    const TruncatedPmf zp = mixed_poisson_pmf(parse_mixing(o.z_mixing), 4096, o.tol);
    const DistanceResult d = metric == metric_kind::kolmogorov
                                 ? kolmogorov_discrete(wp, zp)
                                 : tv_discrete(wp, zp);
    return {d.value, d.error_bar, "exact_pmf", ""};
  }

  throw domain_error("verify: no ground-truth path for target '" + o.target +
                     "' (use dickman|t|srs|urn|mp|mp-ordered)");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_bound(const cli_options& o, std::ostream& out) {
  const BoundReport r = compute_bound(o);
  out << report_json(r) << "\n";
  return r.applicable() ? 0 : 2;
}

int cmd_verify(const cli_options& o, std::ostream& out) {
  const BoundReport r = compute_bound(o);
  if (!r.applicable()) {
    out << report_json(r) << "\n";
    return 2;
  }
  const truth_result t = compute_truth(o);
  const double bound = r.value_or_throw();
  const double slack = bound + t.error_bar - t.value;
  const bool satisfied = slack >= -1e-12;
  json_object jo;
  jo.field("theorem_id", r.theorem_id);
  jo.field("bound", bound);
  jo.field("truth", t.value);
  jo.field("truth_error_bar", t.error_bar);
  jo.field("truth_method", t.method);
  jo.field("satisfied", satisfied);
  jo.field("slack", slack);
  jo.field("inputs_digest", r.inputs_digest);
  if (!t.experiment.empty()) jo.field_raw("experiment", t.experiment);
  out << jo.str() << "\n";
  return satisfied ? 0 : 1;
}

struct sweep_axis {
  std::string param;
  double start, stop, step;
};

sweep_axis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw domain_error("--sweep expects param=start:stop:step");
  sweep_axis ax;
  ax.param = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  std::stringstream ss(rest);
  std::string tok;
  std::vector<double> parts;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() == 2) parts.push_back(1.0);
  if (parts.size() != 3) throw domain_error("--sweep expects param=start:stop:step");
  ax.start = parts[0];
  ax.stop = parts[1];
  ax.step = parts[2];
  if (!(ax.step > 0)) throw domain_error("--sweep step must be positive");
  return ax;
}

void apply_sweep_value(cli_options& o, const std::string& param, double v) {
  if (param == "n")
    o.n = static_cast<long>(std::llround(v));
  else if (param == "m")
    o.m = static_cast<long>(std::llround(v));
  else if (param == "k")
    o.k = static_cast<long>(std::llround(v));
  else if (param == "c")
    o.c = v;
  else if (param == "dof")
    o.dof = v;
  else if (param == "p")
    o.p = v;
  else if (param == "fourth-moment")
    o.fourth_moment = v;
  else if (param == "lambda")
    o.lambda = v;
  else
    throw domain_error("--sweep over unsupported parameter '" + param + "'");
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

int cmd_table(const cli_options& base, std::ostream& out) {
  if (base.sweep.empty()) throw domain_error("table needs --sweep param=start:stop:step");
  const sweep_axis ax = parse_sweep(base.sweep);

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  for (double v = ax.start; v <= ax.stop + 1e-12; v += ax.step) {
    cli_options o = base;
    apply_sweep_value(o, ax.param, v);
    const BoundReport r = compute_bound(o);
    std::vector<std::pair<std::string, std::string>> cells;
    cells.emplace_back(ax.param, num17(v));
    cells.emplace_back("bound", r.applicable() ? num17(r.value_or_throw()) : "");
    for (const auto& [k2, val] : r.components) cells.emplace_back(k2, num17(val));
    if (o.target == "dickman") {
      const long n = o.n;
      cells.emplace_back("harmonic_dw", num17(overflow_harmonic_dw(n)));
      cells.emplace_back("harmonic_bound", num17(2.5 / static_cast<double>(n)));
    }
    if (base.with_truth && r.applicable()) {
      const truth_result t = compute_truth(o);
      cells.emplace_back("truth", num17(t.value));
      cells.emplace_back("truth_error_bar", num17(t.error_bar));
      cells.emplace_back("slack", num17(r.value_or_throw() + t.error_bar - t.value));
    }
    if (header.empty())
      for (const auto& [k2, _] : cells) header.push_back(k2);
    std::vector<std::string> row;
    for (const auto& [_, val] : cells) row.push_back(val);
    rows.push_back(std::move(row));
  }

  if (base.output == "json") {
    std::string payload = "[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) payload += ",";
      json_object jo;
      for (std::size_t c2 = 0; c2 < header.size() && c2 < rows[i].size(); ++c2)
        jo.field_raw(header[c2], rows[i][c2].empty() ? "null" : rows[i][c2]);
      payload += jo.str();
    }
    payload += "]";
    out << payload << "\n";
    return 0;
  }

  // RFC 4180: CRLF line endings.
  std::string text;
  for (std::size_t c2 = 0; c2 < header.size(); ++c2)
    text += (c2 ? "," : "") + csv_escape(header[c2]);
  text += "\r\n";
  for (const auto& row : rows) {
    for (std::size_t c2 = 0; c2 < row.size(); ++c2) text += (c2 ? "," : "") + csv_escape(row[c2]);
    text += "\r\n";
  }
  out << text;
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"explicit approximation-error bounds with verification"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h for the test-function flag
  cli_options o;

  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("target", o.target,
                    "mp|mp-ordered|dickman|clt-na|clt-a|srs|urn|gauss-generic|third-moment|t")
        ->required();
    sub->add_option("--w-mixing", o.w_mixing, "w mixing, e.g. poisson:2 or gamma:1,4");
    sub->add_option("--z-mixing", o.z_mixing, "z mixing (supplies Stein factors)");
    sub->add_option("--metric", o.metric, "tv|k|w");
    sub->add_option("--values", o.values, "population values for srs")->delimiter(',');
    sub->add_option("--n", o.n, "sample size / index parameter");
    sub->add_option("--m", o.m, "population / urn count");
    sub->add_option("--k", o.k, "urn capacity parameter");
    sub->add_option("--c", o.c, "Dickman scale");
    sub->add_option("--dof", o.dof, "Student t degrees of freedom");
    sub->add_option("--p", o.p, "urn assignment probability (must equal 1/m)");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--samples", o.samples, "Monte Carlo replicates");
    sub->add_option("--tol", o.tol, "truncation tolerance override");
    sub->add_option("--h", o.h_fn, "test function for t verification (cos)");
    sub->add_option("--output", o.output, "json|csv (table only)");
    sub->add_flag("--exact", o.exact, "use the exact/enumeration truth path");
    sub->add_flag("--mc", o.mc, "use the Monte Carlo truth path");
    sub->add_flag("--quadrature", o.quadrature, "quadrature truth path (t)");
    sub->add_option("--theta", o.theta);
    sub->add_option("--sigma2", o.sigma2);
    sub->add_option("--sum-m1", o.sum_m1);
    sub->add_option("--sum-m2", o.sum_m2);
    sub->add_option("--sum-m3", o.sum_m3);
    sub->add_option("--sum-sq-means", o.sum_sq_means);
    sub->add_option("--cov-cross", o.cov_cross);
    sub->add_option("--moment3-abs", o.moment3_abs);
    sub->add_option("--moment2", o.moment2);
    sub->add_option("--lambda", o.lambda);
    sub->add_option("--residual", o.residual);
    sub->add_option("--fourth-moment", o.fourth_moment);
    sub->add_option("--h2-norm", o.h2_norm);
  };

  CLI::App* bound = app.add_subcommand("bound", "compute a certified bound");
  CLI::App* verify = app.add_subcommand("verify", "compute a bound and check it against truth");
  CLI::App* table = app.add_subcommand("table", "sweep a parameter into a table");
  add_common(bound);
  add_common(verify);
  add_common(table);
  table->add_option("--sweep", o.sweep, "param=start:stop:step")->required();
  table->add_flag("--with-truth", o.with_truth, "add truth/slack columns");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    json_object jo;
    jo.field("error", "usage");
    jo.field("message", e.what());
    err << jo.str() << "\n";
    return 4;
  }

  try {
    if (bound->parsed()) return cmd_bound(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    return cmd_table(o, out);
  } catch (const convergence_error& e) {
    json_object jo;
    jo.field("error", "convergence");
    jo.field("message", e.what());
    jo.field("requested_tol", e.requested_tol);
    jo.field("achieved_tol", e.achieved_tol);
    err << jo.str() << "\n";
    return 3;
  } catch (const unsupported_error& e) {
    json_object jo;
    jo.field("error", "unsupported");
    jo.field("message", e.what());
    err << jo.str() << "\n";
    return 3;
  } catch (const domain_error& e) {
    json_object jo;
    jo.field("error", "domain");
    jo.field("message", e.what());
    err << jo.str() << "\n";
    return 3;
  }
}

}  // namespace steinbounds
