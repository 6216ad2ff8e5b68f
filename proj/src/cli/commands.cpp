#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anticonc/bounds.hpp"
#include "anticonc/error.hpp"
#include "anticonc/fuzz.hpp"
#include "anticonc/mgf.hpp"
#include "anticonc/oracle.hpp"
#include "anticonc/polyform.hpp"
#include "anticonc/qform_json.hpp"
#include "cli/grid.hpp"
#include "json.hpp"

namespace anticonc::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json num_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
      out << '\n';
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[columns[i]] = num_json(row[i]);
      arr.push_back(std::move(obj));
    }
    return arr;
  }
};

struct InputOptions {
  std::string poly;
  std::string qform_path;

  void attach(CLI::App* app) {
    auto* p = app->add_option("--poly", poly, "degree-2 polynomial, e.g. \"x1^2 + 1\"");
    auto* q = app->add_option("--qform", qform_path, "QForm JSON file");
    p->excludes(q);
  }

  QForm load() const {
    if (poly.empty() == qform_path.empty())
      throw InputError("exactly one of --poly or --qform is required");
    if (!poly.empty()) return to_qform(parse_poly(poly));
    return load_qform(qform_path);
  }
};

struct GridOptions {
  std::vector<double> values;
  std::string grid;

  std::vector<double> resolve(const char* what, bool required) const {
    std::vector<double> out = values;
    if (!grid.empty()) {
      const std::vector<double> g = parse_grid(grid);
      out.insert(out.end(), g.begin(), g.end());
    }
    if (required && out.empty()) throw InputError(std::string("no ") + what + " values given");
    return out;
  }
};

void require_positive(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw InputError(std::string(what) + " values must be positive, got " + num(x));
}

void require_psd_input(const QForm& q) { require_nonneg(q); }

void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json")
    out << t.to_json().dump(2) << '\n';
  else
    t.write_csv(out);
}

// --- bound -----------------------------------------------------------------

struct BoundArgs {
  GridOptions eps;
  double cw_c = kNaN;
  unsigned cw_d = 0;
  bool has_c = false;
  bool has_d = false;
  std::string format = "csv";
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const std::vector<double> eps = a.eps.resolve("eps", true);
  require_positive(eps, "eps");
  if (a.has_c != a.has_d) throw InputError("--cw-C and --cw-d must be given together");
  const bool cw = a.has_c;

  Table t;
  t.columns = {"eps", "lemma2_sharp", "lemma2", "theorem2", "zeta", "half_eps"};
  if (cw) t.columns.push_back("cw");
  for (double e : eps) {
    const Epsilon ep(e);
    const Lemma2Bound l2 = lemma2_bound(ep);
    const bool unit = e < 1.0;
    std::vector<double> row = {e, l2.sharp, l2.simple, theorem2_bound(ep),
                               unit ? zeta(ep) : kNaN, unit ? 0.5 * e : kNaN};
    if (cw) row.push_back(cw_bound(ep, a.cw_d, a.cw_c));
    t.rows.push_back(std::move(row));
  }
  write_table(t, a.format, out);
  return kOk;
}

// --- mgf -------------------------------------------------------------------

struct MgfArgs {
  InputOptions input;
  GridOptions lambda;
  std::string format = "csv";
};

int cmd_mgf(const MgfArgs& a, std::ostream& out) {
  const QForm q = a.input.load();
  const std::vector<double> lambdas = a.lambda.resolve("lambda", true);
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw InputError("lambda values must be non-negative, got " + num(l));
  require_psd_input(q);

  Table t;
  t.columns = {"lambda", "exact", "upper", "schur_term"};
  for (double l : lambdas) {
    const LaplaceEval e = exact_laplace(q, l);
    t.rows.push_back({l, e.exact, e.upper, e.schur_term});
  }
  write_table(t, a.format, out);
  return kOk;
}

// --- prob ------------------------------------------------------------------

struct ProbArgs {
  InputOptions input;
  GridOptions eps;
  std::string method = "inversion";
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::uint64_t samples = 1'000'000;
  std::string format = "csv";
};

int cmd_prob(const ProbArgs& a, std::ostream& out) {
  const QForm q = a.input.load();
  const std::vector<double> eps = a.eps.resolve("eps", true);
  require_positive(eps, "eps");
  if (!(a.tol >= 1e-10 && a.tol <= 1e-4)) throw InputError("--tol must lie in [1e-10, 1e-4]");
  if (a.samples < 1000) throw InputError("--samples must be at least 1000");
  require_psd_input(q);
  const double mean = expectation(q);
  if (!(mean > 0.0)) throw DegenerateInstance("degenerate instance: E f = 0");

  std::vector<double> thresholds;
  for (double e : eps) thresholds.push_back(e * mean);

  const bool want_inv = a.method != "montecarlo";
  const bool want_mc = a.method != "inversion";
  std::vector<ProbEstimate> inv;
  std::vector<ProbEstimate> mc;
  if (want_inv) {
    ProbOptions opts;
    opts.tol = a.tol;
    for (double e : eps) inv.push_back(small_ball_prob(q, Epsilon(e), opts));
  }
  if (want_mc) mc = monte_carlo_multi(q, thresholds, a.samples, a.seed, 0);

  const std::vector<ProbEstimate>& primary = want_inv ? inv : mc;
  Table t;
  t.columns = {"eps", "p_oracle", "ci_low", "ci_high", "lemma2", "theorem2", "ratio"};
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Epsilon ep(eps[i]);
    const double bound = theorem2_bound(ep);
    t.rows.push_back({eps[i], primary[i].p, primary[i].ci_low, primary[i].ci_high,
                      lemma2_bound(ep).simple, bound, primary[i].p / bound});
  }

  Table cross;
  if (want_inv && want_mc) {
    cross.columns = {"eps", "p_inversion", "p_montecarlo", "mc_ci_low", "mc_ci_high",
                     "abs_diff", "within_ci"};
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double diff = std::abs(inv[i].p - mc[i].p);
      const bool within = inv[i].p >= mc[i].ci_low && inv[i].p <= mc[i].ci_high;
      cross.rows.push_back({eps[i], inv[i].p, mc[i].p, mc[i].ci_low, mc[i].ci_high, diff,
                            within ? 1.0 : 0.0});
    }
  }

  if (a.format == "json") {
    json j = {{"method", a.method}, {"rows", t.to_json()}};
    if (!cross.rows.empty()) j["discrepancy"] = cross.to_json();
    out << j.dump(2) << '\n';
  } else {
    t.write_csv(out);
    if (!cross.rows.empty()) {
      out << '\n';
      cross.write_csv(out);
    }
  }
  return kOk;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  InputOptions input;
  std::string eps_grid = "1e-4:0.3:20log";
  std::uint64_t seed = 0;
  std::uint64_t samples = 200'000;
};

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Check> verify_instance(const QForm& q, const std::vector<double>& eps_grid,
                                   std::uint64_t seed, std::uint64_t samples) {
  std::vector<Check> checks;
  const double scale = 1.0 + q.scale();
  const double slack = 1e-9 * scale;

  const NonnegCertificate cert = validate_nonneg(q);
  checks.push_back({"psd", cert.passed, "min_eigenvalue=" + num(cert.min_eigenvalue)});
  const double mean = expectation(q);
  checks.push_back({"expectation_positive", mean > 0.0, "E f=" + num(mean)});

  const std::vector<double> lambdas = parse_grid("1e-3:1e3:7log");
  {
    double worst_schur = std::numeric_limits<double>::infinity();
    bool ordered = true;
    bool monotone = true;
    double prev = 1.0;
    for (double l : lambdas) {
      const LaplaceEval e = exact_laplace(q, l);
      worst_schur = std::min(worst_schur, e.schur_term);
      ordered = ordered && e.exact >= 0.0 && e.exact <= e.upper;
      monotone = monotone && e.exact <= prev;
      prev = e.exact;
    }
    checks.push_back({"schur_nonnegative", worst_schur >= -slack,
                      "min schur_term=" + num(worst_schur)});
    checks.push_back({"laplace_exact_le_upper", ordered, num(lambdas.size()) + " rates"});
    checks.push_back({"laplace_monotone", monotone, "exact non-increasing in lambda"});
  }
  {
    double worst_gap = std::numeric_limits<double>::infinity();
    for (double eta : lambdas) worst_gap = std::min(worst_gap, det_trace_gap(q.q22, eta));
    checks.push_back({"det_trace_gap", worst_gap >= -slack, "min gap=" + num(worst_gap)});
  }

  std::mt19937_64 rng = make_rng(seed, 0);
  std::normal_distribution<double> normal;
  {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double gamma : parse_grid("1e-6:1:7log")) {
      for (int k = 0; k < 50; ++k) {
        Vector x(q.n);
        for (double& xi : x) xi = normal(rng);
        const double lhs = evaluate(q, x) + gamma;
        const double root = std::sqrt(q.q11 + gamma);
        const double sq = root + dot(q.q12, x) / root;
        const double margin = lhs - sq * sq;
        worst = std::min(worst, margin);
        ok = ok && margin >= -slack;
      }
    }
    checks.push_back({"completing_square", ok, "min margin=" + num(worst)});
  }

  const SpectralForm s = reduce(q);
  {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Vector x(q.n);
      for (double& xi : x) xi = normal(rng);
      worst = std::max(worst, std::abs(evaluate(q, x) - evaluate(s, x)) /
                                  (1.0 + std::abs(evaluate(q, x))));
    }
    checks.push_back({"spectral_reconstruction", worst <= 1e-9 * scale,
                      "max relative residual=" + num(worst)});
  }

  const double trace = q.q22.trace();
  {
    std::size_t passed = 0;
    std::size_t total = 0;
    double worst_ratio = 0.0;
    for (double e : eps_grid) {
      const ProbEstimate p = small_ball_prob(q, Epsilon(e));
      const double bound = theorem2_bound(Epsilon(e));
      ++total;
      if (p.ci_low <= bound) ++passed;
      worst_ratio = std::max(worst_ratio, p.p / bound);
    }
    checks.push_back({"theorem2_dominance", passed == total,
                      num(passed) + "/" + num(total) + " checks, max ratio=" + num(worst_ratio)});
  }

  if (trace > 0.0) {
    bool chain = true;
    bool lemma2 = true;
    double worst = 0.0;
    for (double e : eps_grid) {
      if (!(e < 1.0)) continue;
      const Epsilon ep(e);
      const double eta = chernoff_eta_star(ep, trace);
      const double upper = chernoff_objective(q, ep, eta, false);
      const double exact = chernoff_objective(q, ep, eta, true);
      chain = chain && upper <= lemma2_bound(ep).sharp + 1e-12 && exact <= upper * (1 + 1e-12);
      const ProbEstimate p = prob_below(q, e * trace);
      lemma2 = lemma2 && p.ci_low <= lemma2_bound(ep).simple && p.ci_low <= exact * (1 + 1e-9);
      worst = std::max(worst, upper / lemma2_bound(ep).sharp);
    }
    checks.push_back({"chernoff_chain", chain, "max objective/sharp=" + num(worst)});
    checks.push_back({"lemma2_trace_threshold", lemma2, "P{f <= eps Tr(Q22)} <= (e eps)^(1/2)"});
  }

  if (q.q11 > 0.0) {
    // Thresholds 2 eps q11 - (1 - 2 eps) gamma grow as gamma decreases.
    const double e = std::min(eps_grid.front(), 0.4);
    double prev = -1.0;
    bool monotone = true;
    for (double gamma : {1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-6, 0.0}) {
      const double t = 2.0 * e * q.q11 - (1.0 - 2.0 * e) * gamma * q.q11;
      const ProbEstimate p = prob_below(q, t);
      monotone = monotone && p.p >= prev - (p.ci_high - p.ci_low) - 1e-15;
      prev = p.p;
    }
    checks.push_back({"gamma_limit_monotone", monotone, "eps=" + num(e)});
  }

  {
    const double c = 7.25;
    const QForm scaled = q.scaled(c);
    bool ok = true;
    for (double e : eps_grid) {
      const ProbEstimate a = small_ball_prob(q, Epsilon(e));
      const ProbEstimate b = small_ball_prob(scaled, Epsilon(e));
      ok = ok && std::abs(a.p - b.p) <= (a.ci_high - a.ci_low) + (b.ci_high - b.ci_low) + 1e-12;
    }
    checks.push_back({"scale_invariance", ok, "c=" + num(c)});
  }

  if (samples > 0) {
    std::vector<double> thresholds;
    for (double e : eps_grid) thresholds.push_back(e * mean);
    const std::vector<ProbEstimate> mc = monte_carlo_multi(q, thresholds, samples, seed, 1);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      const ProbEstimate p = small_ball_prob(q, Epsilon(eps_grid[i]));
      const double width = mc[i].ci_high - mc[i].ci_low;
      if (std::abs(p.p - mc[i].p) <= width + 0.5 * (p.ci_high - p.ci_low)) ++agree;
    }
    checks.push_back({"inversion_vs_montecarlo", agree == eps_grid.size(),
                      num(agree) + "/" + num(eps_grid.size()) + " within interval width"});
  }
  return checks;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const QForm q = a.input.load();
  const std::vector<double> eps = parse_grid(a.eps_grid);
  require_positive(eps, "eps");
  if (a.samples != 0 && a.samples < 1000)
    throw InputError("--samples must be 0 or at least 1000");
  require_psd_input(q);
  if (!(expectation(q) > 0.0)) throw DegenerateInstance("degenerate instance: E f = 0");

  const std::vector<Check> checks = verify_instance(q, eps, a.seed, a.samples);
  bool all = true;
  for (const Check& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    all = all && c.passed;
  }
  out << (all ? "all checks passed" : "verification FAILED") << '\n';
  return all ? kOk : kAssertionFailure;
}

// --- fuzz ------------------------------------------------------------------

struct FuzzArgs {
  long long instances = 1000;
  std::string dims = "1:8";
  std::string eps_grid = "1e-4:0.3:20log";
  std::uint64_t seed = 0;
  std::string generator = "all";
  std::uint64_t samples = 100'000;
  double tol = 1e-10;
  unsigned threads = 0;
  std::string out_path;
  std::string worst_path;
};

int cmd_fuzz(const FuzzArgs& a, std::ostream& out, std::ostream& err) {
  FuzzConfig cfg;
  if (a.instances <= 0) throw InputError("--instances must be positive");
  cfg.instances = static_cast<std::size_t>(a.instances);
  std::tie(cfg.dim_min, cfg.dim_max) = parse_range(a.dims);
  cfg.eps_grid = parse_grid(a.eps_grid);
  cfg.seed = a.seed;
  if (a.generator != "all") {
    cfg.generators.clear();
    std::stringstream ss(a.generator);
    std::string name;
    while (std::getline(ss, name, ',')) cfg.generators.push_back(generator_from_string(name));
  }
  cfg.mc_samples = a.samples;
  cfg.tol = a.tol;
  cfg.threads = a.threads;
  validate(cfg);

  const FuzzReport report = fuzz_check(cfg);
  const std::string text = to_json(report).dump(2) + "\n";

  std::string worst_path = a.worst_path;
  if (worst_path.empty() && !a.out_path.empty()) worst_path = a.out_path + ".worst.json";
  if (!worst_path.empty() && report.worst) save_qform(report.worst->qform, worst_path);

  std::ostream* summary = &out;
  if (a.out_path.empty()) {
    out << text;
    summary = &err;
  } else {
    std::ofstream f(a.out_path, std::ios::binary);
    if (!f) throw InputError("cannot write " + a.out_path);
    f << text;
  }
  *summary << "checks=" << report.checks << " violations=" << report.violations.size()
           << " disagreements=" << report.disagreements.size()
           << " errors=" << report.errors.size() << " max_ratio=" << num(report.max_ratio)
           << " worst_instance="
           << (worst_path.empty() ? std::string("(inline in report)") : worst_path) << '\n';
  return report.passed() ? kOk : kAssertionFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anti-concentration bounds and small-ball probabilities for non-negative "
               "degree-two Gaussian polynomials"};
  app.name("anticonc");
  app.require_subcommand(1);

  const std::vector<std::string> formats = {"csv", "json"};

  BoundArgs bound;
  auto* sub_bound = app.add_subcommand("bound", "closed-form bounds per eps");
  sub_bound->add_option("--eps", bound.eps.values, "eps values")->delimiter(',');
  sub_bound->add_option("--eps-grid", bound.eps.grid, "lo:hi:Nlog|Nlin");
  auto* opt_c = sub_bound->add_option("--cw-C", bound.cw_c, "constant of the degree-d template");
  auto* opt_d = sub_bound->add_option("--cw-d", bound.cw_d, "degree of the template");
  sub_bound->add_option("--format", bound.format)->check(CLI::IsMember(formats));

  MgfArgs mgf;
  auto* sub_mgf = app.add_subcommand("mgf", "exact Laplace transform and determinant bound");
  mgf.input.attach(sub_mgf);
  sub_mgf->add_option("--lambda", mgf.lambda.values, "rates")->delimiter(',');
  sub_mgf->add_option("--lambda-grid", mgf.lambda.grid, "lo:hi:Nlog|Nlin");
  sub_mgf->add_option("--format", mgf.format)->check(CLI::IsMember(formats));

  ProbArgs prob;
  auto* sub_prob = app.add_subcommand("prob", "small-ball probability P{f <= eps E f}");
  prob.input.attach(sub_prob);
  sub_prob->add_option("--eps", prob.eps.values, "eps values")->delimiter(',');
  sub_prob->add_option("--eps-grid", prob.eps.grid, "lo:hi:Nlog|Nlin");
  sub_prob->add_option("--method", prob.method)
      ->check(CLI::IsMember({"inversion", "montecarlo", "both"}));
  sub_prob->add_option("--seed", prob.seed);
  sub_prob->add_option("--tol", prob.tol);
  sub_prob->add_option("--samples", prob.samples);
  sub_prob->add_option("--format", prob.format)->check(CLI::IsMember(formats));

  VerifyArgs verify;
  auto* sub_verify = app.add_subcommand("verify", "run every invariant on one instance");
  verify.input.attach(sub_verify);
  sub_verify->add_option("--eps-grid", verify.eps_grid, "lo:hi:Nlog|Nlin");
  sub_verify->add_option("--seed", verify.seed);
  sub_verify->add_option("--samples", verify.samples, "Monte Carlo draws, 0 to skip");

  FuzzArgs fuzz;
  auto* sub_fuzz = app.add_subcommand("fuzz", "random-instance campaign against the bound");
  sub_fuzz->add_option("--instances", fuzz.instances);
  sub_fuzz->add_option("--dims", fuzz.dims, "lo:hi");
  sub_fuzz->add_option("--eps-grid", fuzz.eps_grid, "lo:hi:Nlog|Nlin");
  sub_fuzz->add_option("--seed", fuzz.seed);
  sub_fuzz->add_option("--generator", fuzz.generator, "all or comma list of gram,diagonal,rank1,corner");
  sub_fuzz->add_option("--samples", fuzz.samples, "Monte Carlo draws per instance, 0 to skip");
  sub_fuzz->add_option("--tol", fuzz.tol);
  sub_fuzz->add_option("--threads", fuzz.threads);
  sub_fuzz->add_option("--out", fuzz.out_path, "report path (default stdout)");
  sub_fuzz->add_option("--worst", fuzz.worst_path, "write the worst instance as QForm JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (sub_bound->parsed()) {
      bound.has_c = opt_c->count() > 0;
      bound.has_d = opt_d->count() > 0;
      return cmd_bound(bound, out);
    }
    if (sub_mgf->parsed()) return cmd_mgf(mgf, out);
    if (sub_prob->parsed()) return cmd_prob(prob, out);
    if (sub_verify->parsed()) return cmd_verify(verify, out);
    if (sub_fuzz->parsed()) return cmd_fuzz(fuzz, out, err);
  } catch (const NotPsdError& e) {
    err << "error: " << e.what() << '\n'
        << "certificate: min_eigenvalue=" << num(e.min_eigenvalue()) << '\n';
    return kNotPsd;
  } catch (const InconsistentInstance& e) {
    err << "error: " << e.what() << '\n';
    return kNotPsd;
  } catch (const DegenerateInstance& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailure;
  }
  return kUsage;
}

}  // namespace anticonc::cli
