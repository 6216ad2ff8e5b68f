#include "anticonc/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "anticonc/bounds.hpp"
#include "anticonc/error.hpp"
#include "anticonc/oracle.hpp"
#include "anticonc/qform_json.hpp"

namespace anticonc {

std::string to_string(Generator g) {
  switch (g) {
    case Generator::gram:
      return "gram";
    case Generator::diagonal:
      return "diagonal";
    case Generator::rank1_diagonal:
      return "rank1";
    case Generator::corner_heavy:
      return "corner";
  }
  return "unknown";
}

Generator generator_from_string(const std::string& name) {
  for (Generator g : all_generators())
    if (to_string(g) == name) return g;
  throw InputError("unknown generator '" + name + "'");
}

std::vector<Generator> all_generators() {
  return {Generator::gram, Generator::diagonal, Generator::rank1_diagonal,
          Generator::corner_heavy};
}

namespace {

SymMat random_gram(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> rows_dist(1, dim);
  const std::size_t rows = rows_dist(rng);
  std::vector<double> a(rows * dim);
  for (double& v : a) v = normal(rng);
  return SymMat::gram(rows, dim, a).scaled(1.0 / static_cast<double>(rows));
}

}  // namespace

QForm generate_instance(Generator g, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  // Overall magnitude spans six decades; the small-ball probability is
  // scale free, the numerics are not.
  const double magnitude = std::pow(10.0, -3.0 + 6.0 * unit(rng));
  SymMat full(n + 1);

  switch (g) {
    case Generator::gram:
      full = random_gram(n + 1, rng);
      break;
    case Generator::diagonal: {
      bool any = false;
      for (std::size_t i = 0; i <= n; ++i) {
        const double z = normal(rng);
        const double d = unit(rng) < 0.3 ? 0.0 : z * z;
        full.set(i, i, d);
        any = any || d > 0.0;
      }
      if (!any) full.set(n, n, 1.0);
      break;
    }
    case Generator::rank1_diagonal: {
      Vector v(n + 1);
      for (double& vi : v) vi = normal(rng);
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = i; j <= n; ++j) full.set(i, j, v[i] * v[j]);
        if (unit(rng) < 0.5) full.add(i, i, std::abs(normal(rng)));
      }
      break;
    }
    case Generator::corner_heavy: {
      full = random_gram(n + 1, rng);
      double trace22 = 0.0;
      for (std::size_t i = 1; i <= n; ++i) trace22 += full(i, i);
      const double factor = std::pow(10.0, 2.0 * unit(rng));
      full.add(0, 0, factor * trace22 + 1e-3);
      break;
    }
  }
  return QForm::from_assembled(full).scaled(magnitude);
}

void validate(const FuzzConfig& cfg) {
  if (cfg.instances == 0) throw InputError("fuzz: instances must be positive");
  if (cfg.dim_min < 1 || cfg.dim_min > cfg.dim_max || cfg.dim_max > 64)
    throw InputError("fuzz: dimensions must satisfy 1 <= min <= max <= 64");
  if (cfg.eps_grid.empty()) throw InputError("fuzz: empty eps grid");
  for (double e : cfg.eps_grid)
    if (!(e > 0.0) || !std::isfinite(e))
      throw InputError("fuzz: eps values must be positive");
  if (cfg.generators.empty()) throw InputError("fuzz: no generators");
  if (cfg.mc_samples != 0 && cfg.mc_samples < 1000)
    throw InputError("fuzz: mc samples must be 0 or at least 1000");
  if (!(cfg.tol >= 1e-10 && cfg.tol <= 1e-4))
    throw InputError("fuzz: tol must lie in [1e-10, 1e-4]");
}

namespace {

struct InstanceResult {
  std::size_t checks = 0;
  std::vector<FuzzFinding> violations;
  std::vector<FuzzFinding> disagreements;
  std::vector<FuzzFinding> errors;
  double max_ratio = -1.0;
  FuzzFinding worst;
};

InstanceResult run_instance(const FuzzConfig& cfg, std::size_t index) {
  InstanceResult out;
  std::mt19937_64 rng = make_rng(cfg.seed, index);
  std::uniform_int_distribution<std::size_t> dim_dist(cfg.dim_min, cfg.dim_max);
  const std::size_t n = dim_dist(rng);
  const Generator gen = cfg.generators[index % cfg.generators.size()];
  const QForm q = generate_instance(gen, n, rng);

  FuzzFinding base;
  base.instance = index;
  base.generator = gen;
  base.qform = q;

  try {
    const double mean = expectation(q);
    const SpectralForm s = reduce(q);
    std::vector<double> thresholds;
    for (double e : cfg.eps_grid) thresholds.push_back(e * mean);

    std::vector<ProbEstimate> mc;
    if (cfg.mc_samples > 0)
      mc = monte_carlo_multi(q, thresholds, cfg.mc_samples, cfg.seed, index);

    for (std::size_t j = 0; j < cfg.eps_grid.size(); ++j) {
      const double eps = cfg.eps_grid[j];
      ProbEstimate p;
      if (s.terms.empty()) {
        const double v = s.c <= thresholds[j] ? 1.0 : 0.0;
        p = {v, v, v, Method::inversion};
      } else {
        p = cdf_inversion(s, thresholds[j], cfg.tol);
      }
      const double bound = theorem2_bound(Epsilon(eps));
      ++out.checks;

      FuzzFinding f = base;
      f.eps = eps;
      f.p = p.p;
      f.p_low = p.ci_low;
      f.p_high = p.ci_high;
      f.reference = f.reference_low = f.reference_high = bound;

      const double ratio = p.p / bound;
      if (ratio > out.max_ratio) {
        out.max_ratio = ratio;
        out.worst = f;
      }
      if (p.ci_low > bound) {
        f.detail = "probability exceeds (2 e eps)^(1/2)";
        out.violations.push_back(f);
      }
      if (!mc.empty()) {
        const ProbEstimate& m = mc[j];
        const double width = m.ci_high - m.ci_low;
        const double inv_err = 0.5 * (p.ci_high - p.ci_low);
        if (std::abs(p.p - m.p) > width + inv_err) {
          FuzzFinding d = f;
          d.reference = m.p;
          d.reference_low = m.ci_low;
          d.reference_high = m.ci_high;
          d.detail = "inversion outside Monte Carlo interval";
          out.disagreements.push_back(d);
        }
      }
    }
  } catch (const Error& e) {
    FuzzFinding f = base;
    f.detail = e.what();
    out.errors.push_back(f);
  }
  return out;
}

}  // namespace

FuzzReport fuzz_check(const FuzzConfig& cfg) {
  validate(cfg);
  std::vector<InstanceResult> results(cfg.instances);

  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u,
                                 static_cast<unsigned>(std::min<std::size_t>(cfg.instances, 256)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.instances; i = next++)
      results[i] = run_instance(cfg, i);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  FuzzReport report;
  report.config = cfg;
  report.max_ratio = 0.0;
  for (InstanceResult& r : results) {
    report.checks += r.checks;
    for (auto& f : r.violations) report.violations.push_back(std::move(f));
    for (auto& f : r.disagreements) report.disagreements.push_back(std::move(f));
    for (auto& f : r.errors) report.errors.push_back(std::move(f));
    if (r.checks > 0 && (!report.worst || r.max_ratio > report.max_ratio)) {
      report.max_ratio = r.max_ratio;
      report.worst = std::move(r.worst);
    }
  }
  return report;
}

nlohmann::json to_json(const FuzzConfig& cfg) {
  nlohmann::json gens = nlohmann::json::array();
  for (Generator g : cfg.generators) gens.push_back(to_string(g));
  return {{"instances", cfg.instances}, {"dim_min", cfg.dim_min},
          {"dim_max", cfg.dim_max},     {"eps_grid", cfg.eps_grid},
          {"seed", cfg.seed},           {"generators", gens},
          {"mc_samples", cfg.mc_samples}, {"tol", cfg.tol}};
}

FuzzConfig fuzz_config_from_json(const nlohmann::json& j) {
  FuzzConfig cfg;
  try {
    cfg.instances = j.value("instances", cfg.instances);
    cfg.dim_min = j.value("dim_min", cfg.dim_min);
    cfg.dim_max = j.value("dim_max", cfg.dim_max);
    cfg.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("generators")) {
      cfg.generators.clear();
      for (const auto& g : j.at("generators"))
        cfg.generators.push_back(generator_from_string(g.get<std::string>()));
    }
    cfg.mc_samples = j.value("mc_samples", cfg.mc_samples);
    cfg.tol = j.value("tol", cfg.tol);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("fuzz config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

namespace {

nlohmann::json finding_json(const FuzzFinding& f) {
  nlohmann::json j = {{"instance", f.instance},
                      {"generator", to_string(f.generator)},
                      {"eps", f.eps},
                      {"p", f.p},
                      {"p_low", f.p_low},
                      {"p_high", f.p_high},
                      {"qform", qform_to_json(f.qform)}};
  if (!f.detail.empty()) j["detail"] = f.detail;
  return j;
}

}  // namespace

nlohmann::json to_json(const FuzzReport& report) {
  nlohmann::json j;
  j["config"] = to_json(report.config);
  j["checks"] = report.checks;
  j["passed"] = report.passed();
  j["max_ratio"] = report.max_ratio;

  nlohmann::json violations = nlohmann::json::array();
  for (const auto& f : report.violations) {
    nlohmann::json v = finding_json(f);
    v["bound"] = f.reference;
    v["seed"] = report.config.seed;
    violations.push_back(std::move(v));
  }
  j["violations"] = std::move(violations);

  nlohmann::json disagreements = nlohmann::json::array();
  for (const auto& f : report.disagreements) {
    nlohmann::json d = finding_json(f);
    d["mc_p"] = f.reference;
    d["mc_low"] = f.reference_low;
    d["mc_high"] = f.reference_high;
    d["seed"] = report.config.seed;
    disagreements.push_back(std::move(d));
  }
  j["disagreements"] = std::move(disagreements);

  nlohmann::json errors = nlohmann::json::array();
  for (const auto& f : report.errors) errors.push_back(finding_json(f));
  j["errors"] = std::move(errors);

  if (report.worst) {
    nlohmann::json w = finding_json(*report.worst);
    w["bound"] = report.worst->reference;
    w["ratio"] = report.max_ratio;
    j["worst"] = std::move(w);
  } else {
    j["worst"] = nullptr;
  }
  return j;
}

}  // namespace anticonc
