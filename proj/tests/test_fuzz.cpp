#include <cmath>
#include <numbers>

#include "anticonc/bounds.hpp"
#include "anticonc/error.hpp"
#include "anticonc/fuzz.hpp"
#include "anticonc/oracle.hpp"
#include "doctest.h"

using namespace anticonc;

namespace {

FuzzConfig small_config() {
  FuzzConfig cfg;
  cfg.instances = 40;
  cfg.eps_grid = {1e-4, 1e-3, 1e-2, 0.1, 0.3};
  cfg.mc_samples = 20000;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("generator names") {
  for (Generator g : all_generators()) CHECK(generator_from_string(to_string(g)) == g);
  CHECK(to_string(Generator::corner_heavy) == "corner");
  CHECK_THROWS_AS(generator_from_string("wishart"), InputError);
}

TEST_CASE("generated instances are PSD with positive mean") {
  std::mt19937_64 rng = make_rng(3, 0);
  for (Generator g : all_generators()) {
    for (std::size_t n = 1; n <= 8; ++n) {
      for (int rep = 0; rep < 10; ++rep) {
        const QForm q = generate_instance(g, n, rng);
        CHECK(q.n == n);
        CHECK(validate_nonneg(q).passed);
        CHECK(expectation(q) > 0.0);
        if (g == Generator::corner_heavy) CHECK(q.q11 > q.q22.trace());
        if (g == Generator::diagonal) CHECK(q.q12 == Vector(n, 0.0));
      }
    }
  }
}

TEST_CASE("config validation") {
  FuzzConfig cfg = small_config();
  CHECK_NOTHROW(validate(cfg));
  cfg.eps_grid.clear();
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = small_config();
  cfg.instances = 0;
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = small_config();
  cfg.dim_min = 3;
  cfg.dim_max = 2;
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = small_config();
  cfg.eps_grid = {0.1, -0.1};
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = small_config();
  cfg.mc_samples = 10;
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg = small_config();
  cfg.generators.clear();
  CHECK_THROWS_AS(fuzz_check(cfg), InputError);
}

TEST_CASE("fuzz campaign passes and records the worst instance") {
  const FuzzReport r = fuzz_check(small_config());
  CHECK(r.passed());
  CHECK(r.checks == 200);
  CHECK(r.violations.empty());
  CHECK(r.disagreements.empty());
  CHECK(r.errors.empty());
  REQUIRE(r.worst.has_value());
  CHECK(r.max_ratio < 1.0);
  CHECK(r.max_ratio == doctest::Approx(r.worst->p / r.worst->reference));
}

TEST_CASE("x^2 sets the small-eps ratio floor") {
  // P{x^2 <= eps} / (2 e eps)^(1/2) -> (e pi)^(-1/2) as eps -> 0
  const QForm square(0.0, Vector{0.0}, SymMat::identity(1));
  const double eps = 1e-6;
  const double ratio = small_ball_prob(square, Epsilon(eps)).p / theorem2_bound(Epsilon(eps));
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(std::exp(1.0) * std::numbers::pi)).epsilon(1e-3));
  FuzzConfig cfg = small_config();
  cfg.dim_max = 1;
  cfg.generators = {Generator::diagonal};
  CHECK(fuzz_check(cfg).max_ratio >= 0.9 / std::sqrt(std::exp(1.0) * std::numbers::pi));
}

TEST_CASE("report does not depend on the thread count") {
  FuzzConfig a = small_config();
  a.threads = 1;
  FuzzConfig b = a;
  b.threads = 4;
  CHECK(to_json(fuzz_check(a)).dump() == to_json(fuzz_check(b)).dump());
}

TEST_CASE("report JSON") {
  const nlohmann::json j = to_json(fuzz_check(small_config()));
  for (const char* key : {"config", "checks", "passed", "max_ratio", "violations",
                          "disagreements", "errors", "worst"})
    CHECK(j.contains(key));
  CHECK(j["passed"].get<bool>());
  CHECK(j["worst"].contains("qform"));
  const FuzzConfig back = fuzz_config_from_json(j["config"]);
  CHECK(back.instances == 40);
  CHECK(back.eps_grid == small_config().eps_grid);
  CHECK(back.seed == 17);
}
