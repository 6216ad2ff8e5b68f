#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anticonc/polyform.hpp"
#include "json.hpp"

namespace anticonc {

enum class Generator {
  gram,            ///< A^T A with a random number of rows (random rank)
  diagonal,        ///< diagonal with some zero entries, q12 = 0
  rank1_diagonal,  ///< v v^T + non-negative diagonal
  corner_heavy,    ///< Gram matrix with q11 pushed well above Tr(Q22)
};

std::string to_string(Generator g);
Generator generator_from_string(const std::string& name);
std::vector<Generator> all_generators();

/// Draws one PSD instance of dimension n.
QForm generate_instance(Generator g, std::size_t n, std::mt19937_64& rng);

struct FuzzConfig {
  std::size_t instances = 1000;
  std::size_t dim_min = 1;
  std::size_t dim_max = 8;
  std::vector<double> eps_grid;
  std::uint64_t seed = 0;
  /// Instance i uses generators[i % generators.size()].
  std::vector<Generator> generators = all_generators();
  /// Monte Carlo draws per instance for the cross-check; 0 disables it.
  std::uint64_t mc_samples = 100'000;
  double tol = 1e-10;
  /// Worker threads; 0 picks the hardware concurrency. Does not affect the
  /// report.
  unsigned threads = 0;
};

/// Throws InputError on an unusable configuration.
void validate(const FuzzConfig& cfg);

struct FuzzFinding {
  std::size_t instance = 0;
  Generator generator = Generator::gram;
  double eps = 0.0;
  double p = 0.0;
  double p_low = 0.0;
  double p_high = 0.0;
  /// Theorem bound for violations, Monte Carlo estimate for disagreements.
  double reference = 0.0;
  double reference_low = 0.0;
  double reference_high = 0.0;
  std::string detail;
  QForm qform;
};

struct FuzzReport {
  FuzzConfig config;
  std::size_t checks = 0;
  std::vector<FuzzFinding> violations;
  /// Inversion outside the Monte Carlo interval widened by its own width.
  std::vector<FuzzFinding> disagreements;
  /// Instances the oracle could not process.
  std::vector<FuzzFinding> errors;
  double max_ratio = 0.0;
  std::optional<FuzzFinding> worst;

  bool passed() const {
    return violations.empty() && disagreements.empty() && errors.empty();
  }
};

/// Runs the campaign. Output depends only on the configuration, not on the
/// thread count or schedule.
FuzzReport fuzz_check(const FuzzConfig& cfg);

nlohmann::json to_json(const FuzzConfig& cfg);
FuzzConfig fuzz_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FuzzReport& report);

}  // namespace anticonc
