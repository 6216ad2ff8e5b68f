#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "anticonc/bounds.hpp"
#include "anticonc/error.hpp"
#include "anticonc/qform_json.hpp"
#include "cli/commands.hpp"
#include "cli/grid.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace anticonc;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "anticonc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("anticonc_cli_" + name);
}

std::string write_json(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("grid syntax") {
  const auto log = cli::parse_grid("1e-3:1e3:7log");
  REQUIRE(log.size() == 7);
  CHECK(log.front() == 1e-3);
  CHECK(log.back() == 1e3);
  CHECK(log[3] == doctest::Approx(1.0));
  const auto lin = cli::parse_grid("0:1:5lin");
  CHECK(lin == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(cli::parse_grid("2:2:1lin") == std::vector<double>{2});
  CHECK_THROWS_AS(cli::parse_grid("0:1:5log"), InputError);
  CHECK_THROWS_AS(cli::parse_grid("1:2:5"), InputError);
  CHECK_THROWS_AS(cli::parse_grid("1:2:0lin"), InputError);
  CHECK_THROWS_AS(cli::parse_grid("a:2:3lin"), InputError);
  CHECK_THROWS_AS(cli::parse_grid("1:2"), InputError);
  CHECK(cli::parse_range("1:8") == std::pair<std::size_t, std::size_t>{1, 8});
  CHECK(cli::parse_range("3") == std::pair<std::size_t, std::size_t>{3, 3});
  CHECK_THROWS_AS(cli::parse_range("x"), InputError);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"nosuch"}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
  CHECK(run_cli({"bound"}).code == cli::kUsage);
  CHECK(run_cli({"bound", "--eps", "abc"}).code == cli::kUsage);
  CHECK(run_cli({"bound", "--eps", "0.1", "--format", "xml"}).code == cli::kUsage);
  CHECK(run_cli({"mgf", "--lambda", "1"}).code == cli::kUsage);
  CHECK(run_cli({"mgf", "--poly", "x1^2", "--qform", "q.json", "--lambda", "1"}).code ==
        cli::kUsage);
  CHECK(run_cli({"prob", "--poly", "x1^2", "--eps", "0.1", "--method", "exact"}).code ==
        cli::kUsage);
}

TEST_CASE("bound") {
  const Result r = run_cli({"bound", "--eps", "0.01"});
  REQUIRE(r.code == cli::kOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "eps,lemma2_sharp,lemma2,theorem2,zeta,half_eps");
  CHECK(std::stod(fields(ls[1])[3]) == doctest::Approx(0.2332).epsilon(1e-3));

  const Result cw = run_cli({"bound", "--eps", "0.5", "--cw-C", "1", "--cw-d", "2"});
  REQUIRE(cw.code == cli::kOk);
  CHECK(fields(lines(cw.out)[1]).back() == "1");

  CHECK(run_cli({"bound", "--eps", "-1"}).code == cli::kUsage);
  CHECK(run_cli({"bound", "--eps", "0"}).code == cli::kUsage);
  CHECK(run_cli({"bound", "--eps", "0.1", "--cw-C", "1"}).code == cli::kUsage);

  const Result grid = run_cli({"bound", "--eps-grid", "1e-4:0.3:20log", "--format", "json"});
  REQUIRE(grid.code == cli::kOk);
  const auto j = nlohmann::json::parse(grid.out);
  CHECK(j.size() == 20);
  CHECK(j[0]["eps"].get<double>() == 1e-4);

  const Result big = run_cli({"bound", "--eps", "2", "--format", "json"});
  CHECK(nlohmann::json::parse(big.out)[0]["zeta"].is_null());
}

TEST_CASE("mgf") {
  const Result r = run_cli({"mgf", "--poly", "x1^2", "--lambda", "0.5"});
  REQUIRE(r.code == cli::kOk);
  const auto row = fields(lines(r.out)[1]);
  CHECK(std::stod(row[1]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-11));

  const Result deg = run_cli({"mgf", "--poly", "x1^3", "--lambda", "1"});
  CHECK(deg.code == cli::kUsage);
  CHECK(deg.err.find("degree") != std::string::npos);

  const std::string path = write_json(
      "q.json", R"({"n": 2, "q11": 2, "q12": [0.5, -1], "q22": [[2, 0.3], [0.3, 1]]})");
  const Result grid = run_cli({"mgf", "--qform", path, "--lambda-grid", "1e-3:1e3:7log"});
  REQUIRE(grid.code == cli::kOk);
  const auto ls = lines(grid.out);
  REQUIRE(ls.size() == 8);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    CHECK(std::stod(f[1]) <= std::stod(f[2]));
  }

  const std::string bad =
      write_json("nonpsd.json", R"({"n": 1, "q11": 0, "q12": [0.5], "q22": [[0]]})");
  const Result np = run_cli({"mgf", "--qform", bad, "--lambda", "1"});
  CHECK(np.code == cli::kNotPsd);
  CHECK(np.err.find("certificate: min_eigenvalue=-0.5") != std::string::npos);
  CHECK(run_cli({"mgf", "--poly", "x1^2", "--lambda", "-1"}).code == cli::kUsage);
}

TEST_CASE("prob") {
  const Result r = run_cli({"prob", "--poly", "x1^2", "--eps", "0.04"});
  REQUIRE(r.code == cli::kOk);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "eps,p_oracle,ci_low,ci_high,lemma2,theorem2,ratio");
  const auto row = fields(ls[1]);
  CHECK(std::stod(row[1]) == doctest::Approx(anticonc::erf(std::sqrt(0.02))).epsilon(1e-11));
  CHECK(std::stod(row[5]) == doctest::Approx(0.466).epsilon(1e-3));
  CHECK(std::stod(row[6]) < 1.0);

  const Result atom = run_cli({"prob", "--poly", "1", "--eps", "0.5"});
  REQUIRE(atom.code == cli::kOk);
  CHECK(fields(lines(atom.out)[1])[1] == "0");

  const std::string zero =
      write_json("zero.json", R"({"n": 2, "q11": 0, "q12": [0, 0], "q22": [[0, 0], [0, 0]]})");
  const Result degenerate = run_cli({"prob", "--qform", zero, "--eps", "0.1"});
  CHECK(degenerate.code == cli::kDegenerate);
  CHECK(degenerate.err.find("degenerate instance") != std::string::npos);

  const Result both = run_cli({"prob", "--poly", "x1^2 + x2^2 + x1 + 1", "--eps", "0.01,0.1",
                               "--method", "both", "--samples", "200000", "--seed", "3"});
  REQUIRE(both.code == cli::kOk);
  const auto bl = lines(both.out);
  REQUIRE(bl.size() == 7);
  CHECK(bl[3].empty());
  CHECK(bl[4] == "eps,p_inversion,p_montecarlo,mc_ci_low,mc_ci_high,abs_diff,within_ci");
  CHECK(fields(bl[5]).back() == "1");

  const Result mc = run_cli({"prob", "--poly", "x1^2", "--eps", "0.04", "--method",
                             "montecarlo", "--samples", "100000", "--format", "json"});
  REQUIRE(mc.code == cli::kOk);
  const auto j = nlohmann::json::parse(mc.out);
  const double p = j["rows"][0]["p_oracle"].get<double>();
  CHECK(j["rows"][0]["ci_low"].get<double>() < p);
  CHECK(std::abs(p - anticonc::erf(std::sqrt(0.02))) < 0.01);

  CHECK(run_cli({"prob", "--poly", "x1^2", "--eps", "0.1", "--tol", "1e-12"}).code == cli::kUsage);
}

TEST_CASE("verify") {
  const Result r = run_cli({"verify", "--poly", "x1^2 + 2*x1*x2 + x2^2 + 1"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("FAIL") == std::string::npos);

  const std::string bad =
      write_json("nonpsd2.json", R"({"n": 1, "q11": 0, "q12": [0.5], "q22": [[0]]})");
  CHECK(run_cli({"verify", "--qform", bad}).code == cli::kNotPsd);

  const Result many = run_cli({"verify", "--poly", "x1^2", "--eps-grid", "1e-4:0.3:50log"});
  CHECK(many.code == cli::kOk);
  CHECK(many.out.find("PASS theorem2_dominance  50/50") != std::string::npos);
}

TEST_CASE("fuzz") {
  CHECK(run_cli({"fuzz", "--instances", "0"}).code == cli::kUsage);
  CHECK(run_cli({"fuzz", "--instances", "5", "--dims", "0:3"}).code == cli::kUsage);
  CHECK(run_cli({"fuzz", "--instances", "5", "--generator", "gram,bogus"}).code == cli::kUsage);

  const std::string out = temp_path("fuzz.json").string();
  const Result r = run_cli({"fuzz", "--instances", "20", "--dims", "1:4", "--seed", "7",
                            "--samples", "10000", "--out", out});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("max_ratio=") != std::string::npos);
  CHECK(r.out.find("worst_instance=" + out + ".worst.json") != std::string::npos);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["passed"].get<bool>());
  CHECK(j["max_ratio"].get<double>() < 1.0);
  CHECK(std::filesystem::exists(out + ".worst.json"));
  const QForm worst = load_qform(out + ".worst.json");
  CHECK(worst.n >= 1);

  const Result to_stdout = run_cli({"fuzz", "--instances", "4", "--samples", "0",
                                    "--generator", "corner"});
  REQUIRE(to_stdout.code == cli::kOk);
  CHECK(nlohmann::json::parse(to_stdout.out)["checks"].get<int>() == 80);
  CHECK(to_stdout.err.find("max_ratio=") != std::string::npos);
}

TEST_CASE("outputs are deterministic") {
  const std::vector<std::vector<std::string>> commands = {
      {"prob", "--poly", "x1^2 + 0.3*x1*x2 + x2^2", "--eps-grid", "1e-3:0.3:5log", "--method",
       "both", "--samples", "50000", "--seed", "9"},
      {"verify", "--poly", "x1^2 + x2^2 + 1", "--samples", "20000", "--seed", "4"},
      {"fuzz", "--instances", "10", "--seed", "5", "--samples", "5000", "--threads", "3"},
  };
  for (const auto& cmd : commands) {
    const Result a = run_cli(cmd);
    const Result b = run_cli(cmd);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}
