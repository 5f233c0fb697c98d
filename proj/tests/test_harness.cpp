#include "doctest.h"

#include "ergoperturb/csv.hpp"
#include "ergoperturb/harness.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace ergo;
namespace fs = std::filesystem;

namespace {

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

ExperimentConfig config_from(const std::string& text,
                             std::vector<std::string>* errors = nullptr) {
  return ExperimentConfig::from_json(parse(text), errors);
}

bool any_contains(const std::vector<std::string>& messages, const std::string& what) {
  for (const auto& m : messages)
    if (m.find(what) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ergoperturb_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("config parsing reports malformed input") {
  std::vector<std::string> errors;
  config_from(R"({"experiment": "rate-table", "alpha_max": 0.7})", &errors);
  CHECK(any_contains(errors, "unknown config key"));
  CHECK(any_contains(errors, "alpha_max"));

  errors.clear();
  config_from(R"({"experiment": "rate-table", "n": "big"})", &errors);
  CHECK(any_contains(errors, "wrong type"));

  errors.clear();
  config_from(R"({"experiment": "rate-table", "alphas": {"lo": 0.1}})", &errors);
  CHECK(any_contains(errors, "flat"));
}

TEST_CASE("config validation is per violation") {
  ExperimentConfig c = config_from(
      R"({"experiment": "rate-table", "n": 4, "x_max": -1.0, "noise_family": "cauchy"})");
  const std::vector<std::string> violations = c.validate();
  CHECK(violations.size() >= 3);
  CHECK(any_contains(violations, "n"));
  CHECK(any_contains(violations, "x_max"));
  CHECK(any_contains(violations, "noise_family"));

  // rate-table needs a nonempty alpha list
  ExperimentConfig empty = config_from(R"({"experiment": "rate-table", "x_max": 60})");
  CHECK(any_contains(empty.validate(), "alphas"));

  // the moment order must stay below the t dof
  ExperimentConfig heavy = config_from(
      R"({"experiment": "mc-oracle", "x_max": 60, "r": 3.5, "noise_dof": 3})");
  CHECK(!heavy.validate().empty());

  // a well-formed config has nothing to report
  ExperimentConfig ok = config_from(
      R"({"experiment": "rate-table", "x_max": 60, "alphas": [0.3, 0.5]})");
  CHECK(ok.validate().empty());
}

TEST_CASE("derived defaults") {
  ExperimentConfig c = config_from(R"({"experiment": "drift-certify", "x_max": 60,
                                       "alphas": [0.4], "r": 1.0})");
  // auto cap: 10 (1 + E|theta|) with E|T_3| = 2 sqrt(3) / pi
  CHECK(c.effective_l_cap() == doctest::Approx(21.026577908435842).epsilon(1e-12));
  c.l_cap = 5.0;
  CHECK(c.effective_l_cap() == 5.0);

  c.eps_start = 0.2;
  c.eps_rungs = 3;
  const std::vector<double> lad = c.ladder();
  REQUIRE(lad.size() == 3);
  CHECK(lad[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(lad[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(lad[2] == doctest::Approx(0.05).epsilon(1e-15));

  const ARKernelSpec spec = c.make_kernel_spec(0.4);
  CHECK(spec.alpha == 0.4);
  CHECK(spec.grid.x_max == 60.0);
  CHECK(spec.tau_trunc == c.tau_trunc);
}

TEST_CASE("experiments write deterministic artifacts") {
  const std::string cfg_text =
      R"({"experiment": "counterexample", "alpha0": 0.5, "eps_start": 0.2,
          "eps_rungs": 4})";
  const ExperimentConfig cfg = config_from(cfg_text);
  REQUIRE(cfg.validate().empty());

  TempDir a, b;
  CHECK(run_experiment(cfg, a.path.string()) == 0);
  CHECK(run_experiment(cfg, b.path.string()) == 0);

  const fs::path csv = a.path / "counterexample.csv";
  const fs::path summary = a.path / "counterexample_summary.json";
  REQUIRE(fs::exists(csv));
  REQUIRE(fs::exists(summary));

  // identical configuration, byte-identical outputs
  CHECK(slurp(csv) == slurp(b.path / "counterexample.csv"));
  CHECK(slurp(summary) == slurp(b.path / "counterexample_summary.json"));

  const nlohmann::json s = parse(slurp(summary));
  CHECK(s.at("experiment") == "counterexample");
  CHECK(s.contains("version"));
  CHECK(s.at("config").at("alpha0") == 0.5);
  CHECK(s.at("limit_value").get<double>() ==
        doctest::Approx(0.17866076532365105).epsilon(1e-10));
}

TEST_CASE("simulation oracle is seed-deterministic") {
  ExperimentConfig c = config_from(
      R"({"experiment": "mc-oracle", "n": 200, "x_max": 14, "noise_family": "gaussian",
          "alpha0": 0.5, "samples": 200000, "mc_burn_in": 500, "seed": 99})");
  REQUIRE(c.validate().empty());
  const ARKernelSpec spec = c.make_kernel_spec(c.alpha0);

  const McOracleResult one = mc_oracle(spec, c.samples, c.mc_burn_in, c.seed);
  const McOracleResult two = mc_oracle(spec, c.samples, c.mc_burn_in, c.seed);
  CHECK(one.tv == two.tv);
  CHECK((one.histogram.values - two.histogram.values).lpNorm<Eigen::Infinity>() == 0.0);

  const McOracleResult other = mc_oracle(spec, c.samples, c.mc_burn_in, 100);
  CHECK(other.tv != one.tv);

  // the empirical histogram is a probability density on the grid cells
  CHECK(total_mass(one.histogram) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.tv < 0.03);
  CHECK(one.half_width > 0.0);

  // error shrinks roughly as 1/sqrt(samples): 16x more gives ~4x less
  const double coarse = mc_oracle(spec, 40000, 500, 7).tv;
  const double fine = mc_oracle(spec, 640000, 500, 7).tv;
  CHECK(coarse / fine >= 2.0);
  CHECK(coarse / fine <= 8.0);

  CHECK_THROWS_AS(mc_oracle(spec, 4000, 500, 7), std::invalid_argument);
}

TEST_CASE("csv files round trip") {
  TempDir dir;
  const Grid g = Grid::uniform(31, 5.0);

  SignedDensity p{g, Eigen::VectorXd::LinSpaced(31, -1.0, 2.5)};
  const fs::path dpath = dir.path / "density.csv";
  write_density_csv(dpath.string(), p, {"round trip check"});
  const SignedDensity back = read_density_csv(dpath.string());
  CHECK(same_grid(back.grid, g));
  CHECK((back.values - p.values).lpNorm<Eigen::Infinity>() == 0.0);

  ARKernelSpec spec{0.5, NoiseModel::gaussian(1.0, 1.0), Grid::uniform(41, 10.0)};
  const DiscretizedKernel k = build_kernel(spec);
  const fs::path kpath = dir.path / "kernel.csv";
  write_kernel_csv(kpath.string(), k, 1.0);
  double r = 0.0;
  const DiscretizedKernel kback = read_kernel_csv(kpath.string(), &r);
  CHECK(r == 1.0);
  CHECK(same_grid(kback.grid(), k.grid()));
  CHECK((kback.action() - k.action()).cwiseAbs().maxCoeff() == 0.0);
}

// End-to-end command line checks; the binary path arrives via ERGO_CLI.
namespace {

int run_cli(const std::string& tail) {
  const char* cli = std::getenv("ERGO_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + tail + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path write_config(const TempDir& dir, const std::string& name,
                      const std::string& text) {
  const fs::path p = dir.path / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("command line exit codes and output routing") {
  if (std::getenv("ERGO_CLI") == nullptr) {
    MESSAGE("ERGO_CLI not set; skipping command line checks");
    return;
  }
  TempDir dir;
  const fs::path ok = write_config(
      dir, "ok.json",
      R"({"experiment": "counterexample", "alpha0": 0.5, "eps_rungs": 3})");
  const fs::path unknown = write_config(
      dir, "unknown.json", R"({"experiment": "counterexample", "bogus": 1})");
  const fs::path numerical = write_config(
      dir, "numerical.json",
      R"({"experiment": "drift-certify", "n": 200, "x_max": 6.0, "alphas": [0.5]})");

  // validation-only never writes artifacts
  CHECK(run_cli("counterexample --config " + ok.string() + " --validate-only") == 0);
  CHECK(!fs::exists(dir.path / "counterexample.csv"));

  // success writes into --out
  const fs::path out1 = dir.path / "out1";
  CHECK(run_cli("counterexample --config " + ok.string() + " --out " + out1.string()) ==
        0);
  CHECK(fs::exists(out1 / "counterexample_summary.json"));

  // malformed configs and disagreeing experiment names are validation errors
  CHECK(run_cli("counterexample --config " + unknown.string()) == 1);
  CHECK(run_cli("rate-table --config " + ok.string()) == 1);
  CHECK(run_cli("counterexample --config " + (dir.path / "missing.json").string()) == 1);

  // an unbuildable kernel is a numerical failure
  CHECK(run_cli("drift-certify --config " + numerical.string()) == 2);

  // environment override routes output; an explicit flag wins over it
  const fs::path out2 = dir.path / "out2";
  const fs::path out3 = dir.path / "out3";
  const char* cli = std::getenv("ERGO_CLI");
  std::string env_cmd = "ERGOPERTURB_OUT=" + out2.string() + " " + cli +
                        " counterexample --config " + ok.string() +
                        " > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(fs::exists(out2 / "counterexample_summary.json"));

  env_cmd = "ERGOPERTURB_OUT=" + out2.string() + " " + cli +
            " counterexample --config " + ok.string() + " --out " + out3.string() +
            " > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(fs::exists(out3 / "counterexample_summary.json"));
}
