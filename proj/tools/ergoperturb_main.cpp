#include <CLI11.hpp>
#include <json.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "ergoperturb/harness.hpp"
#include "ergoperturb/version.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

int fail_validation(const std::vector<std::string>& violations) {
  for (const auto& v : violations) std::cerr << "error: " << v << "\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergoperturb: drift certificates, ergodicity rates and "
               "perturbation bounds for AR(1) chains on a quadrature grid"};
  app.set_version_flag("--version", std::string("ergoperturb ") + ergo::kVersion);

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  bool validate_only = false;

  app.add_option("experiment", experiment, "experiment to run")
      ->required()
      ->check(CLI::IsMember(ergo::kExperimentNames));
  app.add_option("--config", config_path, "JSON config file (flat object)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: 'out' key in config)")
      ->envname("ERGOPERTURB_OUT");
  app.add_flag("--validate-only", validate_only, "validate the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  nlohmann::json j;
  {
    std::ifstream f(config_path);
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      return fail_validation({std::string("config is not valid JSON: ") + e.what()});
    }
  }

  std::vector<std::string> violations;
  ergo::ExperimentConfig cfg = ergo::ExperimentConfig::from_json(j, &violations);
  if (!cfg.experiment.empty() && cfg.experiment != experiment)
    violations.push_back("config experiment '" + cfg.experiment +
                         "' disagrees with the command line");
  cfg.experiment = experiment;
  for (const auto& v : cfg.validate()) violations.push_back(v);
  if (!violations.empty()) return fail_validation(violations);
  if (validate_only) {
    std::cout << "config ok\n";
    return 0;
  }

  if (out_dir.empty()) out_dir = cfg.out;
  try {
    const int rc = ergo::run_experiment(cfg, out_dir);
    std::cout << experiment << ": results written to " << out_dir << "\n";
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
