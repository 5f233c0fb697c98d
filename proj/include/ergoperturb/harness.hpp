#pragma once

#include "ergoperturb/ar_model.hpp"
#include "ergoperturb/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ergo {

/// Flat JSON experiment description.  Every key is optional unless the
/// selected experiment requires it; validate() reports one message per
/// violation.
struct ExperimentConfig {
  std::string experiment;

  int n = 600;
  double x_max = 0.0;
  double r = 1.0;
  double beta = 1.0;

  std::string noise_family = "student_t";
  double noise_dof = 3.0;
  double noise_sigma = 1.0;

  double alpha0 = 0.5;
  std::vector<double> alphas;  // explicit list (drift-certify, rate-table)
  double eps_start = 0.2;      // ladder eps_k = eps_start * 2^(-k)
  int eps_rungs = 8;

  double tau_trunc = 1e-8;
  double markov_tol = 1e-6;
  double max_row_defect = 1e-3;

  double l_cap = 0.0;  // 0 = auto: 10 (1 + E|theta|^r)
  int drift_N = 1;

  int rate_burn_in = 5;
  int rate_n_max = 24;

  int contour_points = 64;

  int order = 1;
  double beta_r = 0.0;  // 0 = auto: midpoint of (0, 1 - floor(r)/r)
  double eps = 0.01;
  std::vector<double> eps_ladder;
  std::vector<double> fd_h;

  long samples = 1000000;
  long mc_burn_in = 1000;
  std::uint64_t seed = 12345;

  double rho = 0.0;    // 0 = auto: (1 + kappa_hat) / 2
  double delta = 0.0;  // 0 = auto: family drift fit

  std::string out = "results";

  static ExperimentConfig from_json(const nlohmann::json& j,
                                    std::vector<std::string>* errors = nullptr);
  nlohmann::json to_json() const;
  std::vector<std::string> validate() const;

  NoiseModel make_noise() const;
  Grid make_grid() const;
  ARKernelSpec make_kernel_spec(double alpha) const;
  double effective_l_cap() const;
  std::vector<double> ladder() const;  // eps_start * 2^(-k), k = 0..rungs-1
};

extern const std::vector<std::string> kExperimentNames;

/// Runs one experiment, writing <experiment>.csv and
/// <experiment>_summary.json under out_dir.  Returns the process exit code
/// (0 success; numerical failures raise and the CLI maps them to 2).
int run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Simulates the chain x' = alpha x + theta with inverse-CDF sampling from
/// mt19937_64 draws, bins the post-burn-in states onto the grid cells and
/// compares against invariant_measure in total variation.
struct McOracleResult {
  long samples = 0;
  SignedDensity histogram;  // empirical density on the grid
  SignedDensity invariant;
  double tv = 0.0;
  double half_width = 0.0;  // binomial bound on E[tv] sampling noise
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64 + inverse-cdf";
};

McOracleResult mc_oracle(const ARKernelSpec& spec, long n_samples, long burn_in,
                         std::uint64_t seed);

}  // namespace ergo
