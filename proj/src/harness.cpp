#include "ergoperturb/harness.hpp"

#include "ergoperturb/csv.hpp"
#include "ergoperturb/ergodicity.hpp"
#include "ergoperturb/perturbation.hpp"
#include "ergoperturb/version.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace ergo {

using nlohmann::json;

const std::vector<std::string> kExperimentNames = {
    "drift-certify",  "rate-table",       "continuity-profile",
    "holder-check",   "lipschitz-check",  "counterexample",
    "taylor-expansion", "kartashov-compare", "mc-oracle"};

namespace {

const std::vector<std::string> kKnownKeys = {
    "experiment", "n", "x_max", "r", "beta", "noise_family", "noise_dof",
    "noise_sigma", "alpha0", "alphas", "eps_start", "eps_rungs", "tau_trunc",
    "markov_tol", "max_row_defect", "l_cap", "drift_N", "rate_burn_in",
    "rate_n_max", "contour_points", "order", "beta_r", "eps", "eps_ladder",
    "fd_h", "samples", "mc_burn_in", "seed", "rho", "delta", "out"};

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j,
                                             std::vector<std::string>* errors) {
  ExperimentConfig c;
  auto err = [&](const std::string& m) {
    if (errors) errors->push_back(m);
  };
  if (!j.is_object()) {
    err("config must be a JSON object");
    return c;
  }
  for (const auto& [key, val] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      err("unknown config key: " + key);
    if (val.is_object()) err("config must be flat; key '" + key + "' is an object");
  }
  auto get = [&](const char* key, auto& slot) {
    if (!j.contains(key)) return;
    try {
      slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    } catch (const json::exception&) {
      err(std::string("key '") + key + "' has the wrong type");
    }
  };
  get("experiment", c.experiment);
  get("n", c.n);
  get("x_max", c.x_max);
  get("r", c.r);
  get("beta", c.beta);
  get("noise_family", c.noise_family);
  get("noise_dof", c.noise_dof);
  get("noise_sigma", c.noise_sigma);
  get("alpha0", c.alpha0);
  get("alphas", c.alphas);
  get("eps_start", c.eps_start);
  get("eps_rungs", c.eps_rungs);
  get("tau_trunc", c.tau_trunc);
  get("markov_tol", c.markov_tol);
  get("max_row_defect", c.max_row_defect);
  get("l_cap", c.l_cap);
  get("drift_N", c.drift_N);
  get("rate_burn_in", c.rate_burn_in);
  get("rate_n_max", c.rate_n_max);
  get("contour_points", c.contour_points);
  get("order", c.order);
  get("beta_r", c.beta_r);
  get("eps", c.eps);
  get("eps_ladder", c.eps_ladder);
  get("fd_h", c.fd_h);
  get("samples", c.samples);
  get("mc_burn_in", c.mc_burn_in);
  get("seed", c.seed);
  get("rho", c.rho);
  get("delta", c.delta);
  get("out", c.out);
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["n"] = n;
  j["x_max"] = x_max;
  j["r"] = r;
  j["beta"] = beta;
  j["noise_family"] = noise_family;
  j["noise_dof"] = noise_dof;
  j["noise_sigma"] = noise_sigma;
  j["alpha0"] = alpha0;
  j["alphas"] = alphas;
  j["eps_start"] = eps_start;
  j["eps_rungs"] = eps_rungs;
  j["tau_trunc"] = tau_trunc;
  j["markov_tol"] = markov_tol;
  j["max_row_defect"] = max_row_defect;
  j["l_cap"] = l_cap;
  j["drift_N"] = drift_N;
  j["rate_burn_in"] = rate_burn_in;
  j["rate_n_max"] = rate_n_max;
  j["contour_points"] = contour_points;
  j["order"] = order;
  j["beta_r"] = beta_r;
  j["eps"] = eps;
  j["eps_ladder"] = eps_ladder;
  j["fd_h"] = fd_h;
  j["samples"] = samples;
  j["mc_burn_in"] = mc_burn_in;
  j["seed"] = seed;
  j["rho"] = rho;
  j["delta"] = delta;
  j["out"] = out;
  return j;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> v;
  if (std::find(kExperimentNames.begin(), kExperimentNames.end(), experiment) ==
      kExperimentNames.end())
    v.push_back("unknown experiment '" + experiment + "'");
  // the counterexample experiment integrates densities directly and never
  // builds a grid, so grid keys stay optional there
  const bool uses_grid = experiment != "counterexample";
  if (uses_grid && n < 8) v.push_back("n must be at least 8");
  if (uses_grid && !(x_max > 0.0)) v.push_back("x_max must be positive");
  if (!(r > 0.0)) v.push_back("r must be positive");
  if (beta < 0.0 || beta > 1.0) v.push_back("beta must lie in [0,1]");
  if (noise_family != "student_t" && noise_family != "gaussian")
    v.push_back("noise_family must be 'student_t' or 'gaussian'");
  if (noise_family == "student_t" && !(noise_dof > r))
    v.push_back("noise_dof must exceed r for finite moments");
  if (noise_family == "gaussian" && !(noise_sigma > 0.0))
    v.push_back("noise_sigma must be positive");
  if (!(tau_trunc > 0.0 && tau_trunc < 1.0)) v.push_back("tau_trunc must be in (0,1)");
  if (!(markov_tol > 0.0)) v.push_back("markov_tol must be positive");
  if (drift_N < 1) v.push_back("drift_N must be >= 1");
  if (l_cap < 0.0) v.push_back("l_cap must be nonnegative (0 = auto)");
  if (rate_burn_in < 1) v.push_back("rate_burn_in must be >= 1");
  if (rate_n_max <= rate_burn_in) v.push_back("rate_n_max must exceed rate_burn_in");
  if (contour_points < 4 || contour_points % 2 != 0)
    v.push_back("contour_points must be even and >= 4");
  if (std::abs(alpha0) >= 1.0) v.push_back("alpha0 must satisfy |alpha0| < 1");

  const bool needs_alphas = experiment == "drift-certify" || experiment == "rate-table";
  if (needs_alphas && alphas.empty())
    v.push_back("experiment '" + experiment + "' requires a nonempty 'alphas' list");
  const bool needs_ladder = experiment == "continuity-profile" ||
                            experiment == "holder-check" ||
                            experiment == "lipschitz-check" ||
                            experiment == "counterexample";
  if (needs_ladder) {
    if (!(eps_start > 0.0)) v.push_back("eps_start must be positive");
    if (eps_rungs < 1) v.push_back("eps_rungs must be >= 1");
    if (std::abs(alpha0) + eps_start >= 1.0)
      v.push_back("ladder exceeds |alpha| < 1: alpha0 + eps_start too large");
  }
  if (experiment == "taylor-expansion") {
    if (order < 1) v.push_back("order must be >= 1");
    if (r == std::floor(r)) v.push_back("taylor-expansion requires non-integer r");
    if (order > static_cast<int>(std::floor(r)))
      v.push_back("order must be <= floor(r)");
    if (noise_family != "student_t")
      v.push_back("taylor-expansion requires an expansion-eligible noise family");
    if (beta_r != 0.0 &&
        !(beta_r > 0.0 && beta_r < 1.0 - std::floor(r) / r))
      v.push_back("beta_r must lie in (0, 1 - floor(r)/r) or be 0 for auto");
    for (double h : fd_h)
      if (!(h > 0.0)) v.push_back("fd_h entries must be positive");
    for (double e : eps_ladder)
      if (!(e > 0.0)) v.push_back("eps_ladder entries must be positive");
  }
  if (experiment == "kartashov-compare") {
    if (order < 1) v.push_back("order must be >= 1");
    if (!(eps != 0.0)) v.push_back("eps must be nonzero");
    if (std::abs(alpha0 + eps) >= 1.0) v.push_back("alpha0 + eps must stay in (-1,1)");
  }
  if (experiment == "mc-oracle") {
    if (samples < 1) v.push_back("samples must be positive");
    if (mc_burn_in < 0) v.push_back("mc_burn_in must be nonnegative");
    if (samples < 10 * mc_burn_in)
      v.push_back("samples must be at least 10x mc_burn_in");
  }
  for (double a : alphas)
    if (std::abs(a) >= 1.0) v.push_back("alphas entries must satisfy |alpha| < 1");
  return v;
}

NoiseModel ExperimentConfig::make_noise() const {
  if (noise_family == "student_t") return NoiseModel::student_t(noise_dof, r);
  return NoiseModel::gaussian(noise_sigma, r);
}

Grid ExperimentConfig::make_grid() const { return Grid::uniform(n, x_max); }

ARKernelSpec ExperimentConfig::make_kernel_spec(double alpha) const {
  return ARKernelSpec{alpha,      make_noise(),   make_grid(),
                      tau_trunc,  max_row_defect, markov_tol};
}

double ExperimentConfig::effective_l_cap() const {
  if (l_cap > 0.0) return l_cap;
  return 10.0 * (1.0 + make_noise().moment_r());
}

std::vector<double> ExperimentConfig::ladder() const {
  std::vector<double> eps(eps_rungs);
  for (int k = 0; k < eps_rungs; ++k) eps[k] = eps_start * std::pow(2.0, -k);
  return eps;
}

McOracleResult mc_oracle(const ARKernelSpec& spec, long n_samples, long burn_in,
                         std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("mc_oracle: samples must be positive");
  if (n_samples < 10 * burn_in)
    throw std::invalid_argument("mc_oracle: samples must be at least 10x burn_in");
  const WeightSpec w1{spec.noise.moment_order(), 1.0};
  const InvariantMeasure inv = invariant_measure(build_kernel(spec), w1);

  const Grid& grid = spec.grid;
  const int n = grid.size();
  const double h = grid.spacing();
  std::mt19937_64 rng(seed);
  auto draw_uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
  double x = 0.0;
  for (long t = 0; t < burn_in + n_samples; ++t) {
    x = spec.alpha * x + spec.noise.quantile(draw_uniform());
    if (t < burn_in) continue;
    int idx = static_cast<int>(std::lround((x + grid.x_max) / h));
    idx = std::clamp(idx, 0, n - 1);
    counts(idx) += 1.0;
  }

  McOracleResult res;
  res.samples = n_samples;
  res.seed = seed;
  res.histogram = {grid, (counts / static_cast<double>(n_samples))
                             .cwiseQuotient(grid.weights)};
  res.invariant = inv.density;
  res.tv = dual_distance(res.histogram, res.invariant,
                         WeightSpec{spec.noise.moment_order(), 0.0});
  // E|p_hat_i - p_i| <= sqrt(p_i (1 - p_i) / N) per cell, summed
  const Eigen::ArrayXd mass =
      (inv.density.values.array() * grid.weights.array()).max(0.0).min(1.0);
  res.half_width =
      (mass * (1.0 - mass) / static_cast<double>(n_samples)).sqrt().sum();
  return res;
}

namespace {

// Output files must be byte-identical across runs for a fixed config and
// seed, so nothing time- or host-dependent goes into headers or summaries.
struct RunContext {
  const ExperimentConfig& cfg;
  std::string dir;
  std::vector<std::string> header;  // CSV comment lines (version + config echo)
  json summary;
  json warnings = json::array();

  RunContext(const ExperimentConfig& c, const std::string& out_dir) : cfg(c), dir(out_dir) {
    std::filesystem::create_directories(dir);
    header = {std::string("ergoperturb ") + kVersion,
              "config " + cfg.to_json().dump()};
    summary["version"] = kVersion;
    summary["experiment"] = cfg.experiment;
    summary["config"] = cfg.to_json();
    summary["rng"] = "mt19937_64 + inverse-cdf";
  }

  std::string path(const std::string& name) const { return dir + "/" + name; }

  void warn(const std::string& message) { warnings.push_back(message); }

  void finish() {
    summary["warnings"] = warnings;
    std::ofstream f(path(cfg.experiment + "_summary.json"));
    if (!f) throw std::runtime_error("cannot write summary json");
    f << summary.dump(2) << "\n";
  }
};

int run_drift_certify(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const double l_cap = cfg.effective_l_cap();
  const WeightSpec w{cfg.r, 1.0};
  std::vector<std::vector<double>> rows;
  std::vector<DiscretizedKernel> kernels;
  double family_delta = 0.0, family_L = 0.0;
  bool all_ok = true;
  for (double alpha : cfg.alphas) {
    TruncationReport trep;
    const DiscretizedKernel p = build_kernel(cfg.make_kernel_spec(alpha), &trep);
    const DriftCertificate cert = fit_drift(p, w, cfg.drift_N, l_cap);
    all_ok = all_ok && cert.certified;
    family_delta = std::max(family_delta, cert.delta);
    family_L = std::max(family_L, cert.L);
    rows.push_back({alpha, cert.delta, cert.L, cert.residual,
                    cert.certified ? 1.0 : 0.0, trep.max_row_defect,
                    static_cast<double>(trep.rows_renormalized)});
    kernels.push_back(p);
  }
  double family_residual = 0.0;
  for (size_t i = 0; i < kernels.size(); ++i)
    family_residual = std::max(
        family_residual,
        drift_residual(kernels[i], w, cfg.drift_N, family_delta, family_L));
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"alpha", "delta", "L", "residual", "certified",
                   "max_row_defect", "rows_renormalized"},
                  rows);
  ctx.summary["l_cap"] = l_cap;
  ctx.summary["family_delta"] = family_delta;
  ctx.summary["family_L"] = family_L;
  ctx.summary["family_residual"] = family_residual;
  ctx.summary["all_certified"] = all_ok;
  if (!all_ok)
    ctx.warn("drift certification failed for at least one alpha; see the certified column");
  return 0;
}

int run_rate_table(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const WeightSpec w{cfg.r, cfg.beta};
  RateFitOptions opts;
  opts.burn_in = cfg.rate_burn_in;
  opts.n_max = cfg.rate_n_max;
  std::vector<std::vector<double>> rows;
  json kappas = json::array();
  for (size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double alpha = cfg.alphas[i];
    const DiscretizedKernel p = build_kernel(cfg.make_kernel_spec(alpha));
    const RateEstimate est = estimate_rate(p, w, opts);
    rows.push_back({alpha, est.kappa_hat, est.c_hat, est.residual,
                    static_cast<double>(est.n_lo), static_cast<double>(est.n_hi),
                    static_cast<double>(est.status)});
    std::vector<std::vector<double>> decay;
    for (const auto& [k, d] : est.decay)
      decay.push_back({static_cast<double>(k), d});
    write_table_csv(ctx.path(cfg.experiment + "_decay_" + std::to_string(i) + ".csv"),
                    ctx.header, {"n", "d_n"}, decay);
    kappas.push_back(est.kappa_hat);
    if (est.status != RateStatus::ok && est.status != RateStatus::degenerate)
      ctx.warn("rate fit is unreliable for alpha " + std::to_string(alpha));
  }
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"alpha", "kappa_hat", "c_hat", "residual", "n_lo", "n_hi",
                   "status"},
                  rows);
  ctx.summary["kappa_hat"] = kappas;
  return 0;
}

std::vector<PerturbationReport> ladder_profile(const ExperimentConfig& cfg) {
  std::vector<std::pair<double, DiscretizedKernel>> family;
  family.emplace_back(0.0, build_kernel(cfg.make_kernel_spec(cfg.alpha0)));
  for (double e : cfg.ladder())
    family.emplace_back(e, build_kernel(cfg.make_kernel_spec(cfg.alpha0 + e)));
  return continuity_profile(family, WeightSpec{cfg.r, cfg.beta});
}

void write_profile_csv(RunContext& ctx, const std::vector<PerturbationReport>& prof) {
  std::vector<std::vector<double>> rows;
  for (const auto& rep : prof)
    rows.push_back({rep.eps, rep.cont_norm_01, rep.cont_norm_beta1,
                    rep.cont_norm_11, rep.tv_gap, rep.beta_gap});
  write_table_csv(ctx.path(ctx.cfg.experiment + ".csv"), ctx.header,
                  {"eps", "cont_norm_01", "cont_norm_beta1", "cont_norm_11",
                   "tv_gap", "beta_gap"},
                  rows);
}

// profile rows sorted by |eps| ascending with the eps = 0 row first; the gap
// shrinking monotonically as eps decreases means it grows rung over rung here
bool monotone_decreasing(const std::vector<PerturbationReport>& prof,
                         double PerturbationReport::*field) {
  for (size_t i = 2; i < prof.size(); ++i)
    if (prof[i].*field <= prof[i - 1].*field) return false;
  return true;
}

int run_continuity_profile(RunContext& ctx) {
  const auto prof = ladder_profile(ctx.cfg);
  write_profile_csv(ctx, prof);
  ctx.summary["monotone_cont_norm_01"] =
      monotone_decreasing(prof, &PerturbationReport::cont_norm_01);
  ctx.summary["monotone_tv_gap"] = monotone_decreasing(prof, &PerturbationReport::tv_gap);
  const auto& largest = prof.back();
  const auto& smallest = prof[1];
  ctx.summary["decrease_factor_01"] = largest.cont_norm_01 / smallest.cont_norm_01;
  ctx.summary["decrease_factor_tv"] = largest.tv_gap / smallest.tv_gap;
  ctx.summary["smallest_eps_tv_gap"] = smallest.tv_gap;
  return 0;
}

int run_holder_check(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto prof = ladder_profile(cfg);
  write_profile_csv(ctx, prof);

  double delta = cfg.delta;
  if (delta == 0.0) {
    const double l_cap = cfg.effective_l_cap();
    const WeightSpec w1{cfg.r, 1.0};
    for (double a : {cfg.alpha0, cfg.alpha0 + cfg.eps_start}) {
      const DriftCertificate cert =
          fit_drift(build_kernel(cfg.make_kernel_spec(a)), w1, cfg.drift_N, l_cap);
      if (!cert.certified)
        throw std::runtime_error("holder-check: drift certification failed");
      delta = std::max(delta, cert.delta);
    }
    ctx.summary["delta_source"] = "family drift fit";
  } else {
    ctx.summary["delta_source"] = "config";
  }

  double rho = cfg.rho;
  double kappa = 0.0;
  if (rho == 0.0) {
    RateFitOptions opts;
    opts.burn_in = cfg.rate_burn_in;
    opts.n_max = cfg.rate_n_max;
    const WeightSpec w1{cfg.r, 1.0};
    for (double a : {cfg.alpha0, cfg.alpha0 + cfg.eps_start}) {
      const RateEstimate est =
          estimate_rate(build_kernel(cfg.make_kernel_spec(a)), w1, opts);
      kappa = std::max(kappa, est.kappa_hat);
    }
    rho = 0.5 * (1.0 + std::max(kappa, delta));
    ctx.summary["kappa_hat"] = kappa;
  }

  const HolderBoundCheck chk = check_holder_bound(prof, delta, rho);
  ctx.summary["delta"] = chk.delta;
  ctx.summary["rho"] = chk.rho;
  ctx.summary["eta"] = chk.eta;
  ctx.summary["fitted_exponent"] = chk.fitted_exponent;
  ctx.summary["D_hat"] = chk.D_hat;
  ctx.summary["envelope_holds"] = chk.envelope_holds;
  ctx.summary["n_used"] = chk.n_used;
  ctx.summary["slope_ok"] = chk.fitted_exponent >= chk.eta - 0.1;
  if (chk.status != CheckStatus::ok)
    ctx.warn("insufficient signal in the continuity profile; exponent fit skipped");
  return 0;
}

int run_lipschitz_check(RunContext& ctx) {
  const auto prof = ladder_profile(ctx.cfg);
  write_profile_csv(ctx, prof);
  const LipschitzCheck chk = check_lipschitz_bound(prof);
  ctx.summary["C_hat"] = chk.C_hat;
  ctx.summary["excluded"] = chk.excluded;
  json ratios = json::array();
  for (const auto& [eps, ratio] : chk.ratios)
    ratios.push_back({{"eps", eps}, {"ratio", ratio}});
  ctx.summary["ratios"] = ratios;
  if (chk.status != CheckStatus::ok)
    ctx.warn("no usable samples for the ratio fit");
  return 0;
}

int run_counterexample(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<double> alphas;
  for (double e : cfg.ladder()) alphas.push_back(cfg.alpha0 + e);
  const CounterexampleResult res =
      ergo::run_counterexample(cfg.make_noise(), cfg.alpha0, alphas);
  std::vector<std::vector<double>> rows;
  for (const auto& [alpha, ratio] : res.ratios)
    rows.push_back({alpha, std::abs(alpha - cfg.alpha0), ratio});
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"alpha", "gap", "ratio"}, rows);
  ctx.summary["a"] = res.a;
  ctx.summary["I_a"] = res.I_a;
  ctx.summary["limit_value"] = res.limit_value;
  ctx.summary["limit_check"] = res.limit_check;
  ctx.summary["relative_error"] =
      res.limit_value != 0.0 ? res.limit_check / std::abs(res.limit_value) : 0.0;
  return 0;
}

int run_taylor_expansion(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const double floor_r = std::floor(cfg.r);
  const double beta_r =
      cfg.beta_r > 0.0 ? cfg.beta_r : 0.5 * (1.0 - floor_r / cfg.r);
  const ARKernelSpec spec = cfg.make_kernel_spec(cfg.alpha0);
  const ExpansionCoefficients coeffs = taylor_expansion(spec, cfg.order, beta_r);

  write_density_csv(ctx.path(cfg.experiment + "_pi.csv"), coeffs.pi, ctx.header);
  for (size_t jmu = 0; jmu < coeffs.mu.size(); ++jmu)
    write_density_csv(
        ctx.path(cfg.experiment + "_mu" + std::to_string(jmu + 1) + ".csv"),
        coeffs.mu[jmu], ctx.header);
  ctx.summary["beta_r"] = beta_r;
  ctx.summary["mu_masses"] = coeffs.mu_masses;
  ctx.summary["mu_dual_norms"] = coeffs.mu_dual_norms;

  const WeightSpec w0{cfg.r, 0.0};
  // remainder along the eps ladder: defect of the order-floor(r) partial sum
  std::vector<double> ladder = cfg.eps_ladder;
  if (ladder.empty()) ladder = cfg.ladder();
  std::vector<std::vector<double>> rows;
  for (double e : ladder) {
    const InvariantMeasure inv_e = invariant_measure(
        build_kernel(cfg.make_kernel_spec(cfg.alpha0 + e)), WeightSpec{cfg.r, 1.0});
    const SignedDensity approx = taylor_partial_sum(coeffs, e, cfg.order);
    const double defect = 0.5 * dual_distance(inv_e.density, approx, w0);
    rows.push_back({e, defect, defect / std::pow(e, floor_r)});
  }
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"eps", "defect_sup", "remainder_sup"}, rows);

  if (!cfg.fd_h.empty()) {
    // mu_1 against the centered difference of invariant measures
    std::vector<std::vector<double>> fd_rows;
    for (double h : cfg.fd_h) {
      const InvariantMeasure up = invariant_measure(
          build_kernel(cfg.make_kernel_spec(cfg.alpha0 + h)), WeightSpec{cfg.r, 1.0});
      const InvariantMeasure dn = invariant_measure(
          build_kernel(cfg.make_kernel_spec(cfg.alpha0 - h)), WeightSpec{cfg.r, 1.0});
      SignedDensity fd{coeffs.pi.grid,
                       (up.density.values - dn.density.values) / (2.0 * h)};
      fd_rows.push_back({h, dual_distance(fd, coeffs.mu[0], w0)});
    }
    write_table_csv(ctx.path(cfg.experiment + "_fd.csv"), ctx.header,
                    {"h", "fd_error_tv"}, fd_rows);
  }
  return 0;
}

int run_kartashov_compare(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const DiscretizedKernel p0 = build_kernel(cfg.make_kernel_spec(cfg.alpha0));
  const DiscretizedKernel pe = build_kernel(cfg.make_kernel_spec(cfg.alpha0 + cfg.eps));
  const WeightSpec w1{cfg.r, 1.0};
  const KartashovExpansion ex = kartashov_expansion(p0, pe, cfg.order, w1);
  const InvariantMeasure direct = invariant_measure(pe, w1);
  const double tv =
      dual_distance(ex.partial_sum, direct.density, WeightSpec{cfg.r, 0.0});
  // the tail bound controls the beta = 1 dual distance, which dominates tv
  const double gap1 = dual_distance(ex.partial_sum, direct.density, w1);

  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < ex.term_masses.size(); ++k)
    rows.push_back({static_cast<double>(k + 1), ex.term_masses[k], ex.term_norms[k]});
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"order", "term_mass", "term_norm"}, rows);
  ctx.summary["dr_norm"] = ex.dr_norm;
  ctx.summary["convergent"] = ex.convergent;
  if (ex.convergent) ctx.summary["tail_bound"] = ex.tail_bound;
  ctx.summary["partial_mass"] = ex.partial_mass;
  ctx.summary["tv_vs_direct"] = tv;
  ctx.summary["gap1_vs_direct"] = gap1;
  ctx.summary["within_tail_bound"] = ex.convergent && gap1 <= ex.tail_bound;
  if (!ex.convergent)
    ctx.warn("perturbation series divergent: ||D_eps R||_1 >= 1 at this eps");
  return 0;
}

int run_mc_oracle(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const McOracleResult res =
      mc_oracle(cfg.make_kernel_spec(cfg.alpha0), cfg.samples, cfg.mc_burn_in, cfg.seed);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < res.histogram.grid.size(); ++i)
    rows.push_back({res.histogram.grid.nodes(i), res.histogram.grid.weights(i),
                    res.histogram.values(i), res.invariant.values(i)});
  write_table_csv(ctx.path(cfg.experiment + ".csv"), ctx.header,
                  {"x", "w", "empirical", "invariant"}, rows);
  ctx.summary["tv"] = res.tv;
  ctx.summary["half_width"] = res.half_width;
  ctx.summary["samples"] = res.samples;
  ctx.summary["burn_in"] = cfg.mc_burn_in;
  ctx.summary["seed"] = res.seed;
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  RunContext ctx(config, out_dir);
  int rc = 0;
  if (config.experiment == "drift-certify") rc = run_drift_certify(ctx);
  else if (config.experiment == "rate-table") rc = run_rate_table(ctx);
  else if (config.experiment == "continuity-profile") rc = run_continuity_profile(ctx);
  else if (config.experiment == "holder-check") rc = run_holder_check(ctx);
  else if (config.experiment == "lipschitz-check") rc = run_lipschitz_check(ctx);
  else if (config.experiment == "counterexample") rc = run_counterexample(ctx);
  else if (config.experiment == "taylor-expansion") rc = run_taylor_expansion(ctx);
  else if (config.experiment == "kartashov-compare") rc = run_kartashov_compare(ctx);
  else if (config.experiment == "mc-oracle") rc = run_mc_oracle(ctx);
  else throw std::invalid_argument("unknown experiment: " + config.experiment);
  ctx.finish();
  return rc;
}

}  // namespace ergo
