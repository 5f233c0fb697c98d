#pragma once

#include "ergoperturb/ergodicity.hpp"
#include "ergoperturb/grid.hpp"
#include "ergoperturb/kernel.hpp"

#include <utility>
#include <vector>

namespace ergo {

/// Continuity diagnostics of a kernel family {P_eps} against its eps = 0
/// member: weak norm ||P_eps - P_0||_{0->1}, intermediate ||.||_{beta->1},
/// strong ||.||_{1->1}, and the invariant-measure gaps in total variation
/// and in the beta-weighted dual distance.
struct PerturbationReport {
  double eps = 0.0;
  double cont_norm_01 = 0.0;
  double cont_norm_beta1 = 0.0;
  double cont_norm_11 = 0.0;
  double tv_gap = 0.0;
  double beta_gap = 0.0;
};

/// family entries are (eps, kernel); an eps = 0 entry must be present.
/// Reports come back sorted by |eps| ascending (the eps = 0 row first).
std::vector<PerturbationReport> continuity_profile(
    const std::vector<std::pair<double, DiscretizedKernel>>& family,
    const WeightSpec& weight);

enum class CheckStatus { ok, insufficient_signal };

/// Diagnostic for the Hoelder-type stability bound
///   tv_gap <= D * (cont_norm_01)^eta,  eta = 1 - ln(rho)/ln(delta),
/// where delta certifies the family drift and rho is an admissible decay
/// rate.  D_hat is the smallest envelope constant on the sampled family;
/// fitted_exponent is the log-log slope (an envelope may exceed eta).
struct HolderBoundCheck {
  double delta = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  double fitted_exponent = 0.0;
  double D_hat = 0.0;
  bool envelope_holds = false;
  int n_used = 0;
  CheckStatus status = CheckStatus::ok;
};

HolderBoundCheck check_holder_bound(const std::vector<PerturbationReport>& profile,
                                    double delta, double rho);

/// Empirical constant in |pi_eps(f) - pi_0(f)| <= C ||P_eps - P_0||_{beta->1}
/// ||f||_beta: C_hat = max over nonzero-eps samples of
/// beta_gap / cont_norm_beta1; samples with a vanishing denominator are
/// excluded and counted.
struct LipschitzCheck {
  double C_hat = 0.0;
  std::vector<std::pair<double, double>> ratios;  // (eps, ratio)
  int excluded = 0;
  CheckStatus status = CheckStatus::ok;
};

LipschitzCheck check_lipschitz_bound(const std::vector<PerturbationReport>& profile);

/// Truncated perturbation series
///   pi_eps ~ pi_0 sum_{k<=order} (D_eps R)^k,  D_eps = P_eps - P_0,
/// with R the generalized potential of P_0.  Valid when ||D_eps R||_1 < 1;
/// the tail bound is ||D_eps R||^(order+1) / (1 - ||D_eps R||) * ||pi_0||_1.
struct KartashovExpansion {
  bool convergent = false;
  double dr_norm = 0.0;      // ||D_eps R||_1
  double tail_bound = 0.0;
  SignedDensity partial_sum;
  double partial_mass = 0.0; // quadrature mass of the partial sum, ~1
  std::vector<double> term_masses;  // per-order correction masses, ~0
  std::vector<double> term_norms;   // per-order dual 1-norms
};

KartashovExpansion kartashov_expansion(const DiscretizedKernel& p0,
                                       const DiscretizedKernel& p_eps, int order,
                                       const WeightSpec& weight);

}  // namespace ergo
