#pragma once

#include "ergoperturb/grid.hpp"
#include "ergoperturb/kernel.hpp"
#include "ergoperturb/noise.hpp"

#include <utility>
#include <vector>

namespace ergo {

/// Autoregression x' = alpha x + theta discretized on a grid.  tau_trunc
/// bounds the noise mass allowed outside [-x_max, x_max]; every row is
/// scaled to unit sum so the kernel is exactly stochastic, rows off by more
/// than tau_trunc are counted as repaired, and a row defect above
/// max_row_defect aborts the build.
struct ARKernelSpec {
  double alpha = 0.0;
  NoiseModel noise;
  Grid grid;
  double tau_trunc = 1e-8;
  double max_row_defect = 1e-3;
  double markov_tol = 1e-6;
};

struct TruncationReport {
  double noise_tail = 0.0;      // mass of nu outside [-x_max, x_max]
  double max_row_defect = 0.0;  // worst |1 - raw row sum|
  int rows_renormalized = 0;
};

/// Transition kernel K_ij = nu(y_j - alpha x_i), rows renormalized per the
/// spec policy above.  Fails if the noise tail itself exceeds tau_trunc.
DiscretizedKernel build_kernel(const ARKernelSpec& spec,
                               TruncationReport* report = nullptr);

/// Formal alpha-derivative kernels
///   (P_{k,alpha} f)(x) = (-1)^k x^k integral f(y) nu^(k)(y - alpha x) dy.
/// k = 0 reproduces build_kernel (same renormalization policy); k >= 1
/// kernels are not Markov and are left unnormalized.
DiscretizedKernel derivative_kernel(const ARKernelSpec& spec, int k);

/// Empirical Hoelder modulus of alpha -> P_{k,alpha} between B_beta and
/// B_beta' with exponent sigma = r(beta'-beta) - k, checked against the
/// interpolation bound 2 A B.
struct HolderModulusResult {
  double sigma = 0.0;
  double max_ratio = 0.0;  // max over pairs of ||P_k,a - P_k,a'|| / |a - a'|^sigma
  double bound_2AB = 0.0;
  std::vector<double> ratios;
};

HolderModulusResult holder_modulus_check(
    const NoiseModel& noise, const Grid& grid, int k, double beta,
    double beta_prime, const std::vector<std::pair<double, double>>& alpha_pairs,
    double tau_trunc = 1e-8);

/// Witness family showing that alpha -> P_alpha is not continuous in the
/// strong B_V norm: test functions f_alpha supported on two shrinking
/// intervals around a / (alpha - alpha0), where the one-node difference
/// (P_alpha f_alpha - P_alpha0 f_alpha)(x_alpha) / V(x_alpha) stays bounded
/// away from zero.  All integrals are exact 1-D quadratures, independent of
/// any grid.
struct CounterexampleResult {
  double a = 0.0;    // selected interval scale with I_a != 0
  double I_a = 0.0;  // integral nu over [-a,a] minus the two side bands
  double limit_value = 0.0;  // alpha0 * I_a
  std::vector<std::pair<double, double>> ratios;  // (alpha, ratio)
  double limit_check = 0.0;  // |last ratio - limit_value|
};

CounterexampleResult run_counterexample(const NoiseModel& noise, double alpha0,
                                        const std::vector<double>& alphas);

/// Coefficients of the expansion of alpha -> pi_alpha:
///   pi_{alpha+eps} = pi_alpha + sum_j eps^j / j! mu_j + o(eps^order),
/// obtained by differentiating stationarity: mu_j solves
///   mu_j = (sum_{i=1}^{j} C(j,i) mu_{j-i} P_{i,alpha}) R,
/// with R the generalized potential of P_alpha.  Requires an expansion
/// eligible noise, order <= floor(r) and beta_r in (0, 1 - floor(r)/r).
struct ExpansionCoefficients {
  double alpha = 0.0;
  double beta_r = 0.0;
  SignedDensity pi;                // mu_0
  std::vector<SignedDensity> mu;   // mu_1 .. mu_order
  std::vector<double> mu_masses;   // quadrature masses, ~0
  std::vector<double> mu_dual_norms;  // sum w |mu_j| V^beta_r
};

ExpansionCoefficients taylor_expansion(const ARKernelSpec& spec, int order,
                                       double beta_r);

/// pi + sum_{j<=order} eps^j / j! mu_j on the expansion grid.
SignedDensity taylor_partial_sum(const ExpansionCoefficients& coeffs, double eps,
                                 int order);

}  // namespace ergo
