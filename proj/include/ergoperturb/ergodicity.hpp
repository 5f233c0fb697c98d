#pragma once

#include "ergoperturb/grid.hpp"
#include "ergoperturb/kernel.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace ergo {

struct InvariantOptions {
  double residual_tol = 1e-10;
  double negative_tol = 1e-8;    // relative to the sup of the density
  double uniqueness_tol = 1e-6;  // |lambda_2| >= 1 - tol means multiplicity
  int max_iterations = 20;
};

struct InvariantMeasure {
  SignedDensity density;
  double pi_V = 0.0;        // integral V d pi for the supplied weight
  double residual = 0.0;    // || pi P - pi ||_TV
  double subdominant = 0.0; // power-iteration estimate of |lambda_2|
};

/// Stationary density of a Markov kernel: left fixed point of the adjoint,
/// computed by shifted inverse iteration and normalized to unit mass.
/// Throws when the kernel is not Markov, when eigenvalue 1 is multiple
/// within tolerance, or when the solution dips negative beyond tolerance.
InvariantMeasure invariant_measure(const DiscretizedKernel& p,
                                   const WeightSpec& weight,
                                   const InvariantOptions& opts = {});

struct RateFitOptions {
  int burn_in = 5;      // discard n < burn_in before fitting
  int n_max = 24;       // largest power probed
  double floor = 1e-12; // stop once ||P^n - Pi|| falls below this
  int min_points = 4;
};

enum class RateStatus { ok, degenerate, not_decaying, insufficient };

struct RateEstimate {
  double kappa_hat = 0.0;
  double c_hat = 0.0;
  int n_lo = 0, n_hi = 0;  // fitted window
  double residual = 0.0;   // max relative deviation of log d_n from the fit
  std::vector<std::pair<int, double>> decay;  // (n, d_n)
  RateStatus status = RateStatus::ok;
};

/// Least-squares fit of log ||P^n - Pi||_beta ~ log c + n log kappa over the
/// window [burn_in, n_max], stopping early at the numerical floor.
RateEstimate estimate_rate(const DiscretizedKernel& p, const WeightSpec& weight,
                           const RateFitOptions& opts = {});

/// (z I - P)^(-1) as a dense complex operator, validated by a residual
/// check; throws when z is numerically in the spectrum.
struct Resolvent {
  Grid grid;
  std::complex<double> z;
  Eigen::MatrixXcd action;
  double residual = 0.0;
};

Resolvent resolvent(const DiscretizedKernel& p, std::complex<double> z,
                    double residual_tol = 1e-8);

/// Operator norm of a complex operator between (r, beta) and (r, beta').
double operator_norm(const Resolvent& t, const WeightSpec& from,
                     const WeightSpec& to);

struct ProjectionDiagnostics {
  double imag_residue = 0.0;      // largest imaginary part dropped
  double idempotency_defect = 0.0; // ||Pi^2 - Pi||_1
  double rank_one_defect = 0.0;    // ||Pi - 1 (x) pi||_1
};

/// Riesz spectral projection (2 pi i)^(-1) contour integral of the
/// resolvent over the circle |z - center| = radius, by the trapezoid rule
/// (spectrally accurate on a circle).  n_points must be even; conjugate
/// symmetry halves the solves.
DiscretizedKernel spectral_projection(const DiscretizedKernel& p,
                                      std::complex<double> center, double radius,
                                      int n_points,
                                      ProjectionDiagnostics* diag = nullptr);

/// Generalized potential R = (I - P + Pi)^(-1) with Pi = 1 (x) pi, the
/// inverse that the perturbation series is built from.  Validated by
/// R 1 = 1, pi R = pi and (I - P + Pi) R = I.
struct PotentialOperator {
  DiscretizedKernel R;
  SignedDensity pi;
  double identity_residual = 0.0;  // ||(I - P + Pi) R - I||_1
  double fixed_residual = 0.0;     // max of ||R1 - 1||_0 and ||pi R - pi||_TV
};

PotentialOperator generalized_potential(const DiscretizedKernel& p,
                                        const WeightSpec& weight,
                                        const InvariantOptions& opts = {});

}  // namespace ergo
