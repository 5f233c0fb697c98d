#include "ergoperturb/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ergo {

namespace {

Eigen::VectorXd arrpow(const Eigen::VectorXd& v, double beta) {
  if (beta == 0.0) return Eigen::VectorXd::Ones(v.size());
  if (beta == 1.0) return v;
  return v.array().pow(beta).matrix();
}

// Invariant mass vector m (cell masses, sum 1) of the adjoint A^T m = m.
Eigen::VectorXd invariant_mass(const DiscretizedKernel& p,
                               const InvariantOptions& opts, double* residual,
                               double* subdominant) {
  const int n = p.grid().size();
  const Eigen::MatrixXd at = p.action().transpose();
  Eigen::MatrixXd shifted = at;
  shifted.diagonal().array() -= 1.0 + 1e-9;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);

  Eigen::VectorXd m = p.grid().weights / p.grid().weights.sum();
  double res = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    m = lu.solve(m);
    const double s = m.sum();
    if (s == 0.0) throw std::runtime_error("invariant_measure: inverse iteration collapsed");
    m /= s;
    res = (at * m - m).cwiseAbs().sum();
    if (res <= opts.residual_tol) break;
  }
  if (res > opts.residual_tol)
    throw std::runtime_error("invariant_measure: fixed point residual " +
                             std::to_string(res) + " above tolerance");

  // deflated power iteration for |lambda_2|; a random start cannot sit in a
  // proper invariant subspace the way a structured (e.g. alternating) one can
  std::mt19937_64 rng(0x1f2e3d4c5b6a7988ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uni(rng);
  v -= v.sum() * m;  // remove the eigen-direction of eigenvalue 1
  v /= v.cwiseAbs().sum();
  double growth = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd vn = at * v;
    vn -= vn.sum() * m;
    const double nw = vn.cwiseAbs().sum();
    if (nw < 1e-300) { growth = 0.0; break; }
    growth = nw;
    v = vn / nw;
  }
  if (subdominant) *subdominant = growth;
  if (growth >= 1.0 - opts.uniqueness_tol)
    throw std::runtime_error(
        "invariant_measure: eigenvalue 1 not simple within tolerance "
        "(subdominant modulus " + std::to_string(growth) + ")");
  if (residual) *residual = res;
  return m;
}

}  // namespace

InvariantMeasure invariant_measure(const DiscretizedKernel& p,
                                   const WeightSpec& weight,
                                   const InvariantOptions& opts) {
  if (!p.is_markov())
    throw std::invalid_argument("invariant_measure: kernel is not Markov (defect " +
                                std::to_string(p.markov_defect()) + ")");
  double res = 0.0, sub = 0.0;
  Eigen::VectorXd m = invariant_mass(p, opts, &res, &sub);

  const double peak = m.cwiseQuotient(p.grid().weights).maxCoeff();
  double neg = 0.0;
  for (int i = 0; i < m.size(); ++i) neg = std::min(neg, m(i) / p.grid().weights(i));
  if (-neg > opts.negative_tol * peak)
    throw std::runtime_error("invariant_measure: density negative beyond tolerance");
  m = m.cwiseMax(0.0);
  m /= m.sum();

  InvariantMeasure out;
  out.density = {p.grid(), m.cwiseQuotient(p.grid().weights)};
  out.pi_V = m.dot(weight_vector(p.grid(), weight.r));
  out.residual = res;
  out.subdominant = sub;
  return out;
}

RateEstimate estimate_rate(const DiscretizedKernel& p, const WeightSpec& weight,
                           const RateFitOptions& opts) {
  if (!p.is_markov())
    throw std::invalid_argument("estimate_rate: kernel is not Markov");
  InvariantOptions iopts;
  double res = 0.0, sub = 0.0;
  const Eigen::VectorXd m = invariant_mass(p, iopts, &res, &sub);
  const int n = p.grid().size();
  const Eigen::MatrixXd pi_action = Eigen::VectorXd::Ones(n) * m.transpose();

  const Eigen::VectorXd v = weight_vector(p.grid(), weight.r);
  const Eigen::VectorXd vb = arrpow(v, weight.beta);
  auto norm_beta = [&](const Eigen::MatrixXd& a) {
    return ((a.cwiseAbs() * vb).cwiseQuotient(vb)).maxCoeff();
  };

  RateEstimate est;
  Eigen::MatrixXd pn = p.action();
  for (int k = 1; k <= opts.n_max; ++k) {
    if (k > 1) pn = pn * p.action();
    const double d = norm_beta(pn - pi_action);
    est.decay.emplace_back(k, d);
    if (d < opts.floor) break;
  }

  std::vector<std::pair<int, double>> window;
  for (const auto& [k, d] : est.decay)
    if (k >= opts.burn_in && d >= opts.floor) window.emplace_back(k, d);

  if (!est.decay.empty() && est.decay.front().second < opts.floor) {
    est.status = RateStatus::degenerate;  // already mixed: d_1 ~ 0
    est.kappa_hat = 0.0;
    est.c_hat = est.decay.front().second;
    return est;
  }
  if (static_cast<int>(window.size()) < opts.min_points) {
    est.status = RateStatus::insufficient;
    return est;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [k, d] : window) {
    const double x = k, y = std::log(d);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double nn = static_cast<double>(window.size());
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double inter = (sy - slope * sx) / nn;
  est.kappa_hat = std::exp(slope);
  est.c_hat = std::exp(inter);
  est.n_lo = window.front().first;
  est.n_hi = window.back().first;
  double worst = 0.0;
  for (const auto& [k, d] : window) {
    const double y = std::log(d), fit = inter + slope * k;
    worst = std::max(worst, std::abs(y - fit) / std::abs(y));
  }
  est.residual = worst;
  est.status = slope >= 0.0 ? RateStatus::not_decaying : RateStatus::ok;
  return est;
}

Resolvent resolvent(const DiscretizedKernel& p, std::complex<double> z,
                    double residual_tol) {
  const int n = p.grid().size();
  Eigen::MatrixXcd zi = -p.action().cast<std::complex<double>>();
  zi.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(zi);
  Resolvent r{p.grid(), z, lu.solve(Eigen::MatrixXcd::Identity(n, n)), 0.0};
  r.residual = (zi * r.action - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(r.residual <= residual_tol) || !r.action.allFinite())
    throw std::runtime_error("resolvent: z too close to the spectrum (residual " +
                             std::to_string(r.residual) + ")");
  return r;
}

double operator_norm(const Resolvent& t, const WeightSpec& from,
                     const WeightSpec& to) {
  if (from.r != to.r)
    throw std::invalid_argument("operator_norm: weight exponents r must match");
  const Eigen::VectorXd v = weight_vector(t.grid, from.r);
  const Eigen::VectorXd vb_from = arrpow(v, from.beta);
  const Eigen::VectorXd vb_to = arrpow(v, to.beta);
  const Eigen::MatrixXd mag = t.action.cwiseAbs();
  return ((mag * vb_from).cwiseQuotient(vb_to)).maxCoeff();
}

DiscretizedKernel spectral_projection(const DiscretizedKernel& p,
                                      std::complex<double> center, double radius,
                                      int n_points, ProjectionDiagnostics* diag) {
  if (n_points < 4 || n_points % 2 != 0)
    throw std::invalid_argument("spectral_projection: n_points must be even and >= 4");
  if (!(radius > 0.0))
    throw std::invalid_argument("spectral_projection: radius must be positive");
  const int n = p.grid().size();
  // trapezoid on the circle; resolvents at conjugate nodes are conjugate,
  // so only the upper half is solved
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  const int half = n_points / 2;
  for (int j = 0; j <= half; ++j) {
    const double theta = 2.0 * M_PI * j / n_points;
    const std::complex<double> phase(std::cos(theta), std::sin(theta));
    const Resolvent r = resolvent(p, center + radius * phase, 1e-6);
    const Eigen::MatrixXcd term = phase * r.action;
    if (j == 0 || j == half)
      acc += term;
    else
      acc += term + term.conjugate();
  }
  acc *= radius / n_points;

  const double imag_residue = acc.imag().cwiseAbs().maxCoeff();
  DiscretizedKernel proj = DiscretizedKernel::from_action(p.grid(), acc.real());

  if (diag) {
    diag->imag_residue = imag_residue;
    const Eigen::VectorXd v = weight_vector(p.grid(), 1.0);
    auto norm1 = [&](const Eigen::MatrixXd& a) {
      return ((a.cwiseAbs() * v).cwiseQuotient(v)).maxCoeff();
    };
    diag->idempotency_defect =
        norm1(proj.action() * proj.action() - proj.action());
    // rank-one comparison against 1 (x) pi built from the projection itself
    const Eigen::VectorXd row_mean =
        proj.action().colwise().mean().transpose();
    diag->rank_one_defect =
        norm1(proj.action() - Eigen::VectorXd::Ones(n) * row_mean.transpose());
  }
  return proj;
}

PotentialOperator generalized_potential(const DiscretizedKernel& p,
                                        const WeightSpec& weight,
                                        const InvariantOptions& opts) {
  if (!p.is_markov())
    throw std::invalid_argument("generalized_potential: kernel is not Markov");
  double res = 0.0, sub = 0.0;
  const Eigen::VectorXd m = invariant_mass(p, opts, &res, &sub);
  const int n = p.grid().size();
  const Eigen::MatrixXd pi_action = Eigen::VectorXd::Ones(n) * m.transpose();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) - p.action() + pi_action;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  Eigen::MatrixXd r_action = lu.solve(Eigen::MatrixXd::Identity(n, n));

  PotentialOperator out;
  out.pi = {p.grid(), m.cwiseQuotient(p.grid().weights)};
  const Eigen::VectorXd v = weight_vector(p.grid(), weight.r);
  out.identity_residual =
      (((sys * r_action - Eigen::MatrixXd::Identity(n, n)).cwiseAbs() * v)
           .cwiseQuotient(v))
          .maxCoeff();
  const double one_res =
      (r_action * Eigen::VectorXd::Ones(n) - Eigen::VectorXd::Ones(n))
          .cwiseAbs()
          .maxCoeff();
  const double pi_res = (r_action.transpose() * m - m).cwiseAbs().sum();
  out.fixed_residual = std::max(one_res, pi_res);
  out.R = DiscretizedKernel::from_action(p.grid(), std::move(r_action));
  return out;
}

}  // namespace ergo
