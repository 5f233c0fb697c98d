#include "ergoperturb/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ergo {

std::vector<PerturbationReport> continuity_profile(
    const std::vector<std::pair<double, DiscretizedKernel>>& family,
    const WeightSpec& weight) {
  if (family.empty()) throw std::invalid_argument("continuity_profile: empty family");
  std::vector<size_t> order(family.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(family[a].first) < std::abs(family[b].first);
  });
  if (family[order[0]].first != 0.0)
    throw std::invalid_argument("continuity_profile: family must contain eps = 0");

  const DiscretizedKernel& p0 = family[order[0]].second;
  const WeightSpec w0{weight.r, 0.0};
  const WeightSpec wb{weight.r, weight.beta};
  const WeightSpec w1{weight.r, 1.0};
  const InvariantMeasure inv0 = invariant_measure(p0, w1);

  std::vector<PerturbationReport> out;
  out.reserve(family.size());
  for (size_t idx : order) {
    const auto& [eps, pk] = family[idx];
    if (!same_grid(pk.grid(), p0.grid()))
      throw std::invalid_argument("continuity_profile: family members on different grids");
    PerturbationReport rep;
    rep.eps = eps;
    if (eps == 0.0) {
      out.push_back(rep);
      continue;
    }
    const DiscretizedKernel diff = pk - p0;
    rep.cont_norm_01 = operator_norm(diff, w0, w1);
    rep.cont_norm_beta1 = operator_norm(diff, wb, w1);
    rep.cont_norm_11 = operator_norm(diff, w1, w1);
    const InvariantMeasure invk = invariant_measure(pk, w1);
    rep.tv_gap = dual_distance(invk.density, inv0.density, w0);
    rep.beta_gap = dual_distance(invk.density, inv0.density, wb);
    out.push_back(rep);
  }
  return out;
}

HolderBoundCheck check_holder_bound(const std::vector<PerturbationReport>& profile,
                                    double delta, double rho) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("check_holder_bound: delta must be in (0,1)");
  if (!(rho > delta && rho < 1.0))
    throw std::invalid_argument("check_holder_bound: rho must be in (delta, 1)");
  HolderBoundCheck chk;
  chk.delta = delta;
  chk.rho = rho;
  chk.eta = 1.0 - std::log(rho) / std::log(delta);

  constexpr double kFloor = 1e-14;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  double d_hat = 0.0;
  for (const auto& rep : profile) {
    if (rep.eps == 0.0 || rep.cont_norm_01 < kFloor || rep.tv_gap < kFloor) continue;
    const double x = std::log(rep.cont_norm_01);
    const double y = std::log(rep.tv_gap);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++used;
    d_hat = std::max(d_hat, rep.tv_gap / std::pow(rep.cont_norm_01, chk.eta));
  }
  chk.n_used = used;
  if (used < 4) {
    chk.status = CheckStatus::insufficient_signal;
    return chk;
  }
  const double nn = used;
  chk.fitted_exponent = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  chk.D_hat = d_hat;
  chk.envelope_holds = true;
  for (const auto& rep : profile) {
    if (rep.eps == 0.0 || rep.cont_norm_01 < kFloor || rep.tv_gap < kFloor) continue;
    if (rep.tv_gap > chk.D_hat * std::pow(rep.cont_norm_01, chk.eta) * (1.0 + 1e-12))
      chk.envelope_holds = false;
  }
  return chk;
}

LipschitzCheck check_lipschitz_bound(const std::vector<PerturbationReport>& profile) {
  LipschitzCheck chk;
  constexpr double kFloor = 1e-14;
  for (const auto& rep : profile) {
    if (rep.eps == 0.0) continue;
    if (rep.cont_norm_beta1 < kFloor) {
      ++chk.excluded;
      continue;
    }
    const double ratio = rep.beta_gap / rep.cont_norm_beta1;
    chk.ratios.emplace_back(rep.eps, ratio);
    chk.C_hat = std::max(chk.C_hat, ratio);
  }
  if (chk.ratios.empty()) chk.status = CheckStatus::insufficient_signal;
  return chk;
}

KartashovExpansion kartashov_expansion(const DiscretizedKernel& p0,
                                       const DiscretizedKernel& p_eps, int order,
                                       const WeightSpec& weight) {
  if (order < 0) throw std::invalid_argument("kartashov_expansion: order >= 0");
  if (!same_grid(p0.grid(), p_eps.grid()))
    throw std::invalid_argument("kartashov_expansion: kernels on different grids");
  const WeightSpec w1{weight.r, 1.0};
  const PotentialOperator pot = generalized_potential(p0, w1);

  const Eigen::MatrixXd dr = (p_eps.action() - p0.action()) * pot.R.action();
  const DiscretizedKernel dr_kernel = DiscretizedKernel::from_action(p0.grid(), dr);

  KartashovExpansion ex;
  ex.dr_norm = operator_norm(dr_kernel, w1, w1);
  ex.convergent = ex.dr_norm < 1.0;

  const Grid& grid = p0.grid();
  Eigen::VectorXd term = grid.weights.cwiseProduct(pot.pi.values);  // mass vector
  Eigen::VectorXd sum = term;
  const Eigen::VectorXd v = weight_vector(grid, weight.r);
  const double pi_norm_1 = term.cwiseAbs().dot(v);
  for (int k = 1; k <= order; ++k) {
    term = dr.transpose() * term;
    sum += term;
    ex.term_masses.push_back(term.sum());
    ex.term_norms.push_back(term.cwiseAbs().dot(v));
  }
  ex.partial_sum = {grid, sum.cwiseQuotient(grid.weights)};
  ex.partial_mass = sum.sum();
  ex.tail_bound = ex.convergent
                      ? std::pow(ex.dr_norm, order + 1) / (1.0 - ex.dr_norm) * pi_norm_1
                      : std::numeric_limits<double>::infinity();
  return ex;
}

}  // namespace ergo
