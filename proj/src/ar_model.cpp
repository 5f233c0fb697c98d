#include "ergoperturb/ar_model.hpp"

#include "ergoperturb/ergodicity.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo {

namespace {

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

DiscretizedKernel build_kernel(const ARKernelSpec& spec, TruncationReport* report) {
  const Grid& grid = spec.grid;
  const int n = grid.size();
  const double tail = spec.noise.tail_mass(grid.x_max);
  if (tail > spec.tau_trunc)
    throw std::invalid_argument(
        "build_kernel: noise tail mass " + std::to_string(tail) +
        " outside the grid exceeds tau_trunc; widen x_max or relax tau_trunc");

  Eigen::MatrixXd action(n, n);
  double worst = 0.0;
  int renorm = 0;
  for (int i = 0; i < n; ++i) {
    const double shift = spec.alpha * grid.nodes(i);
    for (int j = 0; j < n; ++j)
      action(i, j) = grid.weights(j) * spec.noise.pdf(grid.nodes(j) - shift);
    const double s = action.row(i).sum();
    const double defect = std::abs(1.0 - s);
    worst = std::max(worst, defect);
    if (defect > spec.max_row_defect)
      throw std::runtime_error("build_kernel: row " + std::to_string(i) +
                               " truncation defect " + std::to_string(defect) +
                               " exceeds max_row_defect");
    // every row is scaled to unit mass so the kernel is exactly stochastic;
    // rows whose defect exceeded tau_trunc are counted as repaired
    action.row(i) /= s;
    if (defect > spec.tau_trunc) ++renorm;
  }
  if (report) {
    report->noise_tail = tail;
    report->max_row_defect = worst;
    report->rows_renormalized = renorm;
  }
  return DiscretizedKernel::from_action(grid, std::move(action), spec.markov_tol);
}

DiscretizedKernel derivative_kernel(const ARKernelSpec& spec, int k) {
  if (k < 0 || k > 3)
    throw std::invalid_argument("derivative_kernel: order k must be in [0,3]");
  if (k == 0) return build_kernel(spec);
  const Grid& grid = spec.grid;
  const int n = grid.size();
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  Eigen::MatrixXd action(n, n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.nodes(i);
    const double xk = sign * std::pow(x, k);
    const double shift = spec.alpha * x;
    for (int j = 0; j < n; ++j)
      action(i, j) =
          grid.weights(j) * xk * spec.noise.derivative(k, grid.nodes(j) - shift);
  }
  return DiscretizedKernel::from_action(grid, std::move(action), spec.markov_tol);
}

HolderModulusResult holder_modulus_check(
    const NoiseModel& noise, const Grid& grid, int k, double beta,
    double beta_prime, const std::vector<std::pair<double, double>>& alpha_pairs,
    double tau_trunc) {
  const double r = noise.moment_order();
  HolderModulusResult res;
  res.sigma = r * (beta_prime - beta) - k;
  if (!(res.sigma > 0.0 && res.sigma <= 1.0))
    throw std::invalid_argument(
        "holder_modulus_check: sigma = r(beta'-beta)-k must lie in (0,1]");
  if (alpha_pairs.empty())
    throw std::invalid_argument("holder_modulus_check: no alpha pairs");

  const WeightSpec from{r, beta};
  const WeightSpec to{r, beta_prime};
  double bound_b = 0.0;
  const Eigen::VectorXd vb =
      weight_vector(grid, r).array().pow(beta).matrix();
  for (const auto& [a1, a2] : alpha_pairs) {
    if (a1 == a2) throw std::invalid_argument("holder_modulus_check: equal pair");
    ARKernelSpec s1{a1, noise, grid, tau_trunc};
    ARKernelSpec s2{a2, noise, grid, tau_trunc};
    const DiscretizedKernel k1 = derivative_kernel(s1, k);
    const DiscretizedKernel k2 = derivative_kernel(s2, k);
    const double nrm = operator_norm(k1 - k2, from, to);
    res.ratios.push_back(nrm / std::pow(std::abs(a1 - a2), res.sigma));
    res.max_ratio = std::max(res.max_ratio, res.ratios.back());
    // B with P_alpha V^beta <= B V^beta, taken over the sampled family
    for (const DiscretizedKernel* kk : {&k1, &k2}) {
      if (k == 0) {
        const Eigen::VectorXd pv = kk->action() * vb;
        bound_b = std::max(bound_b, (pv.cwiseQuotient(vb)).maxCoeff());
      }
    }
    if (k != 0) {
      const DiscretizedKernel m1 = build_kernel(s1);
      const DiscretizedKernel m2 = build_kernel(s2);
      bound_b = std::max(bound_b, ((m1.action() * vb).cwiseQuotient(vb)).maxCoeff());
      bound_b = std::max(bound_b, ((m2.action() * vb).cwiseQuotient(vb)).maxCoeff());
    }
  }
  const double a_max = std::max(noise.ratio_bound(k),
                                noise.ratio_bound(std::min(k + 1, 3)));
  res.bound_2AB = 2.0 * a_max * bound_b;
  return res;
}

CounterexampleResult run_counterexample(const NoiseModel& noise, double alpha0,
                                        const std::vector<double>& alphas) {
  if (alphas.empty())
    throw std::invalid_argument("run_counterexample: no alphas supplied");
  for (double a : alphas)
    if (a == alpha0)
      throw std::invalid_argument("run_counterexample: alphas must differ from alpha0");

  CounterexampleResult out;
  // pick the interval scale with a clearly nonzero band difference
  double a = 1.0;
  bool found = false;
  for (int tries = 0; tries < 20; ++tries, a *= 2.0) {
    const double inner = noise.cdf(a) - noise.cdf(-a);
    const double bands =
        (noise.cdf(-a) - noise.cdf(-2.0 * a)) + (noise.cdf(2.0 * a) - noise.cdf(a));
    if (std::abs(inner - bands) > 0.01) {
      out.a = a;
      out.I_a = inner - bands;
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("run_counterexample: no interval scale with I_a != 0");

  using boost::math::quadrature::gauss_kronrod;
  auto m1 = [&](double lo, double hi) {
    return gauss_kronrod<double, 61>::integrate(
        [&](double y) { return y * noise.pdf(y); }, lo, hi, 10, 1e-13);
  };
  auto m0 = [&](double lo, double hi) { return noise.cdf(hi) - noise.cdf(lo); };

  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end(), [&](double x, double y) {
    return std::abs(x - alpha0) > std::abs(y - alpha0);
  });
  for (double alpha : sorted) {
    const double x = out.a / (alpha - alpha0);
    const double pa = (m1(0.0, out.a) + alpha * x * m0(0.0, out.a)) -
                      (m1(-2.0 * out.a, -out.a) + alpha * x * m0(-2.0 * out.a, -out.a));
    const double p0 = (m1(out.a, 2.0 * out.a) + alpha0 * x * m0(out.a, 2.0 * out.a)) -
                      (m1(-out.a, 0.0) + alpha0 * x * m0(-out.a, 0.0));
    const double ratio = (pa - p0) / weight_value(x, 1.0);
    out.ratios.emplace_back(alpha, ratio);
  }
  out.limit_value = alpha0 * out.I_a;
  out.limit_check = std::abs(out.ratios.back().second - out.limit_value);
  return out;
}

ExpansionCoefficients taylor_expansion(const ARKernelSpec& spec, int order,
                                       double beta_r) {
  const double r = spec.noise.moment_order();
  const int floor_r = static_cast<int>(std::floor(r));
  if (!spec.noise.expansion_eligible())
    throw std::invalid_argument(
        "taylor_expansion: noise not expansion eligible (needs bounded "
        "derivative ratios and non-integer moment order)");
  if (order < 1 || order > floor_r)
    throw std::invalid_argument("taylor_expansion: order must be in [1, floor(r)]");
  if (!(beta_r > 0.0 && beta_r < 1.0 - static_cast<double>(floor_r) / r))
    throw std::invalid_argument(
        "taylor_expansion: beta_r must lie in (0, 1 - floor(r)/r)");

  const DiscretizedKernel p = build_kernel(spec);
  const WeightSpec w1{r, 1.0};
  const PotentialOperator pot = generalized_potential(p, w1);
  const Grid& grid = spec.grid;

  std::vector<DiscretizedKernel> deriv;
  for (int k = 1; k <= order; ++k) deriv.push_back(derivative_kernel(spec, k));

  ExpansionCoefficients out;
  out.alpha = spec.alpha;
  out.beta_r = beta_r;
  out.pi = pot.pi;

  const Eigen::VectorXd vb = weight_vector(grid, r).array().pow(beta_r).matrix();
  std::vector<Eigen::VectorXd> mass(order + 1);
  mass[0] = grid.weights.cwiseProduct(pot.pi.values);
  for (int j = 1; j <= order; ++j) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid.size());
    for (int i = 1; i <= j; ++i)
      rhs += binom(j, i) * (deriv[i - 1].action().transpose() * mass[j - i]);
    mass[j] = pot.R.action().transpose() * rhs;
    out.mu.push_back({grid, mass[j].cwiseQuotient(grid.weights)});
    out.mu_masses.push_back(mass[j].sum());
    out.mu_dual_norms.push_back(mass[j].cwiseAbs().dot(vb));
  }
  return out;
}

SignedDensity taylor_partial_sum(const ExpansionCoefficients& coeffs, double eps,
                                 int order) {
  if (order < 0 || order > static_cast<int>(coeffs.mu.size()))
    throw std::invalid_argument("taylor_partial_sum: order out of range");
  Eigen::VectorXd vals = coeffs.pi.values;
  double fact = 1.0;
  for (int j = 1; j <= order; ++j) {
    fact *= j;
    vals += std::pow(eps, j) / fact * coeffs.mu[j - 1].values;
  }
  return {coeffs.pi.grid, vals};
}

}  // namespace ergo
