#include "doctest.h"

#include "ergoperturb/ar_model.hpp"
#include "ergoperturb/ergodicity.hpp"
#include "ergoperturb/grid.hpp"
#include "ergoperturb/kernel.hpp"
#include "ergoperturb/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace ergo;

TEST_CASE("kernel build reports truncation honestly") {
  ARKernelSpec spec{0.5, NoiseModel::student_t(3.0, 1.0), Grid::uniform(600, 144.0),
                    1e-6};
  TruncationReport rep;
  const DiscretizedKernel p = build_kernel(spec, &rep);
  CHECK(p.is_markov());
  CHECK(p.markov_defect() <= 1e-12);

  // two-sided t3 mass beyond +-144 is just under 2 (2 sqrt(3)/pi) / 144^3
  CHECK(rep.noise_tail >= 7.0e-7);
  CHECK(rep.noise_tail <= 7.3866e-7);
  CHECK(rep.max_row_defect <= 1e-5);
  // rows centered past ~81 (near-side margin below (1.10 / 1e-6)^{1/3}) repair
  CHECK(rep.rows_renormalized >= 250);
  CHECK(rep.rows_renormalized <= 400);

  // raw kernel values survive the row repair up to the reported defect
  const NoiseModel& nu = spec.noise;
  for (int i : {100, 300, 450})
    for (int j : {200, 301, 400}) {
      const double raw = nu.pdf(spec.grid.nodes(j) - 0.5 * spec.grid.nodes(i));
      CHECK(p.kernel_value(i, j) == doctest::Approx(raw).epsilon(1e-4));
    }
}

TEST_CASE("kernel build aborts on unrepresentable configurations") {
  const NoiseModel t3 = NoiseModel::student_t(3.0, 1.0);
  // domain too small: the noise tail itself exceeds the truncation budget
  CHECK_THROWS_AS(build_kernel(ARKernelSpec{0.5, t3, Grid::uniform(200, 6.0)}),
                  std::invalid_argument);
  // grid too coarse for the density: row sums collapse beyond repair
  CHECK_THROWS_AS(build_kernel(ARKernelSpec{0.5, t3, Grid::uniform(100, 640.0), 1e-6}),
                  std::runtime_error);
}

TEST_CASE("two-step composition matches the aggregated autoregression") {
  // (x -> 0.6 x + theta) twice equals x -> 0.36 x + theta', theta' gaussian
  // with variance 1 + 0.6^2
  const Grid g = Grid::uniform(281, 14.0);
  const DiscretizedKernel p =
      build_kernel(ARKernelSpec{0.6, NoiseModel::gaussian(1.0, 1.0), g});
  const DiscretizedKernel p2 = compose(p, p);
  const DiscretizedKernel agg = build_kernel(
      ARKernelSpec{0.36, NoiseModel::gaussian(std::sqrt(1.36), 1.0), g});
  CHECK(operator_norm(p2 - agg, {1.0, 0.0}, {1.0, 0.0}) <= 1e-6);
}

TEST_CASE("derivative kernel entries and identities") {
  const NoiseModel t3 = NoiseModel::student_t(3.0, 1.0);
  ARKernelSpec spec{0.4, t3, Grid::uniform(300, 60.0), 1e-4};

  // k = 0 is the transition kernel itself
  const DiscretizedKernel p0 = derivative_kernel(spec, 0);
  CHECK(p0.action().isApprox(build_kernel(spec).action(), 1e-14));

  // k = 1 entries are -x w_j nu'(y - alpha x), unnormalized
  const DiscretizedKernel p1 = derivative_kernel(spec, 1);
  const Grid& g = spec.grid;
  for (int i : {30, 150, 222})
    for (int j : {90, 151, 260}) {
      const double expect =
          -g.nodes(i) * g.weights(j) * t3.derivative(1, g.nodes(j) - 0.4 * g.nodes(i));
      CHECK(p1.action()(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }

  // differentiating a probability kernel kills constants: P_1 1 = 0
  ARKernelSpec gspec{0.5, NoiseModel::gaussian(1.0, 1.0), Grid::uniform(288, 24.0)};
  const DiscretizedKernel g1 = derivative_kernel(gspec, 1);
  WeightedFunction one{gspec.grid, Eigen::VectorXd::Ones(288)};
  CHECK(weighted_norm(apply(g1, one), {1.0, 1.0}) <= 1e-10);

  // central differences of the kernel converge to P_1 at second order; the
  // gaussian spec keeps row repair at machine zero so no bias floors the ratio
  auto at = [&](double a) {
    ARKernelSpec s = gspec;
    s.alpha = a;
    return build_kernel(s);
  };
  auto fd_error = [&](double h) {
    const DiscretizedKernel fd = scale(at(0.5 + h) - at(0.5 - h), 0.5 / h);
    return operator_norm(fd - g1, {1.0, 0.0}, {1.0, 0.0});
  };
  const double e1 = fd_error(0.02);
  const double e2 = fd_error(0.01);
  CHECK(e1 / e2 >= 3.4);
  CHECK(e1 / e2 <= 4.6);
}

TEST_CASE("interpolated modulus of the kernel map") {
  const NoiseModel t3 = NoiseModel::student_t(3.0, 1.5);
  const Grid g = Grid::uniform(400, 100.0);
  const std::vector<std::pair<double, double>> pairs{
      {0.3, 0.5}, {0.3, 0.42}, {0.3, 0.36}, {0.3, 0.33}};

  // k = 0 between B_0.25 and B_0.75: exponent sigma = 1.5 * 0.5 = 0.75
  const HolderModulusResult res =
      holder_modulus_check(t3, g, 0, 0.25, 0.75, pairs, 1e-4);
  CHECK(res.sigma == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(res.ratios.size() == pairs.size());
  CHECK(res.max_ratio > 0.0);
  CHECK(res.max_ratio <= res.bound_2AB);
  // the ratio is stable across pair separations spanning a factor of ~7
  double lo = res.ratios[0], hi = res.ratios[0];
  for (double v : res.ratios) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 5.0);

  // first derivative kernel: sigma = 1.5 * 0.8 - 1 = 0.2
  const HolderModulusResult res1 =
      holder_modulus_check(t3, g, 1, 0.1, 0.9, pairs, 1e-4);
  CHECK(res1.sigma == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(res1.max_ratio <= res1.bound_2AB);

  // exponent outside (0, 1] is rejected
  CHECK_THROWS_AS(holder_modulus_check(t3, g, 0, 0.75, 0.25, pairs, 1e-4),
                  std::invalid_argument);
  CHECK_THROWS_AS(holder_modulus_check(t3, g, 2, 0.25, 0.75, pairs, 1e-4),
                  std::invalid_argument);
}

TEST_CASE("strong-norm discontinuity witness") {
  const NoiseModel t3 = NoiseModel::student_t(3.0, 1.0);
  const std::vector<double> alphas{0.7, 0.6, 0.55, 0.525, 0.5125, 0.50625, 0.503125};
  const CounterexampleResult res = run_counterexample(t3, 0.5, alphas);

  CHECK(res.a == 1.0);
  // I_1 = int_{-1}^{1} nu - int_{-2}^{-1} nu - int_{1}^{2} nu, t3 closed form
  CHECK(res.I_a == doctest::Approx(0.3573215306473021).epsilon(1e-12));
  CHECK(res.limit_value == doctest::Approx(0.17866076532365105).epsilon(1e-12));
  CHECK(res.limit_check <= 1e-9);
  CHECK(res.ratios.size() == alphas.size());
  // for a symmetric density the ratio is exactly constant along the ladder
  for (const auto& [alpha, ratio] : res.ratios)
    CHECK(ratio == doctest::Approx(res.limit_value).epsilon(1e-9));

  // gaussian variant, I_1 = (2 Phi(1) - 1) - 2 (Phi(2) - Phi(1))
  const CounterexampleResult gres =
      run_counterexample(NoiseModel::gaussian(1.0, 1.0), 0.5, alphas);
  CHECK(gres.a == 1.0);
  CHECK(gres.I_a == doctest::Approx(0.4108792481705301).epsilon(1e-10));
  CHECK(gres.limit_value == doctest::Approx(0.20543962408526505).epsilon(1e-10));

  CHECK_THROWS_AS(run_counterexample(t3, 0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_counterexample(t3, 0.5, {0.5}), std::invalid_argument);
}

TEST_CASE("stationary density expansion in the drift parameter") {
  ARKernelSpec spec{0.5, NoiseModel::student_t(3.0, 1.5), Grid::uniform(600, 144.0),
                    1e-6};
  const ExpansionCoefficients coeffs = taylor_expansion(spec, 1, 1.0 / 6.0);

  CHECK(coeffs.alpha == 0.5);
  CHECK(coeffs.mu.size() == 1);
  CHECK(std::abs(coeffs.mu_masses[0]) <= 1e-8);
  CHECK(coeffs.mu_dual_norms[0] > 0.0);
  CHECK(total_mass(coeffs.pi) == doctest::Approx(1.0).epsilon(1e-12));

  // symmetric noise: pi_alpha is even in x, hence so is its alpha-derivative
  const int n = spec.grid.size();
  for (int i = 0; i < n / 4; ++i)
    CHECK(std::abs(coeffs.mu[0].values(i) - coeffs.mu[0].values(n - 1 - i)) <= 1e-9);

  // mu_1 against central differences of the stationary density
  const WeightSpec w{1.5, 1.0};
  auto pi_at = [&](double a) {
    ARKernelSpec s = spec;
    s.alpha = a;
    return invariant_measure(build_kernel(s), w).density;
  };
  auto fd_error = [&](double h) {
    const SignedDensity hi = pi_at(0.5 + h);
    const SignedDensity lo = pi_at(0.5 - h);
    SignedDensity fd{spec.grid, (hi.values - lo.values) / (2.0 * h)};
    return dual_distance(fd, coeffs.mu[0], {1.5, 0.0});
  };
  const double e1 = fd_error(0.01);
  CHECK(e1 <= 3e-4);
  CHECK(e1 / fd_error(0.005) >= 3.3);

  // partial sums: order zero and eps = 0 reproduce pi exactly
  const SignedDensity at_zero = taylor_partial_sum(coeffs, 0.0, 1);
  CHECK((at_zero.values - coeffs.pi.values).lpNorm<Eigen::Infinity>() == 0.0);
  const SignedDensity order_zero = taylor_partial_sum(coeffs, 0.3, 0);
  CHECK((order_zero.values - coeffs.pi.values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("expansion eligibility is enforced") {
  const Grid g = Grid::uniform(200, 40.0);
  // gaussian: derivative ratios unbounded
  CHECK_THROWS_AS(
      taylor_expansion(ARKernelSpec{0.5, NoiseModel::gaussian(1.0, 1.5), g}, 1, 0.1),
      std::invalid_argument);
  // integer moment order
  CHECK_THROWS_AS(
      taylor_expansion(ARKernelSpec{0.5, NoiseModel::student_t(3.0, 2.0), g, 1e-3}, 1, 0.1),
      std::invalid_argument);
  // order beyond floor(r)
  CHECK_THROWS_AS(
      taylor_expansion(ARKernelSpec{0.5, NoiseModel::student_t(3.0, 1.5), g, 1e-3}, 2,
                       0.1),
      std::invalid_argument);
  // beta_r outside (0, 1 - floor(r)/r)
  CHECK_THROWS_AS(
      taylor_expansion(ARKernelSpec{0.5, NoiseModel::student_t(3.0, 1.5), g, 1e-3}, 1,
                       0.4),
      std::invalid_argument);
}
