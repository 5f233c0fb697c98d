#include "ergoperturb/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ergo {

namespace {

Eigen::VectorXd arrpow(const Eigen::VectorXd& v, double beta) {
  if (beta == 0.0) return Eigen::VectorXd::Ones(v.size());
  if (beta == 1.0) return v;
  return v.array().pow(beta).matrix();
}

void check_markov(const Eigen::MatrixXd& action, double tol, bool& markov,
                  double& defect) {
  const double min_entry = action.minCoeff();
  double row_defect = 0.0;
  for (int i = 0; i < action.rows(); ++i)
    row_defect = std::max(row_defect, std::abs(action.row(i).sum() - 1.0));
  defect = std::max(row_defect, std::max(0.0, -min_entry));
  markov = defect <= tol;
}

}  // namespace

DiscretizedKernel DiscretizedKernel::from_action(Grid grid, Eigen::MatrixXd action,
                                                 double markov_tol) {
  if (action.rows() != grid.size() || action.cols() != grid.size())
    throw std::invalid_argument("DiscretizedKernel: action must be n x n");
  DiscretizedKernel t;
  t.grid_ = std::move(grid);
  t.action_ = std::move(action);
  check_markov(t.action_, markov_tol, t.markov_, t.markov_defect_);
  return t;
}

DiscretizedKernel DiscretizedKernel::from_kernel_values(Grid grid,
                                                        const Eigen::MatrixXd& k,
                                                        double markov_tol) {
  if (k.rows() != grid.size() || k.cols() != grid.size())
    throw std::invalid_argument("DiscretizedKernel: kernel matrix must be n x n");
  Eigen::MatrixXd action = k * grid.weights.asDiagonal();
  return from_action(std::move(grid), std::move(action), markov_tol);
}

DiscretizedKernel DiscretizedKernel::identity(Grid grid) {
  const int n = grid.size();
  return from_action(std::move(grid), Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd DiscretizedKernel::kernel_matrix() const {
  return action_ * grid_.weights.cwiseInverse().asDiagonal();
}

WeightedFunction apply(const DiscretizedKernel& t, const WeightedFunction& f) {
  if (!same_grid(t.grid(), f.grid))
    throw std::invalid_argument("apply: kernel and function grids differ");
  return {t.grid(), t.action() * f.values};
}

SignedDensity adjoint_apply(const DiscretizedKernel& t, const SignedDensity& p) {
  if (!same_grid(t.grid(), p.grid))
    throw std::invalid_argument("adjoint_apply: kernel and density grids differ");
  // mass vector m_i = w_i p_i transforms as m -> A^T m
  Eigen::VectorXd m = p.grid.weights.cwiseProduct(p.values);
  Eigen::VectorXd out = t.action().transpose() * m;
  return {t.grid(), out.cwiseQuotient(p.grid.weights)};
}

double operator_norm(const DiscretizedKernel& t, const WeightSpec& from,
                     const WeightSpec& to) {
  if (from.r != to.r)
    throw std::invalid_argument("operator_norm: weight exponents r must match");
  const Eigen::VectorXd v = weight_vector(t.grid(), from.r);
  const Eigen::VectorXd vb_from = arrpow(v, from.beta);
  const Eigen::VectorXd vb_to = arrpow(v, to.beta);
  return ((t.action().cwiseAbs() * vb_from).cwiseQuotient(vb_to)).maxCoeff();
}

DiscretizedKernel compose(const DiscretizedKernel& s, const DiscretizedKernel& t) {
  if (!same_grid(s.grid(), t.grid()))
    throw std::invalid_argument("compose: kernel grids differ");
  return DiscretizedKernel::from_action(s.grid(), s.action() * t.action());
}

DiscretizedKernel power(const DiscretizedKernel& t, int n) {
  if (n < 0) throw std::invalid_argument("power: n must be nonnegative");
  DiscretizedKernel acc = DiscretizedKernel::identity(t.grid());
  DiscretizedKernel base = t;
  while (n > 0) {
    if (n & 1) acc = compose(acc, base);
    n >>= 1;
    if (n > 0) base = compose(base, base);
  }
  return acc;
}

DiscretizedKernel operator+(const DiscretizedKernel& a, const DiscretizedKernel& b) {
  if (!same_grid(a.grid(), b.grid()))
    throw std::invalid_argument("kernel sum: grids differ");
  return DiscretizedKernel::from_action(a.grid(), a.action() + b.action());
}

DiscretizedKernel operator-(const DiscretizedKernel& a, const DiscretizedKernel& b) {
  if (!same_grid(a.grid(), b.grid()))
    throw std::invalid_argument("kernel difference: grids differ");
  return DiscretizedKernel::from_action(a.grid(), a.action() - b.action());
}

DiscretizedKernel scale(const DiscretizedKernel& a, double c) {
  return DiscretizedKernel::from_action(a.grid(), c * a.action());
}

double drift_residual(const DiscretizedKernel& t, const WeightSpec& weight,
                      int N, double delta, double L) {
  const Eigen::VectorXd v = weight_vector(t.grid(), weight.r);
  Eigen::VectorXd g = v;
  for (int i = 0; i < N; ++i) g = t.action() * g;
  const double dn = std::pow(delta, N);
  return std::max(0.0, ((g - dn * v).array() - L).maxCoeff());
}

DriftCertificate fit_drift(const DiscretizedKernel& t, const WeightSpec& weight,
                           int N, double L_cap, double delta_floor) {
  if (N < 1) throw std::invalid_argument("fit_drift: N must be >= 1");
  if (!(L_cap > 0.0)) throw std::invalid_argument("fit_drift: L_cap must be positive");
  const Eigen::VectorXd v = weight_vector(t.grid(), weight.r);
  Eigen::VectorXd g = v;
  for (int i = 0; i < N; ++i) g = t.action() * g;

  // L(s) = max_i (g_i - s v_i) is convex piecewise linear and decreasing in
  // s = delta^N; its kinks are the vertices of the upper convex hull of the
  // (v_i, g_i) cloud.  The LP optimum sits either at a kink or on the
  // L = L_cap section of a hull edge.
  const int n = v.size();
  std::vector<std::pair<double, double>> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {v(i), g(i)};
  std::sort(pts.begin(), pts.end());
  // dedupe equal v (symmetric grids hit each V twice): keep max g
  std::vector<std::pair<double, double>> uni;
  for (const auto& p : pts) {
    if (!uni.empty() && uni.back().first == p.first)
      uni.back().second = std::max(uni.back().second, p.second);
    else
      uni.push_back(p);
  }
  // upper hull, left to right
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : uni) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }

  const double s_max = 1.0 - 1e-12;
  const double s_floor = std::pow(delta_floor, N);
  double best_s = std::numeric_limits<double>::infinity();
  auto L_of = [&](double s) { return (g.array() - s * v.array()).maxCoeff(); };
  auto consider = [&](double s) {
    if (!(s >= s_floor)) s = s_floor;
    if (s >= s_max || s >= best_s) return;
    if (L_of(s) <= L_cap) best_s = s;
  };

  // kinks: hull vertices; edge slopes give the s at which the active
  // constraint hands over, the vertex is feasible on both sides
  for (size_t e = 1; e < hull.size(); ++e) {
    const double dv = hull[e].first - hull[e - 1].first;
    if (dv <= 0.0) continue;
    const double slope = (hull[e].second - hull[e - 1].second) / dv;
    consider(slope);
    // L = L_cap section within this edge's activity range
    if (hull[e].first > 0.0) consider((hull[e].second - L_cap) / hull[e].first);
    if (hull[e - 1].first > 0.0)
      consider((hull[e - 1].second - L_cap) / hull[e - 1].first);
  }
  consider(s_floor);

  DriftCertificate cert;
  cert.N = N;
  if (!std::isfinite(best_s)) {
    cert.certified = false;
    cert.delta = 1.0;
    cert.L = L_cap;
    cert.residual = drift_residual(t, weight, N, 1.0, L_cap);
    cert.message = "no (delta < 1, L <= L_cap) satisfies the drift inequality";
    return cert;
  }
  cert.certified = true;
  cert.delta = std::pow(best_s, 1.0 / N);
  cert.L = std::max(0.0, L_of(best_s));
  cert.residual = drift_residual(t, weight, N, cert.delta, cert.L);
  return cert;
}

}  // namespace ergo
