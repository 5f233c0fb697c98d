#pragma once

#include <Eigen/Dense>

#include <string>

namespace ergo {

/// Uniform quadrature grid on [-x_max, x_max] with composite trapezoid
/// weights.  Nodes are strictly increasing; weights are positive and sum
/// to the interval length 2*x_max.
struct Grid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  double x_max = 0.0;

  static Grid uniform(int n, double x_max);

  int size() const { return static_cast<int>(nodes.size()); }
  double spacing() const { return nodes(1) - nodes(0); }
};

/// True when the two grids describe the same quadrature (same node count,
/// extent and node positions).
bool same_grid(const Grid& a, const Grid& b);

/// Weight function V(x) = (1 + |x|)^r and the space exponent beta.
/// The pair (r, beta) identifies the ball B_beta: ||f||_beta is the sup of
/// V(x)^(-beta) |f(x)|.
struct WeightSpec {
  double r = 1.0;
  double beta = 1.0;
};

/// V(x) = (1 + |x|)^r.
double weight_value(double x, double r);

/// Vector of V(x_i) over the grid.
Eigen::VectorXd weight_vector(const Grid& grid, double r);

/// Grid function: values f(x_i).
struct WeightedFunction {
  Grid grid;
  Eigen::VectorXd values;
};

/// Signed measure with a density against Lebesgue on the grid: values are
/// density values p(x_i); the measure of a cell is approximately w_i p(x_i).
struct SignedDensity {
  Grid grid;
  Eigen::VectorXd values;
};

/// sup-norm of V^(-beta) f over the grid nodes.
double weighted_norm(const WeightedFunction& f, const WeightSpec& spec);

/// Dual-ball distance sum_i w_i |p_i - q_i| V(x_i)^beta.  At beta = 0 this
/// is the total variation distance of the two signed measures.
double dual_distance(const SignedDensity& p, const SignedDensity& q,
                     const WeightSpec& spec);

/// Quadrature pairing integral f dp = sum_i w_i p_i f_i.
double integrate(const WeightedFunction& f, const SignedDensity& p);

/// sum_i w_i p_i.
double total_mass(const SignedDensity& p);

}  // namespace ergo
