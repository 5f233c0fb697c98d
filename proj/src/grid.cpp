#include "ergoperturb/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ergo {

Grid Grid::uniform(int n, double x_max) {
  if (n < 2) throw std::invalid_argument("Grid: need at least 2 nodes");
  if (!(x_max > 0.0)) throw std::invalid_argument("Grid: x_max must be positive");
  Grid g;
  g.x_max = x_max;
  g.nodes = Eigen::VectorXd::LinSpaced(n, -x_max, x_max);
  const double h = 2.0 * x_max / (n - 1);
  g.weights = Eigen::VectorXd::Constant(n, h);
  g.weights(0) = 0.5 * h;
  g.weights(n - 1) = 0.5 * h;
  return g;
}

bool same_grid(const Grid& a, const Grid& b) {
  return a.size() == b.size() && a.x_max == b.x_max;
}

double weight_value(double x, double r) { return std::pow(1.0 + std::abs(x), r); }

Eigen::VectorXd weight_vector(const Grid& grid, double r) {
  return grid.nodes.unaryExpr([r](double x) { return weight_value(x, r); });
}

double weighted_norm(const WeightedFunction& f, const WeightSpec& spec) {
  if (f.values.size() != f.grid.size())
    throw std::invalid_argument("weighted_norm: values/grid size mismatch");
  double m = 0.0;
  for (int i = 0; i < f.grid.size(); ++i) {
    const double vb = std::pow(weight_value(f.grid.nodes(i), spec.r), spec.beta);
    m = std::max(m, std::abs(f.values(i)) / vb);
  }
  return m;
}

double dual_distance(const SignedDensity& p, const SignedDensity& q,
                     const WeightSpec& spec) {
  if (!same_grid(p.grid, q.grid))
    throw std::invalid_argument("dual_distance: densities live on different grids");
  double s = 0.0;
  for (int i = 0; i < p.grid.size(); ++i) {
    const double vb = std::pow(weight_value(p.grid.nodes(i), spec.r), spec.beta);
    s += p.grid.weights(i) * std::abs(p.values(i) - q.values(i)) * vb;
  }
  return s;
}

double integrate(const WeightedFunction& f, const SignedDensity& p) {
  if (!same_grid(f.grid, p.grid))
    throw std::invalid_argument("integrate: function and density grids differ");
  return (f.grid.weights.array() * p.values.array() * f.values.array()).sum();
}

double total_mass(const SignedDensity& p) {
  return (p.grid.weights.array() * p.values.array()).sum();
}

}  // namespace ergo
