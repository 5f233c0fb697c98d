#pragma once

#include "ergoperturb/grid.hpp"

#include <Eigen/Dense>

#include <string>

namespace ergo {

/// Quadrature discretization of an integral operator
///   (T f)(x_i) = integral k(x_i, y) f(y) dy  ~  sum_j w_j k(x_i, y_j) f_j.
///
/// Internally the action matrix A_ij = w_j k(x_i, y_j) is stored, so that
/// apply is a plain matrix-vector product and composition is a matrix
/// product.  Kernel values k(x_i, y_j) = A_ij / w_j are recoverable for
/// export.  is_markov records whether rows are nonnegative with unit sum
/// within markov_tol.
class DiscretizedKernel {
 public:
  DiscretizedKernel() = default;

  static DiscretizedKernel from_action(Grid grid, Eigen::MatrixXd action,
                                       double markov_tol = 1e-6);
  static DiscretizedKernel from_kernel_values(Grid grid, const Eigen::MatrixXd& k,
                                              double markov_tol = 1e-6);
  static DiscretizedKernel identity(Grid grid);

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXd& action() const { return action_; }
  bool is_markov() const { return markov_; }
  double markov_defect() const { return markov_defect_; }

  double kernel_value(int i, int j) const {
    return action_(i, j) / grid_.weights(j);
  }
  Eigen::MatrixXd kernel_matrix() const;

 private:
  Grid grid_;
  Eigen::MatrixXd action_;
  bool markov_ = false;
  double markov_defect_ = 0.0;
};

WeightedFunction apply(const DiscretizedKernel& t, const WeightedFunction& f);

/// Push-forward of a signed measure: density of p T.  Preserves total mass
/// when t is Markov.
SignedDensity adjoint_apply(const DiscretizedKernel& t, const SignedDensity& p);

/// ||T||_{beta -> beta'} = max_i V(x_i)^(-beta') sum_j w_j |k(x_i,y_j)| V(y_j)^beta.
/// This is the exact discrete operator norm; from.r must equal to.r.
double operator_norm(const DiscretizedKernel& t, const WeightSpec& from,
                     const WeightSpec& to);

DiscretizedKernel compose(const DiscretizedKernel& s, const DiscretizedKernel& t);
DiscretizedKernel power(const DiscretizedKernel& t, int n);

DiscretizedKernel operator+(const DiscretizedKernel& a, const DiscretizedKernel& b);
DiscretizedKernel operator-(const DiscretizedKernel& a, const DiscretizedKernel& b);
DiscretizedKernel scale(const DiscretizedKernel& a, double c);

/// Certificate for the geometric drift inequality
///   (T^N V)(x) <= delta^N V(x) + L   on every grid node.
struct DriftCertificate {
  bool certified = false;
  int N = 1;
  double delta = 1.0;
  double L = 0.0;
  /// max over the grid of (T^N V - delta^N V - L)_+, zero when tight.
  double residual = 0.0;
  std::string message;
};

/// Fits (delta, L) minimizing delta subject to T^N V <= delta^N V + L and
/// L <= L_cap, by scanning the active-constraint pairs (the upper convex
/// hull of the (V, T^N V) cloud) together with the L = L_cap section.
DriftCertificate fit_drift(const DiscretizedKernel& t, const WeightSpec& weight,
                           int N, double L_cap, double delta_floor = 1e-8);

/// Re-check an existing certificate (possibly with a different delta or a
/// family-common L); returns the residual max((T^N V - delta^N V - L)_+).
double drift_residual(const DiscretizedKernel& t, const WeightSpec& weight,
                      int N, double delta, double L);

}  // namespace ergo
