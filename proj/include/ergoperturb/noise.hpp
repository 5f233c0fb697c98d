#pragma once

#include <string>

namespace ergo {

/// Innovation density for the autoregression x' = alpha x + theta.
///
/// Two families are provided:
///  - student_t(dof): nu(x) = c_k (1 + x^2/k)^(-(k+1)/2).  Positive,
///    smooth, finite absolute moments of every order s < k, and the
///    derivative ratios sup |nu^(j)| / nu are finite, so the expansion
///    machinery applies.
///  - gaussian(sigma): finite moments of all orders, but |nu'/nu| = |x|/sigma^2
///    is unbounded, so the expansion eligibility flag is off.
///
/// moment_order r fixes the weight V(x) = (1+|x|)^r the model is used with;
/// moment_r = E|theta|^r must be finite (checked at construction).
class NoiseModel {
 public:
  enum class Family { StudentT, Gaussian };

  static NoiseModel student_t(double dof, double moment_order);
  static NoiseModel gaussian(double sigma, double moment_order);

  double pdf(double x) const;
  /// j-th derivative of the pdf, j in [0, 3].
  double derivative(int j, double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  /// P(|theta| > x).
  double tail_mass(double x) const;

  /// E|theta|^s (closed form; s must be admissible for the family).
  double abs_moment(double s) const;

  double moment_order() const { return r_; }
  double moment_r() const { return moment_r_; }

  /// A_j = sup_x |nu^(j)(x)| / nu(x); +inf when unbounded.
  double ratio_bound(int j) const;

  /// True when the density is positive, smooth, has bounded derivative
  /// ratios up to floor(r)+1 and r is not an integer.
  bool expansion_eligible() const;

  Family family() const { return family_; }
  double param() const { return param_; }
  std::string name() const;

 private:
  NoiseModel(Family f, double param, double r);

  Family family_;
  double param_;  // dof for StudentT, sigma for Gaussian
  double r_;
  double moment_r_;
  double ratio_bounds_[4];
};

}  // namespace ergo
