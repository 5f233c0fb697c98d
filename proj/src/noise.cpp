#include "ergoperturb/noise.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ergo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lgamma_(double x) { return std::lgamma(x); }

// E|T|^s for Student-t with k dof, 0 <= s < k.
double student_abs_moment(double k, double s) {
  if (s == 0.0) return 1.0;
  if (!(s < k)) throw std::invalid_argument("student_t: E|theta|^s finite only for s < dof");
  const double lg = 0.5 * s * std::log(k) + lgamma_(0.5 * (s + 1.0)) +
                    lgamma_(0.5 * (k - s)) - 0.5 * std::log(M_PI) - lgamma_(0.5 * k);
  return std::exp(lg);
}

// E|X|^s for N(0, sigma^2).
double gaussian_abs_moment(double sigma, double s) {
  if (s == 0.0) return 1.0;
  const double lg = s * std::log(sigma) + 0.5 * s * std::log(2.0) +
                    lgamma_(0.5 * (s + 1.0)) - 0.5 * std::log(M_PI);
  return std::exp(lg);
}

}  // namespace

NoiseModel::NoiseModel(Family f, double param, double r)
    : family_(f), param_(param), r_(r) {
  if (!(r > 0.0)) throw std::invalid_argument("NoiseModel: moment_order must be positive");
  if (f == Family::StudentT) {
    if (!(param > 1.0)) throw std::invalid_argument("student_t: dof must exceed 1");
    moment_r_ = student_abs_moment(param, r);
    // A_j located by dense scan; the ratios decay like x^(-j) so the
    // maximum sits within a few noise scales of the origin.
    ratio_bounds_[0] = 1.0;
    const double span = 40.0 * std::sqrt(param);
    for (int j = 1; j <= 3; ++j) {
      double best = 0.0;
      const int m = 200000;
      for (int i = 0; i <= m; ++i) {
        const double x = span * i / m;
        best = std::max(best, std::abs(derivative(j, x)) / pdf(x));
      }
      ratio_bounds_[j] = best;
    }
  } else {
    if (!(param > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
    moment_r_ = gaussian_abs_moment(param, r);
    ratio_bounds_[0] = 1.0;
    ratio_bounds_[1] = kInf;
    ratio_bounds_[2] = kInf;
    ratio_bounds_[3] = kInf;
  }
}

NoiseModel NoiseModel::student_t(double dof, double moment_order) {
  if (!(moment_order < dof))
    throw std::invalid_argument("student_t: moment_order must be below dof");
  return NoiseModel(Family::StudentT, dof, moment_order);
}

NoiseModel NoiseModel::gaussian(double sigma, double moment_order) {
  return NoiseModel(Family::Gaussian, sigma, moment_order);
}

double NoiseModel::pdf(double x) const { return derivative(0, x); }

double NoiseModel::derivative(int j, double x) const {
  if (j < 0 || j > 3) throw std::invalid_argument("NoiseModel: derivative order in [0,3]");
  if (family_ == Family::StudentT) {
    const double k = param_;
    const double p = 0.5 * (k + 1.0);
    const double c = std::exp(lgamma_(0.5 * (k + 1.0)) - lgamma_(0.5 * k) -
                              0.5 * std::log(k * M_PI));
    const double u = 1.0 + x * x / k;
    const double du = 2.0 * x / k;
    const double d2u = 2.0 / k;
    switch (j) {
      case 0:
        return c * std::pow(u, -p);
      case 1:
        return -p * c * std::pow(u, -p - 1.0) * du;
      case 2:
        return c * (p * (p + 1.0) * std::pow(u, -p - 2.0) * du * du -
                    p * std::pow(u, -p - 1.0) * d2u);
      case 3:
        return c * (-p * (p + 1.0) * (p + 2.0) * std::pow(u, -p - 3.0) * du * du * du +
                    3.0 * p * (p + 1.0) * std::pow(u, -p - 2.0) * du * d2u);
    }
  } else {
    const double s2 = param_ * param_;
    const double phi = std::exp(-0.5 * x * x / s2) / (param_ * std::sqrt(2.0 * M_PI));
    switch (j) {
      case 0:
        return phi;
      case 1:
        return -(x / s2) * phi;
      case 2:
        return (x * x / (s2 * s2) - 1.0 / s2) * phi;
      case 3:
        return (-x * x * x / (s2 * s2 * s2) + 3.0 * x / (s2 * s2)) * phi;
    }
  }
  return 0.0;
}

double NoiseModel::cdf(double x) const {
  if (family_ == Family::StudentT)
    return boost::math::cdf(boost::math::students_t_distribution<double>(param_), x);
  return boost::math::cdf(boost::math::normal_distribution<double>(0.0, param_), x);
}

double NoiseModel::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u in (0,1)");
  if (family_ == Family::StudentT)
    return boost::math::quantile(boost::math::students_t_distribution<double>(param_), u);
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, param_), u);
}

double NoiseModel::tail_mass(double x) const { return 2.0 * (1.0 - cdf(std::abs(x))); }

double NoiseModel::abs_moment(double s) const {
  return family_ == Family::StudentT ? student_abs_moment(param_, s)
                                     : gaussian_abs_moment(param_, s);
}

double NoiseModel::ratio_bound(int j) const {
  if (j < 0 || j > 3) throw std::invalid_argument("NoiseModel: ratio_bound order in [0,3]");
  return ratio_bounds_[j];
}

bool NoiseModel::expansion_eligible() const {
  if (r_ == std::floor(r_)) return false;
  const int need = static_cast<int>(std::floor(r_)) + 1;
  for (int j = 1; j <= std::min(need, 3); ++j)
    if (!std::isfinite(ratio_bounds_[j])) return false;
  return true;
}

std::string NoiseModel::name() const {
  if (family_ == Family::StudentT)
    return "student_t(dof=" + std::to_string(param_) + ")";
  return "gaussian(sigma=" + std::to_string(param_) + ")";
}

}  // namespace ergo
