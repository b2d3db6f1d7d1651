#pragma once

// Generalized polar coordinates x = tau_E(x)^E l_E(x) with respect to a
// matrix E, and the E^T-homogeneous functions psi built from them.

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "osrf/errors.hpp"
#include "osrf/spectral.hpp"

namespace osrf {

/// The integral norm ||x||_E = int_0^1 ||t^E x|| dt/t = int_0^inf ||e^{-uE} x|| du.
///
/// t -> ||t^{-E} x||_E is strictly decreasing, which is what makes the radial
/// part tau_E well defined for non-normal E. The matrices e^{-uE} at every
/// quadrature node are built once; the panel sequence stops where
/// sigma_max(e^{-UE}) * int ||e^{-vE}|| dv drops below 1e-14 of the smallest
/// possible value int sigma_min(e^{-vE}) dv, so the neglected tail is below
/// that fraction of the norm for every x.
class MsNorm {
 public:
  static constexpr int kNodes = 32;

  explicit MsNorm(const SquareMatrix& e) : e_(e) {
    const SpectrumSummary spectrum = spectrum_summary(e);
    if (spectrum.min_real_part() <= 0.0) {
      throw DomainError("integral norm needs eigenvalue real parts > 0; found " +
                        detail::num(spectrum.min_real_part()));
    }
    const auto d = static_cast<Eigen::Index>(e.order());
    const double op_norm = e.matrix().operatorNorm();
    panel_width_ = 2.0 / std::max(1.0, op_norm);

    const auto& abscissa = boost::math::quadrature::gauss<double, kNodes>::abscissa();
    const auto& gl_weights = boost::math::quadrature::gauss<double, kNodes>::weights();
    std::vector<double> unit_nodes;
    std::vector<double> unit_weights;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      unit_nodes.push_back(-abscissa[i]);
      unit_weights.push_back(gl_weights[i]);
      unit_nodes.push_back(abscissa[i]);
      unit_weights.push_back(gl_weights[i]);
    }

    double upper_integral = 0.0;  // int sigma_max
    double lower_integral = 0.0;  // int sigma_min
    for (int p = 0;; ++p) {
      if (p > 20000) throw NumericalError("integral norm quadrature failed to truncate");
      const double a = p * panel_width_;
      Eigen::MatrixXd stack(kNodes * d, d);
      for (int i = 0; i < kNodes; ++i) {
        const double u = a + 0.5 * panel_width_ * (unit_nodes[i] + 1.0);
        const double w = 0.5 * panel_width_ * unit_weights[i];
        const Eigen::MatrixXd map = matrix_exp(-u * e.matrix());
        stack.block(i * d, 0, d, d) = map;
        weights_.push_back(w);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(map);
        upper_integral += w * svd.singularValues()(0);
        lower_integral += w * svd.singularValues()(d - 1);
      }
      stacks_.push_back(std::move(stack));
      const double sigma_end = matrix_exp(-(a + panel_width_) * e.matrix()).operatorNorm();
      if (sigma_end * upper_integral <= 1e-14 * lower_integral) break;
    }
    lower_bound_ = lower_integral;
  }

  double operator()(const Eigen::VectorXd& x) const {
    const auto d = static_cast<Eigen::Index>(e_.order());
    if (x.size() != d) throw InvalidInput("point dimension does not match the matrix order");
    double acc = 0.0;
    std::size_t node = 0;
    Eigen::VectorXd y(kNodes * d);
    for (const Eigen::MatrixXd& stack : stacks_) {
      y.noalias() = stack * x;
      for (int i = 0; i < kNodes; ++i, ++node) acc += weights_[node] * y.segment(i * d, d).norm();
    }
    return acc;
  }

  const SquareMatrix& exponent() const { return e_; }
  std::size_t node_count() const { return weights_.size(); }
  /// ||x||_E >= lower_bound() * ||x|| for all x.
  double lower_bound() const { return lower_bound_; }

 private:
  SquareMatrix e_;
  double panel_width_ = 1.0;
  double lower_bound_ = 0.0;
  std::vector<Eigen::MatrixXd> stacks_;
  std::vector<double> weights_;
};

inline double ms_norm(const SquareMatrix& e, const Eigen::VectorXd& x) { return MsNorm(e)(x); }

/// (tau_E(x), l_E(x)); direction is empty for x = 0.
struct PolarDecomposition {
  double radial = 0.0;
  std::optional<Eigen::VectorXd> direction;
};

/// Polar coordinates with respect to a fixed E.
///
/// tau_E(x) is the unique t > 0 with ||t^{-E} x||_E = 1. With s = log t the
/// residual G(s) = ||e^{-sE} x||_E - 1 is strictly decreasing with
/// G'(s) = -||e^{-sE} x||, so after bracketing the root is polished by
/// Newton steps that fall back to bisection whenever they leave the bracket.
class PolarCoordinates {
 public:
  explicit PolarCoordinates(const SquareMatrix& e)
      : norm_(std::make_shared<const MsNorm>(e)) {}

  const SquareMatrix& exponent() const { return norm_->exponent(); }
  const MsNorm& norm() const { return *norm_; }

  double radial(const Eigen::VectorXd& x) const {
    const SquareMatrix& e = exponent();
    if (x.size() != static_cast<Eigen::Index>(e.order()))
      throw InvalidInput("point dimension does not match the matrix order");
    if (!x.allFinite()) throw InvalidInput("point has non-finite coordinates");
    const double xn = x.norm();
    if (xn == 0.0) return 0.0;
    if (e.order() == 1) {
      // ||t^{-a} x||_E = t^{-a} |x| / a in closed form.
      const double a = e(0, 0);
      return std::pow(std::abs(x(0)) / a, 1.0 / a);
    }
    return solve_log_radius(x);
  }

  PolarDecomposition decompose(const Eigen::VectorXd& x) const {
    PolarDecomposition out;
    out.radial = radial(x);
    if (out.radial > 0.0)
      out.direction = matrix_exp(-std::log(out.radial) * exponent().matrix()) * x;
    return out;
  }

 private:
  double solve_log_radius(const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd& e = exponent().matrix();
    double speed = 0.0;
    auto residual = [&](double s) {
      const Eigen::VectorXd y = matrix_exp(-s * e) * x;
      speed = y.norm();
      return (*norm_)(y)-1.0;
    };

    // Start from the exact answer for E = a I with a the mean real part, then
    // bracket with geometrically growing steps.
    const double mean_real = e.trace() / static_cast<double>(e.rows());
    const double guess = std::log((*norm_)(x)) / mean_real;
    double step = 0.125;
    double lo = guess;
    double hi = guess;
    const double g0 = residual(guess);
    if (g0 == 0.0) return std::exp(guess);
    int expansions = 0;
    if (g0 > 0.0) {
      hi = guess + step;
      while (residual(hi) > 0.0) {
        lo = hi;
        step *= 2.0;
        hi += step;
        if (++expansions > 200) throw NumericalError("tau bracketing failed after 200 expansions");
      }
    } else {
      lo = guess - step;
      while (residual(lo) <= 0.0) {
        hi = lo;
        step *= 2.0;
        lo -= step;
        if (++expansions > 200) throw NumericalError("tau bracketing failed after 200 expansions");
      }
    }

    double s = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      const double g = residual(s);
      if (g == 0.0) break;
      if (g > 0.0) lo = s; else hi = s;
      double next = s + g / speed;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const bool converged = std::abs(next - s) <= 1e-14 * std::max(1.0, std::abs(s)) ||
                             hi - lo <= 1e-13 * std::max(1.0, std::abs(s));
      s = next;
      if (converged) break;
    }
    return std::exp(s);
  }

  std::shared_ptr<const MsNorm> norm_;
};

inline PolarDecomposition tau(const SquareMatrix& e, const Eigen::VectorXd& x) {
  return PolarCoordinates(e).decompose(x);
}

enum class PsiVariant { tau_based, diagonal_closed_form };

inline const char* to_string(PsiVariant v) {
  return v == PsiVariant::tau_based ? "tau" : "diag";
}

inline PsiVariant parse_psi_variant(const std::string& s) {
  if (s == "tau" || s == "tau_based") return PsiVariant::tau_based;
  if (s == "diag" || s == "diagonal_closed_form") return PsiVariant::diagonal_closed_form;
  throw ConfigError("unknown psi variant '" + s + "' (expected tau or diag)");
}

/// Continuous, positive-off-the-origin function with psi(c^{E^T} x) = c psi(x).
class HomogeneousFunction {
 public:
  HomogeneousFunction(PsiVariant variant, const SquareMatrix& e) : variant_(variant), e_(e) {
    if (variant == PsiVariant::diagonal_closed_form) {
      if (!e.is_diagonal())
        throw ConfigError("diagonal closed-form psi requires a diagonal E");
      for (std::size_t j = 0; j < e.order(); ++j) {
        if (!(e(j, j) > 0.0)) throw ConfigError("diagonal closed-form psi needs positive diagonal");
        inverse_exponents_.push_back(1.0 / e(j, j));
      }
    } else {
      polar_ = std::make_shared<const PolarCoordinates>(e.transpose());
    }
  }

  PsiVariant variant() const { return variant_; }
  const SquareMatrix& exponent_matrix() const { return e_; }

  double operator()(const Eigen::VectorXd& xi) const {
    if (variant_ == PsiVariant::tau_based) return polar_->radial(xi);
    if (xi.size() != static_cast<Eigen::Index>(inverse_exponents_.size()))
      throw InvalidInput("point dimension does not match the matrix order");
    double s = 0.0;
    for (std::size_t j = 0; j < inverse_exponents_.size(); ++j)
      s += std::pow(std::abs(xi(static_cast<Eigen::Index>(j))), inverse_exponents_[j]);
    return s;
  }

 private:
  PsiVariant variant_;
  SquareMatrix e_;
  std::shared_ptr<const PolarCoordinates> polar_;
  std::vector<double> inverse_exponents_;
};

inline double psi_eval(const HomogeneousFunction& f, const Eigen::VectorXd& xi) { return f(xi); }

}  // namespace osrf
