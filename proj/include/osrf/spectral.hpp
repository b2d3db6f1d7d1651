#pragma once

// Matrix-exponential calculus and spectral validation for the exponent
// matrices E (acting on the index space R^d) and D (acting on the state
// space R^m).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "osrf/errors.hpp"

namespace osrf {

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace detail

/// Real square matrix with finite entries.
class SquareMatrix {
 public:
  SquareMatrix() = default;

  explicit SquareMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw InvalidInput("square matrix must have equal, positive row and column counts (got " +
                         std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) + ")");
    }
    if (!m_.allFinite()) throw InvalidInput("square matrix has non-finite entries");
  }

  static SquareMatrix from_row_major(std::size_t order, std::span<const double> entries) {
    if (order == 0) throw InvalidInput("matrix order must be positive");
    if (entries.size() != order * order) {
      throw InvalidInput("matrix of order " + std::to_string(order) + " needs " +
                         std::to_string(order * order) + " entries, got " +
                         std::to_string(entries.size()));
    }
    Eigen::MatrixXd m(order, order);
    for (std::size_t i = 0; i < order; ++i)
      for (std::size_t j = 0; j < order; ++j) m(i, j) = entries[i * order + j];
    return SquareMatrix(std::move(m));
  }

  static SquareMatrix identity(std::size_t order) {
    return SquareMatrix(Eigen::MatrixXd::Identity(order, order));
  }

  static SquareMatrix diagonal(std::span<const double> diag) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return SquareMatrix(std::move(m));
  }

  static SquareMatrix diagonal(std::initializer_list<double> diag) {
    return diagonal(std::span<const double>(diag.begin(), diag.size()));
  }

  std::size_t order() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  std::vector<double> row_major() const {
    std::vector<double> out;
    out.reserve(order() * order());
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      for (Eigen::Index j = 0; j < m_.cols(); ++j) out.push_back(m_(i, j));
    return out;
  }

  SquareMatrix transpose() const { return SquareMatrix(m_.transpose()); }
  SquareMatrix scaled(double beta) const { return SquareMatrix(beta * m_); }

  bool is_diagonal() const {
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      for (Eigen::Index j = 0; j < m_.cols(); ++j)
        if (i != j && m_(i, j) != 0.0) return false;
    return true;
  }

  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

namespace detail {

// Pade approximant of degree k to exp(A), coefficients b_0..b_k.
template <std::size_t N>
Eigen::MatrixXd pade_low(const Eigen::MatrixXd& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  Eigen::MatrixXd power = ident;
  Eigen::MatrixXd u_inner = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Eigen::MatrixXd u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

inline Eigen::MatrixXd pade13(const Eigen::MatrixXd& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                                  b[5] * a4 + b[3] * a2 + b[1] * ident;
  const Eigen::MatrixXd u = a * u_inner;
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                            b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(A) by scaling and squaring with a Pade core (Higham's degree
/// selection, backward error below unit roundoff).
inline Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& a) {
  if (a.rows() == 1) return Eigen::MatrixXd::Constant(1, 1, std::exp(a(0, 0)));

  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0,   30270240.0,   2162160.0,
                                                110880.0,      3960.0,       90.0,
                                                1.0};
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::MatrixXd result;
  if (norm1 <= 1.495585217958292e-2) {
    result = detail::pade_low(a, b3);
  } else if (norm1 <= 2.539398330063230e-1) {
    result = detail::pade_low(a, b5);
  } else if (norm1 <= 9.504178996162932e-1) {
    result = detail::pade_low(a, b7);
  } else if (norm1 <= 2.097847961257068) {
    result = detail::pade_low(a, b9);
  } else {
    constexpr double theta13 = 5.371920351148152;
    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    result = detail::pade13(a * std::ldexp(1.0, -squarings));
    for (int i = 0; i < squarings; ++i) result = result * result;
  }
  if (!result.allFinite()) throw NumericalError("matrix exponential overflowed");
  return result;
}

/// c^A = exp(A log c).
inline SquareMatrix matrix_power(const SquareMatrix& a, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("matrix power base must be finite and positive, got " + detail::num(c));
  }
  return SquareMatrix(matrix_exp(a.matrix() * std::log(c)));
}

/// Distinct eigenvalue real parts (ascending), their multiplicities and the trace.
struct SpectrumSummary {
  std::vector<double> real_parts;
  std::vector<int> multiplicities;
  double trace = 0.0;

  std::size_t groups() const { return real_parts.size(); }

  int order() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }

  /// Real parts repeated by multiplicity, ascending (lambda_1 <= ... <= lambda_m for D).
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (std::size_t g = 0; g < real_parts.size(); ++g)
      out.insert(out.end(), static_cast<std::size_t>(multiplicities[g]), real_parts[g]);
    return out;
  }

  /// sum_k a_k mu_k.
  double weighted_sum() const {
    double s = 0.0;
    for (std::size_t g = 0; g < real_parts.size(); ++g) s += real_parts[g] * multiplicities[g];
    return s;
  }

  double min_real_part() const { return real_parts.front(); }
  double max_real_part() const { return real_parts.back(); }

  SpectrumSummary scaled(double beta) const {
    SpectrumSummary out = *this;
    for (double& r : out.real_parts) r *= beta;
    out.trace *= beta;
    return out;
  }
};

inline constexpr double kDefaultClusterTolerance = 1e-9;

/// Eigenvalue real parts of A via a dense nonsymmetric eigensolver, grouped
/// into clusters whose consecutive members differ by at most
/// cluster_tol * max(1, |value|).
inline SpectrumSummary spectrum_summary(const SquareMatrix& a,
                                        double cluster_tol = kDefaultClusterTolerance) {
  if (!(cluster_tol > 0.0)) throw DomainError("cluster tolerance must be positive");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a.matrix(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge for matrix of order " +
                         std::to_string(a.order()) + " (Frobenius norm " +
                         detail::num(a.matrix().norm()) + ")");
  }
  std::vector<double> re;
  re.reserve(a.order());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    re.push_back(solver.eigenvalues()[i].real());
  std::sort(re.begin(), re.end());

  SpectrumSummary out;
  out.trace = a.matrix().trace();
  std::size_t start = 0;
  for (std::size_t i = 1; i <= re.size(); ++i) {
    const bool split = i == re.size() ||
                       re[i] - re[i - 1] > cluster_tol * std::max(1.0, std::abs(re[i]));
    if (!split) continue;
    double sum = 0.0;
    for (std::size_t k = start; k < i; ++k) sum += re[k];
    out.real_parts.push_back(sum / static_cast<double>(i - start));
    out.multiplicities.push_back(static_cast<int>(i - start));
    start = i;
  }
  if (std::abs(out.weighted_sum() - out.trace) > 1e-8 * std::max(1.0, std::abs(out.trace))) {
    throw NumericalError("eigenvalue real parts sum to " + detail::num(out.weighted_sum()) +
                         " but the trace is " + detail::num(out.trace));
  }
  return out;
}

/// Validated exponent pair (E, D) with lambda_m < 1 < a_1.
struct ExponentPair {
  SquareMatrix e;
  SquareMatrix d;
  SpectrumSummary spectrum_e;
  SpectrumSummary spectrum_d;

  std::size_t index_dim() const { return e.order(); }
  std::size_t state_dim() const { return d.order(); }
  /// q = trace(E).
  double q() const { return spectrum_e.trace; }
  /// lambda_1 <= ... <= lambda_m.
  std::vector<double> lambdas() const { return spectrum_d.expanded(); }
};

namespace detail {

inline void require_positive_spectrum(const SpectrumSummary& s, const char* name) {
  if (s.min_real_part() <= 0.0) {
    throw ValidationError(std::string("all eigenvalues of ") + name +
                          " must have positive real part; found real part " +
                          num(s.min_real_part()));
  }
}

}  // namespace detail

inline ExponentPair validate_pair(const SquareMatrix& e, const SquareMatrix& d) {
  ExponentPair pair{e, d, spectrum_summary(e), spectrum_summary(d)};
  detail::require_positive_spectrum(pair.spectrum_e, "E");
  detail::require_positive_spectrum(pair.spectrum_d, "D");
  const double a1 = pair.spectrum_e.min_real_part();
  const double lambda_m = pair.spectrum_d.max_real_part();
  if (!(a1 > 1.0)) {
    throw ValidationError("spectral condition lambda_m(D) < 1 < a_1(E) violated: a_1 = " +
                          detail::num(a1) + " <= 1 (normalize_pair can rescale jointly)");
  }
  if (!(lambda_m < 1.0)) {
    throw ValidationError("spectral condition lambda_m(D) < 1 < a_1(E) violated: lambda_m = " +
                          detail::num(lambda_m) + " >= 1 (normalize_pair can rescale jointly)");
  }
  return pair;
}

struct NormalizedPair {
  SquareMatrix e;
  SquareMatrix d;
  double beta = 1.0;
};

/// Joint rescale (E, D) -> (beta E, beta D) with beta = 1 / sqrt(a_1 lambda_m),
/// the geometric midpoint placing 1 between beta lambda_m and beta a_1.
inline NormalizedPair normalize_pair(const SquareMatrix& e, const SquareMatrix& d) {
  const SpectrumSummary se = spectrum_summary(e);
  const SpectrumSummary sd = spectrum_summary(d);
  detail::require_positive_spectrum(se, "E");
  detail::require_positive_spectrum(sd, "D");
  const double a1 = se.min_real_part();
  const double lambda_m = sd.max_real_part();
  if (!(lambda_m < a1)) {
    throw ValidationError("normalization impossible: lambda_m(D) = " + detail::num(lambda_m) +
                          " is not below a_1(E) = " + detail::num(a1));
  }
  const double beta = 1.0 / std::sqrt(a1 * lambda_m);
  return {e.scaled(beta), d.scaled(beta), beta};
}

}  // namespace osrf
