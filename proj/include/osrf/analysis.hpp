#pragma once

// Empirical checks on simulated fields: characteristic functions, the
// operator scaling law, box-counting dimensions and the modulus of
// continuity statistic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "osrf/errors.hpp"
#include "osrf/fieldsim.hpp"
#include "osrf/polar.hpp"
#include "osrf/spectral.hpp"

namespace osrf {

inline constexpr std::size_t kMinCfSamples = 100;
inline constexpr double kDefaultCfAllowance = 0.02;

struct CFProbe {
  Eigen::VectorXd theta;
  std::complex<double> empirical;
  /// Standard error of the complex mean: sqrt((var cos + var sin) / N).
  double std_error = 0.0;
  std::optional<double> theoretical_exponent;

  double discrepancy() const {
    return theoretical_exponent ? std::abs(empirical - std::exp(-*theoretical_exponent)) : NAN;
  }
};

/// samples: N x m, one realization per row.
inline CFProbe empirical_cf(const Eigen::MatrixXd& samples, const Eigen::VectorXd& theta,
                            std::optional<double> theoretical_exponent = std::nullopt) {
  if (static_cast<std::size_t>(samples.rows()) < kMinCfSamples)
    throw StatisticalError("empirical CF needs at least " + std::to_string(kMinCfSamples) +
                           " samples, got " + std::to_string(samples.rows()));
  if (samples.cols() != theta.size()) throw InvalidInput("theta dimension does not match the samples");
  const double n = static_cast<double>(samples.rows());
  double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double phase = samples.row(i).dot(theta);
    const double c = std::cos(phase), s = std::sin(phase);
    sc += c;
    ss += s;
    sc2 += c * c;
    ss2 += s * s;
  }
  const double mc = sc / n, ms = ss / n;
  const double var = std::max(0.0, sc2 / n - mc * mc) + std::max(0.0, ss2 / n - ms * ms);
  return {theta, {mc, ms}, std::sqrt(var / n), theoretical_exponent};
}

/// Rows of the per-realization matrices for one evaluation point.
inline Eigen::MatrixXd stack_point(const std::vector<Eigen::MatrixXd>& values, std::size_t point) {
  if (values.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(values.size()), values.front().cols());
  for (std::size_t r = 0; r < values.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = values[r].row(static_cast<Eigen::Index>(point));
  return out;
}

struct MonteCarloOptions {
  std::size_t realizations = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
  double allowance = kDefaultCfAllowance;
};

struct CfCheckProbe {
  Eigen::VectorXd point;
  CFProbe probe;
  double tolerance = 0.0;
  bool pass = false;
};

struct CfCheckReport {
  std::vector<CfCheckProbe> probes;
  double max_discrepancy = 0.0;
  bool pass = true;
};

/// Empirical CF of X(t) against exp(-exponent_quadrature) at every (t, theta),
/// each within 3 standard errors plus the discretization allowance.
inline CfCheckReport cf_check(const FrequencyPlan& plan, const std::vector<Eigen::VectorXd>& points,
                              const std::vector<Eigen::VectorXd>& thetas, const MonteCarloOptions& opt,
                              CfConvention convention = CfConvention::transpose) {
  const ExponentQuadrature quad(plan);
  const auto values = simulate_at(plan, points, opt.realizations, opt.seed, opt.threads);
  CfCheckReport report;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::MatrixXd samples = stack_point(values, i);
    for (const auto& theta : thetas) {
      CfCheckProbe p{points[i], empirical_cf(samples, theta, quad(points[i], theta, convention))};
      p.tolerance = 3.0 * p.probe.std_error + opt.allowance;
      p.pass = p.probe.discrepancy() <= p.tolerance;
      report.max_discrepancy = std::max(report.max_discrepancy, p.probe.discrepancy());
      report.pass = report.pass && p.pass;
      report.probes.push_back(std::move(p));
    }
  }
  return report;
}

struct ScalingProbe {
  Eigen::VectorXd point;
  Eigen::VectorXd theta;
  std::complex<double> cf_scaled_point;      // E exp(i <theta, X(c^E t)>)
  std::complex<double> cf_scaled_value;      // E exp(i <theta, c^D X(t)>)
  double discrepancy = 0.0;
  double tolerance = 0.0;
  std::optional<double> quadrature_lhs;      // exponent at (c^E t, theta)
  std::optional<double> quadrature_rhs;      // exponent at (t, c^{D^T} theta)
};

struct ScalingReport {
  double c = 1.0;
  std::vector<ScalingProbe> probes;
  double max_discrepancy = 0.0;
  std::optional<double> max_quadrature_relative_gap;
  bool pass = true;
};

inline bool inside_unit_cube(const Eigen::VectorXd& x) {
  return (x.array() >= -1e-12).all() && (x.array() <= 1.0 + 1e-12).all();
}

/// Compares X(c^E t) with c^D X(t) in distribution through paired empirical
/// CFs over the same realizations; optionally also the deterministic identity
/// exponent(c^E t, theta) = exponent(t, c^{D^T} theta) on the refined lattice.
inline ScalingReport scaling_check(const FrequencyPlan& plan, double c, const std::vector<Eigen::VectorXd>& points,
                                   const std::vector<Eigen::VectorXd>& thetas, const MonteCarloOptions& opt,
                                   bool with_quadrature = true) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("scaling factor c must be positive, got " + detail::num(c));
  const Eigen::MatrixXd ce = matrix_power(plan.pair().e, c).matrix();
  const Eigen::MatrixXd cd = matrix_power(plan.pair().d, c).matrix();
  std::vector<Eigen::VectorXd> all = points;
  for (const auto& t : points) {
    if (!inside_unit_cube(t)) throw DomainError("scaling test point lies outside [0,1]^d");
    const Eigen::VectorXd scaled = ce * t;
    if (!inside_unit_cube(scaled)) throw DomainError("scaled test point c^E t lies outside [0,1]^d");
    all.push_back(scaled);
  }
  const auto values = simulate_at(plan, all, opt.realizations, opt.seed, opt.threads);
  std::optional<ExponentQuadrature> quad;
  if (with_quadrature) quad.emplace(plan);

  ScalingReport report;
  report.c = c;
  const double n = static_cast<double>(opt.realizations);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::MatrixXd base = stack_point(values, i);
    const Eigen::MatrixXd moved = stack_point(values, i + points.size());
    const Eigen::MatrixXd transformed = base * cd.transpose();
    for (const auto& theta : thetas) {
      ScalingProbe p{points[i], theta};
      double ac = 0.0, as = 0.0, bc = 0.0, bs = 0.0, dc2 = 0.0, ds2 = 0.0;
      for (Eigen::Index r = 0; r < moved.rows(); ++r) {
        const double pa = moved.row(r).dot(theta);
        const double pb = transformed.row(r).dot(theta);
        const double dc = std::cos(pa) - std::cos(pb), ds = std::sin(pa) - std::sin(pb);
        ac += std::cos(pa);
        as += std::sin(pa);
        bc += std::cos(pb);
        bs += std::sin(pb);
        dc2 += dc * dc;
        ds2 += ds * ds;
      }
      p.cf_scaled_point = {ac / n, as / n};
      p.cf_scaled_value = {bc / n, bs / n};
      const std::complex<double> diff = p.cf_scaled_point - p.cf_scaled_value;
      const double var = std::max(0.0, dc2 / n - diff.real() * diff.real()) +
                         std::max(0.0, ds2 / n - diff.imag() * diff.imag());
      p.discrepancy = std::abs(diff);
      p.tolerance = 3.0 * std::sqrt(var / n) + opt.allowance;
      if (quad) {
        p.quadrature_lhs = (*quad)(ce * points[i], theta);
        p.quadrature_rhs = (*quad)(points[i], cd.transpose() * theta);
        const double gap = *p.quadrature_rhs > 0.0
                               ? std::abs(*p.quadrature_lhs / *p.quadrature_rhs - 1.0)
                               : std::abs(*p.quadrature_lhs - *p.quadrature_rhs);
        report.max_quadrature_relative_gap = std::max(report.max_quadrature_relative_gap.value_or(0.0), gap);
      }
      report.max_discrepancy = std::max(report.max_discrepancy, p.discrepancy);
      report.pass = report.pass && p.discrepancy <= p.tolerance;
      report.probes.push_back(std::move(p));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Box counting

/// Inclusive range of dyadic levels used in the fit.
struct ScaleWindow {
  int lo = 0;
  int hi = 0;
};

/// Drops the coarsest sixth and the finest third of levels 0..L.
inline ScaleWindow default_window(int levels) {
  const int total = levels + 1;
  return {total / 6, levels - total / 3};
}

struct BoxDimFit {
  /// epsilon_l = 2^{-l} in units of the per-coordinate span, l = 0..L.
  std::vector<double> scales;
  std::vector<double> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  ScaleWindow window;
  bool degenerate = false;
};

namespace detail {

inline void fit_counts(BoxDimFit& fit) {
  const int lo = fit.window.lo, hi = fit.window.hi;
  const double k = hi - lo + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int l = lo; l <= hi; ++l) {
    const double x = l * std::numbers::ln2;
    const double y = std::log(fit.counts[static_cast<std::size_t>(l)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / k, vy = syy - sy * sy / k, cxy = sxy - sx * sy / k;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / k;
  fit.r_squared = vy > 0.0 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
}

inline ScaleWindow checked_window(int levels, std::optional<ScaleWindow> window) {
  const ScaleWindow w = window.value_or(default_window(levels));
  if (w.lo < 0 || w.hi > levels || w.hi - w.lo < 1)
    throw InvalidInput("box-counting window must contain at least two levels within 0.." + std::to_string(levels));
  return w;
}

}  // namespace detail

inline constexpr std::size_t kMinBoxPoints = 1024;

/// Occupied-box counts of a point cloud (N x k) after mapping each coordinate
/// onto [0,1] by its own span, at epsilon = 2^{-l}, l = 0..levels.
inline BoxDimFit box_dimension(const Eigen::MatrixXd& points, int levels,
                               std::optional<ScaleWindow> window = std::nullopt) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto k = static_cast<std::size_t>(points.cols());
  if (n < kMinBoxPoints)
    throw StatisticalError("box counting needs at least " + std::to_string(kMinBoxPoints) + " points, got " +
                           std::to_string(n));
  if (k < 1 || levels < 1 || static_cast<std::size_t>(levels) * k > 63)
    throw InvalidInput("box counting needs 1 <= levels and levels * dimension <= 63");
  if (!points.allFinite()) throw InvalidInput("box counting needs finite coordinates");

  BoxDimFit fit;
  fit.window = detail::checked_window(levels, window);
  const Eigen::RowVectorXd lo = points.colwise().minCoeff();
  const Eigen::RowVectorXd span = points.colwise().maxCoeff() - lo;
  fit.scales.resize(static_cast<std::size_t>(levels) + 1);
  fit.counts.resize(static_cast<std::size_t>(levels) + 1);
  if ((span.array() <= 0.0).all()) {
    fit.degenerate = true;
    for (int l = 0; l <= levels; ++l) {
      fit.scales[static_cast<std::size_t>(l)] = std::ldexp(1.0, -l);
      fit.counts[static_cast<std::size_t>(l)] = 1.0;
    }
    return fit;
  }
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l <= levels; ++l) {
    const auto cells = static_cast<std::uint64_t>(1) << l;
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t key = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double s = span(static_cast<Eigen::Index>(c));
        const double u = s > 0.0 ? (points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) -
                                    lo(static_cast<Eigen::Index>(c))) / s
                                 : 0.0;
        const auto idx = std::min<std::uint64_t>(static_cast<std::uint64_t>(u * static_cast<double>(cells)), cells - 1);
        key = (key << l) | idx;
      }
      keys[i] = key;
    }
    std::sort(keys.begin(), keys.end());
    fit.scales[static_cast<std::size_t>(l)] = std::ldexp(1.0, -l);
    fit.counts[static_cast<std::size_t>(l)] =
        static_cast<double>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  detail::fit_counts(fit);
  return fit;
}

/// Point cloud {X(x_i)} (range) or {(x_i, X(x_i))} (graph) of one sample.
inline Eigen::MatrixXd range_points(const FieldSample& s) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(s.point_count()), static_cast<Eigen::Index>(s.state_dim));
  for (std::size_t i = 0; i < s.point_count(); ++i)
    for (std::size_t j = 0; j < s.state_dim; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.component(i, j);
  return out;
}

inline Eigen::MatrixXd graph_points(const FieldSample& s) {
  const auto d = static_cast<Eigen::Index>(s.index_dim);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(s.point_count()), d + static_cast<Eigen::Index>(s.state_dim));
  for (std::size_t i = 0; i < s.point_count(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out.row(row).head(d) = s.point(i).transpose();
    for (std::size_t j = 0; j < s.state_dim; ++j) out(row, d + static_cast<Eigen::Index>(j)) = s.component(i, j);
  }
  return out;
}

/// Box counts of the graph of the piecewise-linear interpolant of a scalar
/// path on [0,1]: each column of width 2^{-l} needs as many boxes as the
/// vertical extent of the path over that column spans. The path values are
/// mapped onto [0,1] by their span, as in box_dimension.
inline BoxDimFit graph_box_dimension(const FieldSample& s, std::size_t component, int levels,
                                     std::optional<ScaleWindow> window = std::nullopt) {
  if (s.index_dim != 1) throw InvalidInput("interpolated graph counting is defined for d = 1");
  if (component >= s.state_dim) throw InvalidInput("component index out of range");
  const std::size_t n = s.resolution;
  if (n + 1 < kMinBoxPoints)
    throw StatisticalError("box counting needs at least " + std::to_string(kMinBoxPoints) + " points");
  if (levels < 1 || (std::size_t{1} << levels) > n || n % (std::size_t{1} << levels) != 0)
    throw InvalidInput("graph box counting needs 2^levels to divide the resolution");

  BoxDimFit fit;
  fit.window = detail::checked_window(levels, window);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = s.component(i, component);
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double lo = *mn, span = *mx - *mn;
  fit.scales.resize(static_cast<std::size_t>(levels) + 1);
  fit.counts.resize(static_cast<std::size_t>(levels) + 1);
  for (int l = 0; l <= levels; ++l) {
    const std::size_t columns = std::size_t{1} << l;
    const std::size_t width = n / columns;
    const double cells = static_cast<double>(columns);
    double count = 0.0;
    for (std::size_t c = 0; c < columns; ++c) {
      double a = v[c * width], b = a;
      for (std::size_t i = c * width; i <= (c + 1) * width; ++i) {
        a = std::min(a, v[i]);
        b = std::max(b, v[i]);
      }
      if (span <= 0.0) {
        count += 1.0;
        continue;
      }
      const double top = std::min(std::floor((b - lo) / span * cells), cells - 1.0);
      const double bottom = std::min(std::floor((a - lo) / span * cells), cells - 1.0);
      count += top - bottom + 1.0;
    }
    fit.scales[static_cast<std::size_t>(l)] = std::ldexp(1.0, -l);
    fit.counts[static_cast<std::size_t>(l)] = count;
  }
  fit.degenerate = span <= 0.0;
  detail::fit_counts(fit);
  return fit;
}

struct EstimateSummary {
  std::vector<double> values;
  double mean = 0.0;
  double median = 0.0;
};

inline EstimateSummary summarize(std::vector<double> values) {
  EstimateSummary s;
  s.values = values;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

// ---------------------------------------------------------------------------
// Modulus of continuity

struct ModulusStatistic {
  std::size_t component = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double value = 0.0;
  /// Dyadic level at which the supremum was attained.
  int argmax_level = 0;
};

/// lambda_j for component j, read off the diagonal of D. This is the
/// eigenvalue real part attached to component j when D is in real canonical
/// form, which the statistic requires.
inline std::vector<double> component_exponents(const ExponentPair& pair) {
  const std::size_t m = pair.state_dim();
  std::vector<double> diag(m);
  for (std::size_t j = 0; j < m; ++j) diag[j] = pair.d(j, j);
  std::vector<double> sorted = diag;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<double> expected = pair.spectrum_d.expanded();
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(sorted[j] - expected[j]) > 1e-9 * std::max(1.0, std::abs(expected[j])))
      throw DomainError("modulus statistic needs D in real canonical form (diagonal entries must be the eigenvalue real parts)");
  }
  return diag;
}

enum class PairSet { dyadic, all };

/// Grid size limit for PairSet::all.
inline constexpr std::size_t kMaxAllPairsPoints = 1025;

namespace detail {

/// All unordered pairs of grid points; tau_E is cached per integer offset.
inline void modulus_all_pairs(const FieldSample& s, const PolarCoordinates& polar, const std::vector<double>& lambdas,
                              double epsilon, double log_power, std::vector<ModulusStatistic>& out) {
  const std::size_t d = s.index_dim;
  const std::size_t n = s.resolution;
  const std::size_t span = 2 * n + 1;
  std::vector<double> tau_cache(ipow(span, d), -1.0);
  for (std::size_t a = 0; a < s.point_count(); ++a) {
    for (std::size_t b = a + 1; b < s.point_count(); ++b) {
      std::size_t key = 0;
      long widest = 0;
      Eigen::VectorXd gap(static_cast<Eigen::Index>(d));
      for (std::size_t r = d; r-- > 0;) {
        const long off = static_cast<long>(s.grid_index(b, r)) - static_cast<long>(s.grid_index(a, r));
        key = key * span + static_cast<std::size_t>(off + static_cast<long>(n));
        gap(static_cast<Eigen::Index>(r)) = static_cast<double>(off) / static_cast<double>(n);
        widest = std::max(widest, std::abs(off));
      }
      double& t = tau_cache[key];
      if (t < 0.0) t = polar.radial(gap);
      const double log_term = std::pow(std::log1p(1.0 / t), log_power);
      for (std::size_t j = 0; j < s.state_dim; ++j) {
        const double value = std::abs(s.component(b, j) - s.component(a, j)) /
                             (std::pow(t, lambdas[j] - epsilon) * log_term);
        if (value > out[j].value) {
          out[j].value = value;
          out[j].argmax_level = static_cast<int>(std::floor(std::log2(static_cast<double>(n) / widest)));
        }
      }
    }
  }
}

}  // namespace detail

/// sup over the pair set of
///   |X_j(u) - X_j(v)| / (tau_E(u-v)^{lambda_j - eps} log(1 + 1/tau_E(u-v))^{delta + 1/2 + 1/alpha}).
/// The dyadic set holds the neighbor pairs (u, u + 2^{-l} e_r); tau_E(u - v)
/// depends only on (l, r), so it is computed once per pair class.
inline std::vector<ModulusStatistic> modulus_statistic(const FieldSample& s, const ExponentPair& pair, double alpha,
                                                       double epsilon, double delta,
                                                       PairSet pairs = PairSet::dyadic) {
  detail::check_alpha(alpha);
  if (s.index_dim != pair.index_dim() || s.state_dim != pair.state_dim())
    throw InvalidInput("sample dimensions do not match the exponent pair");
  const std::size_t n = s.resolution;
  if (pairs == PairSet::dyadic && (n < 2 || (n & (n - 1)) != 0))
    throw InvalidInput("modulus statistic needs a dyadic lattice (n a power of two)");
  if (pairs == PairSet::all && (n < 1 || s.point_count() > kMaxAllPairsPoints))
    throw InvalidInput("all-pairs modulus statistic is limited to " + std::to_string(kMaxAllPairsPoints) +
                       " grid points, got " + std::to_string(s.point_count()));
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const std::vector<double> lambdas = component_exponents(pair);
  for (double lam : lambdas) {
    if (!(lam - epsilon > 0.0))
      throw DomainError("modulus exponent lambda_j - epsilon = " + detail::num(lam - epsilon) + " must be positive");
  }
  const PolarCoordinates polar(pair.e);
  const std::size_t d = s.index_dim;
  const std::size_t side = s.points_per_axis();
  const double log_power = delta + 0.5 + 1.0 / alpha;

  std::vector<ModulusStatistic> out(s.state_dim);
  for (std::size_t j = 0; j < s.state_dim; ++j) out[j] = {j, epsilon, delta, 0.0, 0};
  if (pairs == PairSet::all) {
    detail::modulus_all_pairs(s, polar, lambdas, epsilon, log_power, out);
    return out;
  }

  for (int l = 1; (std::size_t{1} << l) <= n; ++l) {
    const std::size_t step = n >> l;
    for (std::size_t r = 0; r < d; ++r) {
      Eigen::VectorXd gap = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
      gap(static_cast<Eigen::Index>(r)) = std::ldexp(1.0, -l);
      const double t = polar.radial(gap);
      const double log_term = std::pow(std::log1p(1.0 / t), log_power);
      const std::size_t stride = detail::ipow(side, r);
      for (std::size_t j = 0; j < s.state_dim; ++j) {
        const double denom = std::pow(t, lambdas[j] - epsilon) * log_term;
        double best = 0.0;
        for (std::size_t i = 0; i < s.point_count(); ++i) {
          if (s.grid_index(i, r) + step >= side) continue;
          best = std::max(best, std::abs(s.component(i + step * stride, j) - s.component(i, j)));
        }
        const double value = best / denom;
        if (value > out[j].value) {
          out[j].value = value;
          out[j].argmax_level = l;
        }
      }
    }
  }
  return out;
}

/// Every other grid point of a sample at resolution 2n: the same realization
/// at resolution n.
inline FieldSample coarsen(const FieldSample& fine) {
  if (fine.resolution % 2 != 0) throw InvalidInput("coarsening needs an even resolution");
  FieldSample out = fine;
  out.resolution = fine.resolution / 2;
  out.values.assign(out.point_count() * out.state_dim, 0.0);
  for (std::size_t i = 0; i < out.point_count(); ++i) {
    std::size_t fi = 0;
    for (std::size_t a = out.index_dim; a-- > 0;) fi = fi * fine.points_per_axis() + 2 * out.grid_index(i, a);
    for (std::size_t j = 0; j < out.state_dim; ++j) out.values[i * out.state_dim + j] = fine.component(fi, j);
  }
  return out;
}

struct DoublingRatios {
  /// ratios[r][j]: statistic at 2n over statistic at n for realization r, component j.
  std::vector<std::vector<double>> ratios;
  double fraction_within(double lo, double hi) const {
    std::size_t inside = 0, total = 0;
    for (const auto& row : ratios)
      for (double v : row) {
        ++total;
        inside += (v >= lo && v <= hi) ? 1 : 0;
      }
    return total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
  }
};

/// Simulates at resolution 2n and compares the statistic with the one on
/// the coarsened grid of resolution n of the same realization.
inline DoublingRatios modulus_doubling(const FrequencyPlan& plan, std::size_t n, double epsilon, double delta,
                                       const SimulationOptions& base) {
  SimulationOptions opt = base;
  opt.resolution = 2 * n;
  const auto samples = simulate(plan, opt);
  DoublingRatios out;
  for (const FieldSample& fine : samples) {
    const auto hi = modulus_statistic(fine, plan.pair(), plan.alpha(), epsilon, delta);
    const auto lo = modulus_statistic(coarsen(fine), plan.pair(), plan.alpha(), epsilon, delta);
    std::vector<double> row;
    for (std::size_t j = 0; j < hi.size(); ++j) row.push_back(hi[j].value / lo[j].value);
    out.ratios.push_back(std::move(row));
  }
  return out;
}

}  // namespace osrf
