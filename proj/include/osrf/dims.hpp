#pragma once

// Hausdorff dimensions of the range X([0,1]^d) and of the graph
// Gr X([0,1]^d), each in its min form and its case-split form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "osrf/errors.hpp"
#include "osrf/spectral.hpp"

namespace osrf {

inline constexpr double kDimensionAgreement = 1e-9;

struct DimensionForms {
  double min_form = 0.0;
  double case_form = 0.0;
  /// Which case fired, e.g. "full" or "l=2".
  std::string branch;
};

struct DimensionReport {
  double range_dim_min_form = 0.0;
  double range_dim_case_form = 0.0;
  double graph_dim_min_form = 0.0;
  double graph_dim_case_form = 0.0;
  std::string range_branch;
  std::string graph_branch;
};

namespace detail {

struct SpectralSums {
  std::vector<double> a;       // ascending real parts of E
  std::vector<double> mu;      // their multiplicities
  std::vector<double> lambda;  // lambda_1 <= ... <= lambda_m
  double q = 0.0;              // sum_k a_k mu_k
};

inline SpectralSums spectral_sums(const SpectrumSummary& e, const SpectrumSummary& d) {
  SpectralSums s;
  s.a = e.real_parts;
  for (int mult : e.multiplicities) s.mu.push_back(mult);
  s.lambda = d.expanded();
  s.q = e.weighted_sum();
  if (s.a.empty() || s.lambda.empty() || s.a.front() <= 0.0 || s.lambda.front() <= 0.0)
    throw ValidationError("dimension formulas need spectra with positive real parts");
  return s;
}

/// (q + sum_{i<=j} (lambda_j - lambda_i)) / lambda_j, zero-based j.
inline double range_term(const SpectralSums& s, std::size_t j) {
  double acc = s.q;
  for (std::size_t i = 0; i <= j; ++i) acc += s.lambda[j] - s.lambda[i];
  return acc / s.lambda[j];
}

/// Graph term for zero-based l, with a~_j = a_{p-j+1} (descending).
inline double graph_term(const SpectralSums& s, std::size_t l) {
  const std::size_t p = s.a.size();
  auto at = [&](std::size_t j) { return s.a[p - 1 - j]; };
  auto mt = [&](std::size_t j) { return s.mu[p - 1 - j]; };
  double acc = 0.0;
  for (std::size_t j = 0; j <= l; ++j) acc += at(j) / at(l) * mt(j);
  for (std::size_t j = l + 1; j < p; ++j) acc += mt(j);
  for (double lam : s.lambda) acc += 1.0 - lam / at(l);
  return acc;
}

}  // namespace detail

inline DimensionForms range_dimension(const SpectrumSummary& e, const SpectrumSummary& d) {
  const detail::SpectralSums s = detail::spectral_sums(e, d);
  const std::size_t m = s.lambda.size();
  DimensionForms out;
  out.min_form = static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) out.min_form = std::min(out.min_form, detail::range_term(s, j));

  double partial = 0.0;
  for (double lam : s.lambda) partial += lam;
  if (partial < s.q) {
    out.case_form = static_cast<double>(m);
    out.branch = "full";
    return out;
  }
  // sum_{i<l} lambda_i < q <= sum_{i<=l} lambda_i; ties resolve to the min form.
  partial = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    const double next = partial + s.lambda[l];
    if (partial < s.q && s.q <= next) {
      out.case_form = detail::range_term(s, l);
      out.branch = "l=" + std::to_string(l + 1);
      return out;
    }
    partial = next;
  }
  throw NumericalError("range dimension: no case of the split applies");
}

inline DimensionForms graph_dimension(const SpectrumSummary& e, const SpectrumSummary& d) {
  const detail::SpectralSums s = detail::spectral_sums(e, d);
  const std::size_t m = s.lambda.size();
  const std::size_t p = s.a.size();
  DimensionForms out;
  out.min_form = INFINITY;
  for (std::size_t j = 0; j < m; ++j) out.min_form = std::min(out.min_form, detail::range_term(s, j));
  for (std::size_t l = 0; l < p; ++l) out.min_form = std::min(out.min_form, detail::graph_term(s, l));

  double lambda_sum = 0.0;
  for (double lam : s.lambda) lambda_sum += lam;
  if (s.q <= lambda_sum) {
    const DimensionForms range = range_dimension(e, d);
    out.case_form = range.case_form;
    out.branch = "range";
    return out;
  }
  double partial = 0.0;
  for (std::size_t l = 0; l < p; ++l) {
    const double next = partial + s.a[p - 1 - l] * s.mu[p - 1 - l];
    if (partial <= lambda_sum && lambda_sum < next) {
      out.case_form = detail::graph_term(s, l);
      out.branch = "l=" + std::to_string(l + 1);
      return out;
    }
    partial = next;
  }
  throw NumericalError("graph dimension: no case of the split applies");
}

/// Both dimensions in both forms; a disagreement between the forms beyond
/// 1e-9 is an internal inconsistency.
inline DimensionReport dimension_report(const SpectrumSummary& e, const SpectrumSummary& d) {
  const DimensionForms range = range_dimension(e, d);
  const DimensionForms graph = graph_dimension(e, d);
  if (std::abs(range.min_form - range.case_form) > kDimensionAgreement ||
      std::abs(graph.min_form - graph.case_form) > kDimensionAgreement) {
    throw NumericalError("dimension forms disagree: range " + detail::num(range.min_form) + " vs " +
                         detail::num(range.case_form) + ", graph " + detail::num(graph.min_form) +
                         " vs " + detail::num(graph.case_form));
  }
  return {range.min_form, range.case_form, graph.min_form, graph.case_form, range.branch, graph.branch};
}

inline DimensionReport dimension_report(const ExponentPair& pair) {
  return dimension_report(pair.spectrum_e, pair.spectrum_d);
}

}  // namespace osrf
