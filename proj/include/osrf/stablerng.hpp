#pragma once

// Symmetric and totally skewed alpha-stable draws, and isotropic complex
// alpha-stable vectors, from counter-based per-cell streams.
//
// Scale convention everywhere: a SaS variable with scale sigma has
// characteristic function exp(-sigma^alpha |theta|^alpha).

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "osrf/errors.hpp"
#include "osrf/spectral.hpp"

namespace osrf {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u;
  constexpr std::uint32_t m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += w0;
      key[1] += w1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Deterministic stream identified by (seed, stream_id). The Philox key is the
/// seed and the counter is (block index, stream_id), so streams are
/// independent of creation order and of thread scheduling.
class SeededStream {
 public:
  using result_type = std::uint64_t;

  SeededStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  result_type operator()() {
    if (used_ == 2) refill();
    return buffer_[used_++];
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform()); }

  /// Standard normal (Box-Muller, both variates used).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(ctr, key);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    used_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct StableParams {
  double alpha = 2.0;
  double scale = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
      throw DomainError("stability index must lie in (0, 2], got " + detail::num(alpha));
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw DomainError("stable scale must be positive, got " + detail::num(scale));
  }
};

/// One SaS draw by the Chambers-Mallows-Stuck transform; alpha = 2 gives
/// N(0, 2 sigma^2).
inline double sas_scalar(const StableParams& p, SeededStream& s) {
  p.validate();
  if (p.alpha == 2.0) return p.scale * std::numbers::sqrt2 * s.gaussian();
  const double v = std::numbers::pi * (s.uniform() - 0.5);
  if (p.alpha == 1.0) return p.scale * std::tan(v);
  const double w = s.exponential();
  const double a = p.alpha;
  return p.scale * std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
}

/// Positive, totally skewed stable draw with Laplace transform
/// E exp(-s A) = exp(-s^alpha_half) (Kanter's representation). For a
/// standard Gaussian G, sqrt(2 A) sigma G is then SaS(alpha = 2 alpha_half)
/// with scale sigma.
inline double positive_stable(double alpha_half, SeededStream& s) {
  if (!(alpha_half > 0.0 && alpha_half < 1.0))
    throw DomainError("positive stable index must lie in (0, 1), got " + detail::num(alpha_half));
  const double b = alpha_half;
  const double u = std::numbers::pi * s.uniform();
  const double w = s.exponential();
  const double log_a = std::log(std::sin(b * u)) - std::log(std::sin(u)) / b +
                       (1.0 - b) / b * (std::log(std::sin((1.0 - b) * u)) - std::log(w));
  return std::exp(log_a);
}

/// zeta = sigma sqrt(2 A) (G + i G') with one shared positive (alpha/2)-stable
/// A (A = 1 for alpha = 2) and independent standard Gaussian m-vectors G, G'.
/// For real Q1, Q2 and Q = Q1 + i Q2 the projection <theta, Re(Q zeta)> has
/// characteristic function exp(-sigma^alpha (||Q1^T theta||^2 + ||Q2^T theta||^2)^(alpha/2)).
inline void isotropic_complex_vector(const StableParams& p, SeededStream& s,
                                     std::span<std::complex<double>> out) {
  p.validate();
  if (out.empty()) throw DomainError("complex stable vector needs dimension >= 1");
  const double mix = p.alpha == 2.0 ? 1.0 : positive_stable(0.5 * p.alpha, s);
  const double factor = p.scale * std::sqrt(2.0 * mix);
  for (auto& z : out) {
    const double re = s.gaussian();
    const double im = s.gaussian();
    z = {factor * re, factor * im};
  }
}

inline std::vector<std::complex<double>> isotropic_complex_vector(const StableParams& p,
                                                                  std::size_t m,
                                                                  SeededStream& s) {
  if (m < 1) throw DomainError("complex stable vector needs dimension >= 1");
  std::vector<std::complex<double>> out(m);
  isotropic_complex_vector(p, s, out);
  return out;
}

}  // namespace osrf
