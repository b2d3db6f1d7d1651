#pragma once

// Riemann-sum discretization of the harmonizable representation
//   X(x) = Re sum_k (e^{i<x, y_k>} - 1) psi(y_k)^{-D - (q/alpha) I} |cell|^{1/alpha} zeta_k
// on the rectangular frequency lattice {h z : 0 < ||h z||_inf <= R}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>
#include <omp.h>

#include "osrf/errors.hpp"
#include "osrf/polar.hpp"
#include "osrf/spectral.hpp"
#include "osrf/stablerng.hpp"

namespace osrf {

inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 24;

inline int resolve_threads(int threads) {
  return threads > 0 ? threads : std::max(1, omp_get_max_threads());
}

class FrequencyPlan {
 public:
  const ExponentPair& pair() const { return pair_; }
  const HomogeneousFunction& psi_function() const { return psi_; }
  std::size_t index_dim() const { return pair_.index_dim(); }
  std::size_t state_dim() const { return pair_.state_dim(); }
  double alpha() const { return alpha_; }
  double spacing() const { return spacing_; }
  double radius() const { return radius_; }
  double cutoff_low() const { return spacing_; }
  double cutoff_high() const { return radius_; }
  double volume() const { return volume_; }
  /// Largest |z_i| on the lattice.
  std::int64_t half_width() const { return half_width_; }
  std::size_t cell_count() const { return psi_values_.size(); }

  std::span<const std::int32_t> lattice_index(std::size_t k) const {
    return {index_.data() + k * index_dim(), index_dim()};
  }
  Eigen::VectorXd center(std::size_t k) const {
    Eigen::VectorXd y(index_dim());
    for (std::size_t i = 0; i < index_dim(); ++i) y(i) = spacing_ * index_[k * index_dim() + i];
    return y;
  }
  double psi(std::size_t k) const { return psi_values_[k]; }
  /// psi(y_k)^{-D - (q/alpha) I}, column-major m x m.
  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t k) const {
    const auto m = static_cast<Eigen::Index>(state_dim());
    return {weights_.data() + k * state_dim() * state_dim(), m, m};
  }

 private:
  FrequencyPlan(ExponentPair pair, HomogeneousFunction psi) : pair_(std::move(pair)), psi_(std::move(psi)) {}

  ExponentPair pair_;
  HomogeneousFunction psi_;
  double alpha_ = 2.0;
  double spacing_ = 0.0;
  double radius_ = 0.0;
  double volume_ = 0.0;
  std::int64_t half_width_ = 0;
  std::vector<std::int32_t> index_;
  std::vector<double> psi_values_;
  std::vector<double> weights_;

  friend FrequencyPlan build_plan(const ExponentPair&, double, const HomogeneousFunction&, double,
                                  double, std::size_t);
};

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError("stability index must lie in (0, 2], got " + num(alpha));
}

inline std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace detail

/// Enumerates the lattice in lexicographic order of z (last coordinate
/// fastest) with the origin removed, so cell k and cell count-1-k are mirror
/// images and share psi and the weight.
inline FrequencyPlan build_plan(const ExponentPair& pair, double alpha, const HomogeneousFunction& psi,
                                double spacing, double radius,
                                std::size_t max_cells = kDefaultMaxCells) {
  detail::check_alpha(alpha);
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InvalidInput("frequency spacing h must be positive, got " + detail::num(spacing));
  if (!(radius > spacing) || !std::isfinite(radius))
    throw InvalidInput("frequency radius R must exceed h, got R = " + detail::num(radius) +
                       ", h = " + detail::num(spacing));
  if (!(psi.exponent_matrix() == pair.e))
    throw InvalidInput("psi must be built from the exponent E of the pair");

  const std::size_t d = pair.index_dim();
  const std::size_t m = pair.state_dim();
  const auto half = static_cast<std::int64_t>(std::floor(radius / spacing * (1.0 + 1e-12)));
  const double side = 2.0 * static_cast<double>(half) + 1.0;
  const double cells = std::pow(side, static_cast<double>(d)) - 1.0;
  if (cells > static_cast<double>(max_cells) || half > INT32_MAX / 2) {
    const double per_axis = std::pow(static_cast<double>(max_cells) + 1.0, 1.0 / d);
    const double half_max = std::floor((per_axis - 1.0) / 2.0);
    throw PlanTooLarge("frequency plan needs " + detail::num(cells) + " cells, budget is " +
                       std::to_string(max_cells) + "; try h >= " + detail::num(radius / half_max) +
                       " or R <= " + detail::num(spacing * half_max));
  }

  FrequencyPlan plan(pair, psi);
  plan.alpha_ = alpha;
  plan.spacing_ = spacing;
  plan.radius_ = radius;
  plan.volume_ = std::pow(spacing, static_cast<double>(d));
  plan.half_width_ = half;

  const auto count = static_cast<std::size_t>(cells);
  const auto width = static_cast<std::size_t>(side);
  plan.index_.resize(count * d);
  for (std::size_t k = 0; k < count; ++k) {
    // Skip the origin, which sits in the middle of the full grid.
    std::size_t full = k < count / 2 ? k : k + 1;
    for (std::size_t i = d; i-- > 0;) {
      plan.index_[k * d + i] = static_cast<std::int32_t>(static_cast<std::int64_t>(full % width) - half);
      full /= width;
    }
  }

  plan.psi_values_.resize(count);
  plan.weights_.resize(count * m * m);
  const Eigen::MatrixXd generator =
      -(pair.d.matrix() + pair.q() / alpha * Eigen::MatrixXd::Identity(m, m));
  const bool diagonal = pair.d.is_diagonal();
  const auto half_count = static_cast<std::int64_t>(count / 2);
  std::exception_ptr failure;
  std::mutex failure_lock;

#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t k = 0; k < half_count; ++k) {
    try {
      const auto uk = static_cast<std::size_t>(k);
      const double value = psi(plan.center(uk));
      if (!(value > 0.0) || !std::isfinite(value))
        throw NumericalError("psi is not positive and finite at frequency cell " + std::to_string(uk));
      Eigen::MatrixXd w;
      if (diagonal) {
        w = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t i = 0; i < m; ++i) w(i, i) = std::pow(value, generator(i, i));
      } else {
        w = matrix_exp(generator * std::log(value));
      }
      if (!w.allFinite())
        throw NumericalError("non-finite weight matrix at frequency cell " + std::to_string(uk));
      for (const std::size_t target : {uk, count - 1 - uk}) {
        plan.psi_values_[target] = value;
        std::copy(w.data(), w.data() + m * m, plan.weights_.begin() + target * m * m);
      }
    } catch (...) {
      std::lock_guard lock(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return plan;
}

/// Per-cell noise |cell|^{1/alpha} W_k zeta_k for one realization. The stream
/// is keyed on (seed, realization, cell) only.
inline void cell_noise(const FrequencyPlan& plan, std::uint64_t seed, std::uint64_t realization,
                       std::size_t k, std::span<std::complex<double>> out) {
  const std::size_t m = plan.state_dim();
  SeededStream stream(seed, (realization << 32) | static_cast<std::uint64_t>(k));
  std::complex<double> zeta[8];
  std::vector<std::complex<double>> heap;
  std::span<std::complex<double>> z(zeta, m);
  if (m > 8) {
    heap.resize(m);
    z = heap;
  }
  isotropic_complex_vector({plan.alpha(), 1.0}, stream, z);
  const double scale = std::pow(plan.volume(), 1.0 / plan.alpha());
  const auto w = plan.weight(k);
  for (std::size_t i = 0; i < m; ++i) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += w(i, j) * z[j];
    out[i] = scale * acc;
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
      throw NumericalError("non-finite noise in frequency cell " + std::to_string(k));
  }
}

/// One realization on the closed grid {j / n : j = 0..n}^d. Point i has grid
/// coordinates j_a = (i / (n+1)^a) mod (n+1), so the first axis varies fastest.
struct FieldSample {
  std::size_t index_dim = 1;
  std::size_t state_dim = 1;
  std::size_t resolution = 0;
  double alpha = 2.0;
  double spacing = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  std::vector<double> values;

  std::size_t points_per_axis() const { return resolution + 1; }
  std::size_t point_count() const { return detail::ipow(points_per_axis(), index_dim); }
  std::size_t grid_index(std::size_t i, std::size_t axis) const {
    return (i / detail::ipow(points_per_axis(), axis)) % points_per_axis();
  }
  Eigen::VectorXd point(std::size_t i) const {
    Eigen::VectorXd x(index_dim);
    for (std::size_t a = 0; a < index_dim; ++a)
      x(a) = static_cast<double>(grid_index(i, a)) / static_cast<double>(resolution);
    return x;
  }
  std::span<const double> value(std::size_t i) const {
    return {values.data() + i * state_dim, state_dim};
  }
  double component(std::size_t i, std::size_t j) const { return values[i * state_dim + j]; }
};

enum class Evaluation { automatic, direct, fft };

struct SimulationOptions {
  std::size_t resolution = 0;
  std::size_t realizations = 1;
  std::uint64_t seed = 0;
  std::uint64_t first_realization = 0;
  int threads = 0;
  Evaluation method = Evaluation::automatic;
};

namespace detail {

/// Size N of the periodic transform that evaluates the lattice sum on
/// {j / n}: requires N = 2 pi n / h to be an integer greater than n. Returns 0
/// when the lattice does not align.
inline std::size_t fft_length(const FrequencyPlan& plan, std::size_t n) {
  const double ratio = 2.0 * std::numbers::pi * static_cast<double>(n) / plan.spacing();
  const double rounded = std::round(ratio);
  if (rounded <= static_cast<double>(n) || std::abs(ratio - rounded) > 1e-9 * ratio) return 0;
  if (plan.index_dim() > 2) return 0;
  return static_cast<std::size_t>(rounded);
}

inline double direct_cost(const FrequencyPlan& plan, std::size_t points) {
  return static_cast<double>(plan.cell_count()) * static_cast<double>(points);
}

inline double fft_cost(const FrequencyPlan& plan, std::size_t length) {
  const double size = std::pow(static_cast<double>(length), static_cast<double>(plan.index_dim()));
  return static_cast<double>(plan.state_dim()) * size * std::log2(std::max(2.0, size)) +
         static_cast<double>(plan.cell_count());
}

inline void draw_noise(const FrequencyPlan& plan, std::uint64_t seed, std::uint64_t realization,
                       std::vector<std::complex<double>>& noise) {
  const std::size_t m = plan.state_dim();
  noise.resize(plan.cell_count() * m);
  for (std::size_t k = 0; k < plan.cell_count(); ++k)
    cell_noise(plan, seed, realization, k, {noise.data() + k * m, m});
}

/// X(x) = Re sum_k (e^{i phi_k} - 1) c_k with e^{i phi} - 1 = -2 sin^2(phi/2) + i sin(phi).
inline void evaluate_direct(const FrequencyPlan& plan, std::span<const std::complex<double>> noise,
                            const Eigen::VectorXd& x, std::span<double> out) {
  const std::size_t d = plan.index_dim();
  const std::size_t m = plan.state_dim();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < plan.cell_count(); ++k) {
    const auto z = plan.lattice_index(k);
    double phase = 0.0;
    for (std::size_t a = 0; a < d; ++a) phase += x(static_cast<Eigen::Index>(a)) * z[a];
    phase *= plan.spacing();
    const double s = std::sin(0.5 * phase);
    const double re = -2.0 * s * s;
    const double im = std::sin(phase);
    for (std::size_t j = 0; j < m; ++j) {
      const std::complex<double> c = noise[k * m + j];
      out[j] += re * c.real() - im * c.imag();
    }
  }
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
    if (!data) throw PlanTooLarge("cannot allocate transform buffer of " + std::to_string(n) + " points");
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  FftwBuffer(FftwBuffer&& other) noexcept : data(other.data), size(other.size) { other.data = nullptr; }
  FftwBuffer& operator=(FftwBuffer&&) = delete;
  ~FftwBuffer() { fftw_free(data); }
  fftw_complex* data;
  std::size_t size;
};

inline std::mutex& fftw_planner_lock() {
  static std::mutex lock;
  return lock;
}

class FftwPlan {
 public:
  FftwPlan(std::size_t length, std::size_t rank) {
    FftwBuffer scratch(detail::ipow(length, rank));
    const int dims[2] = {static_cast<int>(length), static_cast<int>(length)};
    std::lock_guard lock(fftw_planner_lock());
    plan_ = fftw_plan_dft(static_cast<int>(rank), dims, scratch.data, scratch.data, FFTW_BACKWARD,
                          FFTW_ESTIMATE);
    if (!plan_) throw NumericalError("FFTW could not create a transform plan");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_lock());
    fftw_destroy_plan(plan_);
  }
  void execute(fftw_complex* data) const { fftw_execute_dft(plan_, data, data); }

 private:
  fftw_plan plan_ = nullptr;
};

/// Scatters the per-cell noise into frequency bins z mod N and transforms,
/// giving sum_k c_k e^{2 pi i <j, z_k> / N} at every grid index j.
inline void evaluate_fft(const FrequencyPlan& plan, const FftwPlan& transform, std::size_t length,
                         std::uint64_t seed, std::uint64_t realization,
                         std::vector<FftwBuffer>& buffers, FieldSample& sample) {
  const std::size_t d = plan.index_dim();
  const std::size_t m = plan.state_dim();
  for (auto& b : buffers) std::fill_n(&b.data[0][0], 2 * b.size, 0.0);
  std::complex<double> c[8];
  std::vector<std::complex<double>> heap;
  std::span<std::complex<double>> cs(c, m);
  if (m > 8) {
    heap.resize(m);
    cs = heap;
  }
  const auto len = static_cast<std::int64_t>(length);
  for (std::size_t k = 0; k < plan.cell_count(); ++k) {
    cell_noise(plan, seed, realization, k, cs);
    const auto z = plan.lattice_index(k);
    std::size_t bin = 0;
    for (std::size_t a = 0; a < d; ++a) bin = bin * length + static_cast<std::size_t>(((z[a] % len) + len) % len);
    for (std::size_t j = 0; j < m; ++j) {
      buffers[j].data[bin][0] += cs[j].real();
      buffers[j].data[bin][1] += cs[j].imag();
    }
  }
  for (auto& b : buffers) transform.execute(b.data);

  const std::size_t points = sample.point_count();
  sample.values.assign(points * m, 0.0);
  for (std::size_t i = 0; i < points; ++i) {
    std::size_t bin = 0;
    for (std::size_t a = 0; a < d; ++a) bin = bin * length + sample.grid_index(i, a);
    for (std::size_t j = 0; j < m; ++j)
      sample.values[i * m + j] = i == 0 ? 0.0 : buffers[j].data[bin][0] - buffers[j].data[0][0];
  }
}

inline void check_finite(const FieldSample& s) {
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (!std::isfinite(s.values[i]))
      throw NumericalError("non-finite field value at grid point " + std::to_string(i / s.state_dim) +
                           " of realization " + std::to_string(s.realization));
  }
}

template <typename Body>
void run_parallel(std::int64_t count, int threads, Body&& body) {
  std::exception_ptr failure;
  std::mutex lock;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard guard(lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Realizations on the closed grid of resolution n. Every value depends only
/// on (plan, seed, realization index); the thread count changes nothing.
inline std::vector<FieldSample> simulate(const FrequencyPlan& plan, const SimulationOptions& opt) {
  if (opt.resolution < 2) throw InvalidInput("lattice resolution n must be at least 2");
  if (opt.realizations < 1) throw InvalidInput("realization count must be positive");
  if (plan.cell_count() >= (std::size_t{1} << 32) ||
      opt.first_realization + opt.realizations >= (std::uint64_t{1} << 32))
    throw InvalidInput("cell and realization indices must fit in 32 bits");
  const int threads = resolve_threads(opt.threads);
  const std::size_t n = opt.resolution;

  std::vector<FieldSample> out(opt.realizations);
  for (std::size_t r = 0; r < opt.realizations; ++r) {
    FieldSample& s = out[r];
    s.index_dim = plan.index_dim();
    s.state_dim = plan.state_dim();
    s.resolution = n;
    s.alpha = plan.alpha();
    s.spacing = plan.spacing();
    s.radius = plan.radius();
    s.seed = opt.seed;
    s.realization = opt.first_realization + r;
  }
  const std::size_t points = out.front().point_count();
  const std::size_t length = detail::fft_length(plan, n);

  Evaluation method = opt.method;
  if (method == Evaluation::automatic) {
    method = length != 0 && detail::fft_cost(plan, length) < detail::direct_cost(plan, points)
                 ? Evaluation::fft
                 : Evaluation::direct;
  }
  if (method == Evaluation::fft && length == 0) {
    throw InvalidInput("FFT evaluation needs d <= 2 and 2 pi n / h to be an integer above n; got " +
                       detail::num(2.0 * std::numbers::pi * static_cast<double>(n) / plan.spacing()));
  }

  if (method == Evaluation::fft) {
    const detail::FftwPlan transform(length, plan.index_dim());
    const std::size_t size = detail::ipow(length, plan.index_dim());
    const int workers = std::min<int>(threads, static_cast<int>(opt.realizations));
    std::vector<std::vector<detail::FftwBuffer>> buffers(workers);
    for (auto& set : buffers)
      for (std::size_t j = 0; j < plan.state_dim(); ++j) set.emplace_back(size);
    detail::run_parallel(static_cast<std::int64_t>(opt.realizations), workers, [&](std::int64_t r) {
      FieldSample& s = out[static_cast<std::size_t>(r)];
      detail::evaluate_fft(plan, transform, length, opt.seed, s.realization,
                           buffers[static_cast<std::size_t>(omp_get_thread_num())], s);
      detail::check_finite(s);
    });
    return out;
  }

  const std::size_t m = plan.state_dim();
  for (FieldSample& s : out) {
    std::vector<std::complex<double>> noise;
    detail::draw_noise(plan, opt.seed, s.realization, noise);
    s.values.assign(points * m, 0.0);
    detail::run_parallel(static_cast<std::int64_t>(points), threads, [&](std::int64_t i) {
      const auto ui = static_cast<std::size_t>(i);
      detail::evaluate_direct(plan, noise, s.point(ui), {s.values.data() + ui * m, m});
    });
    detail::check_finite(s);
  }
  return out;
}

/// Field values at arbitrary points: result[r] is (points x m) for
/// realization first_realization + r.
inline std::vector<Eigen::MatrixXd> simulate_at(const FrequencyPlan& plan,
                                                const std::vector<Eigen::VectorXd>& points,
                                                std::size_t realizations, std::uint64_t seed,
                                                int threads = 0, std::uint64_t first_realization = 0) {
  for (const auto& x : points) {
    if (static_cast<std::size_t>(x.size()) != plan.index_dim() || !x.allFinite())
      throw InvalidInput("evaluation points must be finite vectors of the index dimension");
  }
  if (plan.cell_count() >= (std::size_t{1} << 32) ||
      first_realization + realizations >= (std::uint64_t{1} << 32))
    throw InvalidInput("cell and realization indices must fit in 32 bits");
  const std::size_t m = plan.state_dim();
  std::vector<Eigen::MatrixXd> out(realizations);
  detail::run_parallel(static_cast<std::int64_t>(realizations), resolve_threads(threads), [&](std::int64_t r) {
    std::vector<std::complex<double>> noise;
    detail::draw_noise(plan, seed, first_realization + static_cast<std::uint64_t>(r), noise);
    Eigen::MatrixXd values(points.size(), m);
    std::vector<double> row(m);
    for (std::size_t i = 0; i < points.size(); ++i) {
      detail::evaluate_direct(plan, noise, points[i], row);
      for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(row[j]))
          throw NumericalError("non-finite field value at evaluation point " + std::to_string(i));
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
      }
    }
    out[static_cast<std::size_t>(r)] = std::move(values);
  });
  return out;
}

/// Which matrix meets theta in the CF exponent: W^T theta is what the
/// sub-Gaussian construction produces; W theta is the literal reading.
enum class CfConvention { transpose, as_written };

/// Exact CF exponent of the discretized field for the increment X(x) - X(base):
///   sum_k |cell| (|e^{i<x,y_k>} - e^{i<base,y_k>}| ||W_k^T theta||)^alpha.
inline double exponent_sum(const FrequencyPlan& plan, const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                           CfConvention convention = CfConvention::transpose,
                           const Eigen::VectorXd* base = nullptr) {
  const std::size_t d = plan.index_dim();
  const std::size_t m = plan.state_dim();
  if (static_cast<std::size_t>(x.size()) != d || static_cast<std::size_t>(theta.size()) != m ||
      (base && static_cast<std::size_t>(base->size()) != d))
    throw InvalidInput("exponent evaluation: point or theta has the wrong dimension");
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (plan.cell_count() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const double alpha = plan.alpha();
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    double acc = 0.0;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(plan.cell_count(), lo + kBlock);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto z = plan.lattice_index(k);
      double px = 0.0, pb = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        px += x(static_cast<Eigen::Index>(a)) * z[a];
        if (base) pb += (*base)(static_cast<Eigen::Index>(a)) * z[a];
      }
      px *= plan.spacing();
      pb *= plan.spacing();
      const double kr = std::cos(px) - std::cos(pb);
      const double ki = std::sin(px) - std::sin(pb);
      const double kernel2 = kr * kr + ki * ki;
      if (kernel2 == 0.0) continue;
      const auto w = plan.weight(k);
      const double u2 = convention == CfConvention::transpose ? (w.transpose() * theta).squaredNorm()
                                                              : (w * theta).squaredNorm();
      acc += std::pow(kernel2 * u2, 0.5 * alpha);
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  total *= plan.volume();
  if (!std::isfinite(total)) throw NumericalError("CF exponent sum diverged (check the spectral condition)");
  return total;
}

/// Deterministic oracle for the CF exponent: the same sum on a lattice with
/// spacing h/4 and radius 4R.
class ExponentQuadrature {
 public:
  explicit ExponentQuadrature(const FrequencyPlan& plan, std::size_t max_cells = kDefaultMaxCells)
      : refined_(build_plan(plan.pair(), plan.alpha(), plan.psi_function(), plan.spacing() / 4.0,
                            plan.radius() * 4.0, max_cells)) {}

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& theta,
                    CfConvention convention = CfConvention::transpose) const {
    return exponent_sum(refined_, x, theta, convention);
  }
  double increment(const Eigen::VectorXd& x, const Eigen::VectorXd& base, const Eigen::VectorXd& theta,
                   CfConvention convention = CfConvention::transpose) const {
    return exponent_sum(refined_, x, theta, convention, &base);
  }
  const FrequencyPlan& refined_plan() const { return refined_; }

 private:
  FrequencyPlan refined_;
};

inline double exponent_quadrature(const ExponentPair& pair, double alpha, const HomogeneousFunction& psi,
                                  const FrequencyPlan& plan, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& theta,
                                  CfConvention convention = CfConvention::transpose) {
  const FrequencyPlan refined =
      build_plan(pair, alpha, psi, plan.spacing() / 4.0, plan.radius() * 4.0);
  return exponent_sum(refined, x, theta, convention);
}

}  // namespace osrf
