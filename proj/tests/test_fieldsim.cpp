#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "osrf/fieldsim.hpp"

namespace osrf {
namespace {

ExponentPair scalar_pair() {
  return validate_pair(SquareMatrix::diagonal({1.25}), SquareMatrix::diagonal({0.5}));
}

HomogeneousFunction diag_psi(const ExponentPair& p) {
  return {PsiVariant::diagonal_closed_form, p.e};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(BuildPlan, OneDimensionalEnumeration) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 0.5, 1.0);
  ASSERT_EQ(plan.cell_count(), 4u);
  const std::vector<double> expected = {-1.0, -0.5, 0.5, 1.0};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(plan.center(k)(0), expected[k]);
  EXPECT_EQ(plan.volume(), 0.5);
  EXPECT_EQ(plan.cutoff_low(), 0.5);
  EXPECT_EQ(plan.cutoff_high(), 1.0);
}

TEST(BuildPlan, TwoDimensionalLatticeSkipsOriginAndMirrors) {
  const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.2, 1.5}), SquareMatrix::diagonal({0.3, 0.5}));
  const FrequencyPlan plan = build_plan(pair, 1.5, HomogeneousFunction(PsiVariant::tau_based, pair.e), 0.3, 0.6);
  ASSERT_EQ(plan.cell_count(), 24u);
  EXPECT_NEAR(plan.volume(), 0.09, 1e-15);
  for (std::size_t k = 0; k < plan.cell_count(); ++k) {
    const Eigen::VectorXd y = plan.center(k);
    EXPECT_GT(y.lpNorm<Eigen::Infinity>(), 0.0);
    EXPECT_LE(y.lpNorm<Eigen::Infinity>(), 0.6 + 1e-12);
    const std::size_t mirror = plan.cell_count() - 1 - k;
    EXPECT_EQ((plan.center(mirror) + y).norm(), 0.0);
    EXPECT_EQ(plan.psi(mirror), plan.psi(k));
    EXPECT_NEAR(plan.psi(k), plan.psi_function()(y), 1e-14 * plan.psi(k));
  }
}

TEST(BuildPlan, UnitPsiGivesIdentityWeight) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 0.5, 1.0);
  EXPECT_EQ(plan.psi(3), 1.0);
  EXPECT_EQ(plan.weight(3)(0, 0), 1.0);
}

TEST(BuildPlan, ScalarWeightValue) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 1.0, 32.0);
  const std::size_t last = plan.cell_count() - 1;
  ASSERT_EQ(plan.center(last)(0), 32.0);
  EXPECT_NEAR(plan.psi(last), 16.0, 1e-13);
  EXPECT_NEAR(plan.weight(last)(0, 0), std::pow(16.0, -(0.5 + 1.25 / 1.5)), 1e-15);
}

TEST(BuildPlan, GeneralWeightIsMatrixPower) {
  const SquareMatrix d = SquareMatrix::from_row_major(2, std::vector<double>{0.4, 0.3, 0.0, 0.6});
  const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.25}), d);
  const FrequencyPlan plan = build_plan(pair, 1.2, diag_psi(pair), 0.25, 2.0);
  const SquareMatrix generator(-(d.matrix() + 1.25 / 1.2 * Eigen::MatrixXd::Identity(2, 2)));
  for (std::size_t k = 0; k < plan.cell_count(); ++k) {
    const Eigen::MatrixXd expected = matrix_power(generator, plan.psi(k)).matrix();
    EXPECT_LT((plan.weight(k) - expected).norm(), 1e-12 * expected.norm());
  }
}

TEST(BuildPlan, Rejections) {
  const ExponentPair pair = scalar_pair();
  EXPECT_THROW(build_plan(pair, 1.5, diag_psi(pair), 0.0, 1.0), InvalidInput);
  EXPECT_THROW(build_plan(pair, 1.5, diag_psi(pair), 1.0, 1.0), InvalidInput);
  EXPECT_THROW(build_plan(pair, 2.5, diag_psi(pair), 0.5, 1.0), DomainError);
  const HomogeneousFunction other(PsiVariant::diagonal_closed_form, SquareMatrix::diagonal({1.5}));
  EXPECT_THROW(build_plan(pair, 1.5, other, 0.5, 1.0), InvalidInput);
  try {
    build_plan(pair, 1.5, diag_psi(pair), 1e-3, 1e4, 1000);
    FAIL() << "expected PlanTooLarge";
  } catch (const PlanTooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("try h >="), std::string::npos);
  }
}

TEST(Simulate, VanishesAtOriginForBothEvaluations) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 2.0 * std::numbers::pi / 8.0, 64.0);
  for (Evaluation method : {Evaluation::direct, Evaluation::fft}) {
    SimulationOptions opt;
    opt.resolution = 64;
    opt.realizations = 5;
    opt.seed = 3;
    opt.method = method;
    for (const FieldSample& s : simulate(plan, opt)) {
      EXPECT_EQ(s.component(0, 0), 0.0);
      EXPECT_EQ(s.point_count(), 65u);
    }
  }
}

TEST(Simulate, FftMatchesDirectInOneAndTwoDimensions) {
  {
    const ExponentPair pair = scalar_pair();
    const FrequencyPlan plan = build_plan(pair, 1.7, diag_psi(pair), 2.0 * std::numbers::pi / 16.0, 40.0);
    SimulationOptions opt{128, 3, 11};
    opt.method = Evaluation::direct;
    const auto direct = simulate(plan, opt);
    opt.method = Evaluation::fft;
    const auto fft = simulate(plan, opt);
    for (std::size_t r = 0; r < direct.size(); ++r) {
      double scale = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < direct[r].values.size(); ++i) {
        scale = std::max(scale, std::abs(direct[r].values[i]));
        diff = std::max(diff, std::abs(direct[r].values[i] - fft[r].values[i]));
      }
      EXPECT_LT(diff, 1e-10 * scale);
    }
  }
  {
    const SquareMatrix d = SquareMatrix::from_row_major(2, std::vector<double>{0.3, 0.1, 0.0, 0.5});
    const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.2, 1.5}), d);
    const FrequencyPlan plan = build_plan(pair, 1.5, HomogeneousFunction(PsiVariant::tau_based, pair.e),
                                          2.0 * std::numbers::pi / 4.0, 20.0);
    SimulationOptions opt{16, 2, 5};
    opt.method = Evaluation::direct;
    const auto direct = simulate(plan, opt);
    opt.method = Evaluation::fft;
    const auto fft = simulate(plan, opt);
    for (std::size_t r = 0; r < direct.size(); ++r) {
      ASSERT_EQ(direct[r].values.size(), 17u * 17u * 2u);
      double scale = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < direct[r].values.size(); ++i) {
        scale = std::max(scale, std::abs(direct[r].values[i]));
        diff = std::max(diff, std::abs(direct[r].values[i] - fft[r].values[i]));
      }
      EXPECT_LT(diff, 1e-10 * scale);
    }
  }
}

TEST(Simulate, GridPointLayout) {
  FieldSample s;
  s.index_dim = 2;
  s.resolution = 4;
  EXPECT_EQ(s.point_count(), 25u);
  EXPECT_EQ(s.point(7)(0), 0.5);
  EXPECT_EQ(s.point(7)(1), 0.25);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 2.0 * std::numbers::pi / 8.0, 100.0);
  for (Evaluation method : {Evaluation::direct, Evaluation::fft}) {
    SimulationOptions opt{256, 6, 99};
    opt.method = method;
    opt.threads = 1;
    const auto a = simulate(plan, opt);
    opt.threads = 4;
    const auto b = simulate(plan, opt);
    for (std::size_t r = 0; r < a.size(); ++r) EXPECT_EQ(a[r].values, b[r].values);
  }
  const std::vector<Eigen::VectorXd> pts = {vec({0.25}), vec({1.0})};
  const auto p1 = simulate_at(plan, pts, 7, 99, 1);
  const auto p4 = simulate_at(plan, pts, 7, 99, 4);
  for (std::size_t r = 0; r < p1.size(); ++r) EXPECT_EQ(p1[r], p4[r]);
}

TEST(Simulate, PointEvaluationAgreesWithGrid) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 2.0 * std::numbers::pi / 8.0, 50.0);
  SimulationOptions opt{32, 2, 17};
  opt.first_realization = 4;
  const auto grid = simulate(plan, opt);
  const auto pts = simulate_at(plan, {vec({0.5}), vec({1.0})}, 2, 17, 0, 4);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_NEAR(pts[r](0, 0), grid[r].component(16, 0), 1e-10);
    EXPECT_NEAR(pts[r](1, 0), grid[r].component(32, 0), 1e-10);
  }
}

TEST(Simulate, GaussianVarianceMatchesExponentSum) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 2.0, diag_psi(pair), 2.0 * std::numbers::pi / 64.0, 64.0 * std::numbers::pi);
  const auto values = simulate_at(plan, {vec({1.0})}, 10000, 2024);
  double sum2 = 0.0;
  for (const auto& v : values) sum2 += v(0, 0) * v(0, 0);
  const double variance = sum2 / static_cast<double>(values.size());
  const double expected = 2.0 * exponent_sum(plan, vec({1.0}), vec({1.0}));
  EXPECT_NEAR(variance / expected, 1.0, 0.05);
}

// Two cells at +-y0 with a non-symmetric D: the empirical CF follows the
// transpose form and visibly departs from the literal form.
TEST(Simulate, TwoCellCharacteristicFunctionConvention) {
  const SquareMatrix d = SquareMatrix::from_row_major(2, std::vector<double>{0.2, 0.7, 0.0, 0.6});
  const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.25}), d);
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 0.25, 0.3);
  ASSERT_EQ(plan.cell_count(), 2u);
  const int n = 200000;
  const auto values = simulate_at(plan, {vec({1.3})}, n, 77);
  bool separated = false;
  for (const Eigen::VectorXd& theta : {vec({1.0, 0.0}), vec({0.0, 1.0}), vec({0.6, -0.8})}) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& v : values) {
      const double c = std::cos(theta.dot(v.row(0).transpose()));
      sum += c;
      sum2 += c * c;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double transpose = std::exp(-exponent_sum(plan, vec({1.3}), theta, CfConvention::transpose));
    const double literal = std::exp(-exponent_sum(plan, vec({1.3}), theta, CfConvention::as_written));
    EXPECT_LE(std::abs(mean - transpose), 4.0 * se);
    separated = separated || std::abs(mean - literal) > 10.0 * se;
  }
  EXPECT_TRUE(separated);
}

TEST(ExponentSum, TrivialZeros) {
  const ExponentPair pair = scalar_pair();
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 0.1, 20.0);
  EXPECT_EQ(exponent_sum(plan, vec({0.7}), vec({0.0})), 0.0);
  EXPECT_EQ(exponent_sum(plan, vec({0.0}), vec({1.0})), 0.0);
  EXPECT_EQ(exponent_quadrature(pair, 1.5, diag_psi(pair), plan, vec({0.0}), vec({1.0})), 0.0);
}

TEST(ExponentQuadrature, StationaryIncrements) {
  const SquareMatrix d = SquareMatrix::from_row_major(2, std::vector<double>{0.3, 0.1, -0.1, 0.5});
  const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.2, 1.5}), d);
  const FrequencyPlan plan = build_plan(pair, 1.5, HomogeneousFunction(PsiVariant::tau_based, pair.e), 0.5, 4.0);
  const ExponentQuadrature quad(plan);
  const Eigen::VectorXd t = vec({0.3, 0.7});
  const Eigen::VectorXd theta = vec({1.0, -0.5});
  const double at_t = quad(t, theta);
  for (const Eigen::VectorXd& h0 : {vec({0.1, 0.2}), vec({-3.0, 5.5}), vec({10.0, 0.0})})
    EXPECT_NEAR(quad.increment(t + h0, h0, theta), at_t, 1e-10 * at_t);
}

TEST(ExponentQuadrature, RefinementChangesLittle) {
  const ExponentPair pair = scalar_pair();
  const HomogeneousFunction psi = diag_psi(pair);
  const double h = 2.0 * std::numbers::pi / 64.0;
  const double r = 1024.0 * std::numbers::pi;
  const FrequencyPlan coarse = build_plan(pair, 1.5, psi, h, r);
  const FrequencyPlan fine = build_plan(pair, 1.5, psi, h / 2.0, 2.0 * r);
  const double a = exponent_quadrature(pair, 1.5, psi, coarse, vec({1.0}), vec({1.0}));
  const double b = exponent_quadrature(pair, 1.5, psi, fine, vec({1.0}), vec({1.0}));
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a / b, 1.0, 1e-2);
}

TEST(ExponentQuadrature, ScalingLawOnRefinedGrid) {
  const SquareMatrix d = SquareMatrix::from_row_major(2, std::vector<double>{0.3, 0.2, 0.0, 0.5});
  const ExponentPair pair = validate_pair(SquareMatrix::diagonal({1.25}), d);
  const FrequencyPlan plan = build_plan(pair, 1.5, diag_psi(pair), 2.0 * std::numbers::pi / 64.0, 1024.0 * std::numbers::pi);
  const ExponentQuadrature quad(plan);
  const Eigen::VectorXd t = vec({0.8});
  for (double c : {0.5, 2.0}) {
    const Eigen::VectorXd ct = matrix_power(pair.e, c).matrix() * t;
    const Eigen::MatrixXd cdt = matrix_power(pair.d, c).matrix().transpose();
    for (const Eigen::VectorXd& theta : {vec({1.0, 0.0}), vec({0.3, -0.9})}) {
      const double lhs = quad(ct, theta);
      const double rhs = quad(t, cdt * theta);
      EXPECT_NEAR(lhs / rhs, 1.0, 0.02) << "c = " << c;
    }
  }
}

}  // namespace
}  // namespace osrf
