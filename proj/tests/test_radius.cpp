#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rcjhand/error.hpp"
#include "rcjhand/radius_opt.hpp"
#include "rcjhand/units.hpp"

using namespace rcjhand;

namespace {

// Worst-case pair deviation of the face-hole model, reached mid-ROM.
double closed_form_residual(double m, double face_deg, double r) {
  const double h = deg2rad(0.5 * face_deg);
  return 4.0 * (1.0 - std::cos(h)) * std::abs(m * std::sin(h) - r / std::cos(h));
}

double closed_form_optimum(double m, double face_deg) { return 0.5 * m * std::sin(deg2rad(face_deg)); }

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::llround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) out.push_back(lo + k * step);
  return out;
}

}  // namespace

TEST(Radius, SingleAngleHasNoResidual) {
  const auto p = RadiusProblem::flexion(12.7, 50.0);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(residual(p, 4.9, zero), 0.0);
}

TEST(Radius, ShippedRadiusIsNearlyBalanced) {
  const auto p = RadiusProblem::flexion(12.7, 50.0);
  EXPECT_LE(residual(p, 4.9), 0.05);
  EXPECT_NEAR(residual(p, 4.9), closed_form_residual(12.7, 50.0, 4.9), 1e-9);
}

TEST(Radius, SmallRadiusMatchesBruteForce) {
  const auto p = RadiusProblem::flexion(12.7, 50.0);
  const double brute = residual(p, 2.0, grid(0.0, 100.0, 0.1));
  EXPECT_NEAR(brute, 1.1844554895, 1e-9);
  EXPECT_NEAR(brute, closed_form_residual(12.7, 50.0, 2.0), 1e-9);
  EXPECT_GT(brute, optimize_radius(p).residual);
}

TEST(Radius, ResidualClosedFormAcrossRadii) {
  const auto p = RadiusProblem::flexion(9.0, 40.0);
  for (double r = 0.5; r < 8.0; r += 0.37) {
    EXPECT_NEAR(residual(p, r), closed_form_residual(9.0, 40.0, r), 1e-9) << r;
  }
}

TEST(Radius, RecoversShippedRadii) {
  struct Row {
    RadiusProblem problem;
    double expected;
  };
  const std::vector<Row> rows = {
      {RadiusProblem::flexion(12.7, 50.0), 4.9}, {RadiusProblem::flexion(8.7, 50.0), 3.3},
      {RadiusProblem::flexion(8.2, 50.0), 3.1},  {RadiusProblem::flexion(11.7, 50.0), 4.5},
      {RadiusProblem::flexion(10.2, 50.0), 3.9}, {RadiusProblem::deviation(9.5, 22.5), 3.4},
      {RadiusProblem::deviation(7.5, 15.0), 1.9},
  };
  for (const auto& row : rows) {
    const auto opt = optimize_radius(row.problem);
    const double face = 0.5 * (row.problem.rom_max - row.problem.rom_min);
    EXPECT_NEAR(opt.radius, closed_form_optimum(row.problem.moment_arm, face), 2e-4);
    EXPECT_NEAR(opt.radius, row.expected, 0.05);
    EXPECT_LE(opt.residual, 1e-3);
    EXPECT_FALSE(opt.used_fallback);
  }
}

TEST(Radius, ForJointUsesItsOwnRom) {
  const auto j = default_thumb().joints[0];
  const auto p = RadiusProblem::for_joint(j);
  EXPECT_DOUBLE_EQ(p.rom_min, -45.0);
  EXPECT_DOUBLE_EQ(p.rom_max, 45.0);
  EXPECT_DOUBLE_EQ(p.moment_arm, 9.5);
}

TEST(Radius, SingleCellSweep) {
  const std::vector<double> k{12.7}, b{50.0};
  const auto s = sweep(k, b);
  ASSERT_EQ(s.cells.size(), 1u);
  ASSERT_TRUE(s.cells[0].optimum);
  EXPECT_NEAR(s.cells[0].optimum->radius, closed_form_optimum(12.7, 50.0), 2e-4);
}

TEST(Radius, OptimumGrowsWithKappa) {
  const std::vector<double> kappas{6, 7, 8, 9, 10, 11, 12, 13};
  for (double beta : {30.0, 40.0, 50.0, 60.0}) {
    double prev = 0.0;
    for (double kappa : kappas) {
      const double r = optimize_radius(RadiusProblem::flexion(kappa, beta)).radius;
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
}

TEST(Radius, OptimumBeatsFineGrid) {
  for (double beta : {30.0, 60.0}) {
    const auto p = RadiusProblem::flexion(10.0, beta);
    const auto opt = optimize_radius(p);
    for (double r = p.r_lo; r <= p.r_hi; r += 0.01) EXPECT_LE(opt.residual, residual(p, r) + 1e-12);
  }
}

TEST(Radius, Deterministic) {
  const auto p = RadiusProblem::flexion(7.0, 30.0);
  const auto a = optimize_radius(p), b = optimize_radius(p);
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_EQ(a.residual, b.residual);
}

TEST(Radius, BoundaryMinimumIsReported) {
  auto p = RadiusProblem::flexion(12.7, 50.0);
  p.r_hi = 3.0;  // optimum lies above the interval
  try {
    optimize_radius(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_minimum_found);
  }
}

TEST(Radius, InvalidProblems) {
  auto p = RadiusProblem::flexion(12.7, 50.0);
  p.r_hi = 13.0;
  EXPECT_THROW(optimize_radius(p), Error);
  p = RadiusProblem::flexion(12.7, 50.0);
  p.step_deg = 0.0;
  EXPECT_THROW(optimize_radius(p), Error);
  EXPECT_THROW(sweep({}, std::vector<double>{50.0}), Error);
}
