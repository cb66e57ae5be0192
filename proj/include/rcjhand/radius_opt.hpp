#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcjhand/kinematics.hpp"

namespace rcjhand {

/// Single-joint rolling-radius problem: choose r so that the antagonistic
/// pair's summed length change stays near zero over the ROM.
struct RadiusProblem {
  JointAxis axis = JointAxis::flexion_y;
  double moment_arm = 0.0;  // kappa (flexion) or gamma (deviation) [mm]
  double rom_min = 0.0;     // [deg]
  double rom_max = 0.0;     // [deg]
  double r_lo = 0.0;        // search interval [mm]
  double r_hi = 0.0;
  double step_deg = 0.25;   // ROM sampling of the objective
  double tolerance = 1e-4;  // on r [mm]

  /// ROM [0, 2 beta]; search interval (0.05, 0.95) * kappa.
  static RadiusProblem flexion(double kappa, double beta_deg);
  /// ROM [-2 alpha, 2 alpha]; search interval (0.05, 0.95) * gamma.
  static RadiusProblem deviation(double gamma, double alpha_deg);
  /// Problem for an existing joint, using its own ROM and moment arm.
  static RadiusProblem for_joint(const JointGeometry& joint);

  /// Joint geometry evaluated by the objective, with radius `r`.
  JointGeometry joint(double r) const;
  /// ROM samples from rom_min to rom_max inclusive.
  std::vector<double> sample_angles() const;
};

/// max over the sampled ROM of |dc_f + dc_e| at radius r [mm].
double residual(const RadiusProblem& problem, double r);
double residual(const RadiusProblem& problem, double r, std::span<const double> angles_deg);

struct RadiusOptimum {
  double radius = 0.0;
  double residual = 0.0;
  bool used_fallback = false;  // coarse scan was not unimodal
};

/// Coarse scan (64 samples) then golden-section refinement. Throws
/// no_minimum_found when the scan decreases monotonically into a boundary.
RadiusOptimum optimize_radius(const RadiusProblem& problem);

struct SweepCell {
  double kappa = 0.0;
  double beta = 0.0;
  std::optional<RadiusOptimum> optimum;
  std::string error;  // set when optimize_radius failed for this cell
};

struct SweepResult {
  std::vector<SweepCell> cells;  // kappa-major order
};

SweepResult sweep(std::span<const double> kappas, std::span<const double> betas_deg);

}  // namespace rcjhand
