#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcjhand/kinematics.hpp"

namespace rcjhand {

struct TrajectorySample {
  double t = 0.0;  // [s]
  Pose pose;
  std::array<Eigen::Vector3d, 5> tips;  // palm coordinates [mm]
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
};

enum class Interpolation { linear, cosine };

struct TrajectoryTiming {
  std::vector<double> durations;  // one per segment [s]
  double rate_hz = 100.0;
};

/// Piecewise interpolation through `poses`, sampled at t_k = k / rate.
Trajectory generate_trajectory(const HandModel& hand, std::span<const Pose> poses, const TrajectoryTiming& timing,
                               Interpolation interpolation = Interpolation::linear);

struct RmseOptions {
  double window_s = 0.0;  // time-shift search half width
  int smooth_width = 1;   // centred moving-average width in samples (odd)
};

struct RmseResult {
  std::array<double, 5> per_finger{};  // [mm]
  double aggregate = 0.0;              // mean over fingers [mm]
  double shift_s = 0.0;                // applied to b
};

/// Tip-position RMSE after smoothing and a grid search over time shifts.
RmseResult trajectory_rmse(const Trajectory& a, const Trajectory& b, const RmseOptions& options = {});

/// Every tip of every sample mapped through `x`.
Trajectory transformed(const Trajectory& traj, const RigidTransform& x);

}  // namespace rcjhand
