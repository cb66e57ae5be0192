#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rcjhand/cable.hpp"
#include "rcjhand/kinematics.hpp"

namespace rcjhand {

/// One servo with a bobbin winding both members of an antagonistic pair in
/// opposite directions.
struct Motor {
  Finger finger = Finger::index;
  std::string pair;            // pair name in the finger's routing plan
  double bobbin_radius = 5.0;  // b [mm]
  int direction = +1;          // +1: psi > 0 pays out the flexor member

  bool operator==(const Motor&) const = default;
};

struct ActuatorConfig {
  std::vector<Motor> motors;

  /// Three motors per finger (base-a, base-b, distal), all with bobbin radius `b`.
  static ActuatorConfig uniform(double bobbin_radius = 5.0);

  bool operator==(const ActuatorConfig&) const = default;
};

void validate(const ActuatorConfig& cfg);

/// Underactuated joint pairs: finger PIP -> DIP, thumb CMC flexion -> MCP flexion.
/// The second joint follows the first as theta_second = ratio * theta_first.
struct CouplingRule {
  double ratio = 1.0;

  static std::array<int, 2> coupled_joints(FingerKind kind);
  bool satisfied(FingerKind kind, const JointAngles& angles, double tol_deg = 1e-6) const;
  /// Largest admissible angle of the leading joint under ROM limits of both joints [deg].
  double leading_max(const FingerModel& finger) const;

  bool operator==(const CouplingRule&) const = default;
};

struct MotorState {
  std::vector<double> angle;  // psi [rad], parallel to ActuatorConfig::motors

  /// Payout b * psi of motor i's flexor-side member [mm].
  double payout(const ActuatorConfig& cfg, std::size_t i) const;
};

MotorState pose_to_motor(const HandModel& hand, const Pose& pose, const ActuatorConfig& cfg,
                         const CouplingRule& coupling = {});

struct InverseOptions {
  double tolerance_mm = 1e-9;
  int max_iterations = 100;
};

Pose motor_to_pose(const HandModel& hand, const MotorState& motors, const ActuatorConfig& cfg,
                   const CouplingRule& coupling = {}, const InverseOptions& options = {});

using PresetCatalog = std::map<std::string, Pose, std::less<>>;

/// The 16 Cutkosky classes plus open / close / pinch gestures.
const PresetCatalog& default_presets();
Pose preset_pose(const PresetCatalog& catalog, std::string_view name);
inline Pose preset_pose(std::string_view name) { return preset_pose(default_presets(), name); }

}  // namespace rcjhand
