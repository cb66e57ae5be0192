#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rcjhand/kinematics.hpp"

namespace rcjhand {

enum class CableSide { flexor, extensor };
enum class CableLateral { radial, ulnar, center };

/// Which link frame a hole is expressed in: the proximal side of the joint
/// (L_{i-1}, or O for joint 0) or the distal side (J_i).
enum class JointEnd { proximal, distal };

struct CableHole {
  CableSide side = CableSide::flexor;
  CableLateral lateral = CableLateral::center;

  bool operator==(const CableHole&) const = default;
};

/// Hole position in the given end frame of `joint`.
///
/// Holes lie on the joint's end faces at distance `moment_arm()` from the
/// virtual pivot where the faces meet. On flexion joints the flexor hole is on
/// the palmar (+x) face, which closes at rom_max; the lateral coordinate is
/// +-gamma/2. On the deviation joint the ulnar hole is on the -y face, which
/// closes at rom_max; the dorsopalmar coordinate is +-kappa. `radius`
/// overrides joint.radius when given. Throws invalid_geometry for a center
/// hole on the deviation joint.
Eigen::Vector3d hole_position(const JointGeometry& joint, const CableHole& hole, JointEnd end,
                              std::optional<double> radius = std::nullopt);

/// Straight chord between the proximal and distal hole across one joint [mm].
double joint_cable_length(const JointGeometry& joint, double angle_deg, const CableHole& hole,
                          std::optional<double> radius = std::nullopt, RomCheck check = RomCheck::strict);

/// Length deviations from the zero-angle length. On the deviation joint
/// `flexor` carries the ulnar hole and `extensor` the radial one.
struct SideDeviation {
  double flexor = 0.0;
  double extensor = 0.0;
  double sum() const { return flexor + extensor; }
};

SideDeviation cable_deviation(const JointGeometry& joint, double angle_deg,
                              std::optional<double> radius = std::nullopt, RomCheck check = RomCheck::strict);

struct Tendon {
  std::string name;
  CableSide side = CableSide::flexor;
  CableLateral lateral = CableLateral::center;
  int first_joint = 0;  // traversed joints are [first_joint, last_joint]
  int last_joint = 0;
  int anchor_link = 0;

  bool traverses(int joint) const { return joint >= first_joint && joint <= last_joint; }
  bool operator==(const Tendon&) const = default;
};

/// Two tendons driven by one motor; `flexor` pays out as `extensor` reels in.
struct TendonPair {
  std::string name;
  std::string flexor;
  std::string extensor;

  bool operator==(const TendonPair&) const = default;
};

struct TendonRoutingPlan {
  std::vector<Tendon> tendons;
  std::vector<TendonPair> pairs;

  const Tendon& tendon(std::string_view name) const;    // throws unknown_tendon
  const TendonPair& pair(std::string_view name) const;  // throws unknown_pair
};

/// Base cables anchored at PP (thumb: through MC to PP),
/// distal pair through MP to DP (thumb: independent IP pair).
const TendonRoutingPlan& routing_plan(FingerKind kind);

/// Pose-independent run inside link `link` between the tendon's holes [mm].
double in_link_run(const FingerModel& finger, const Tendon& tendon, int link);

double tendon_length(const FingerModel& finger, const JointAngles& angles, const Tendon& tendon,
                     RomCheck check = RomCheck::strict);
double tendon_length(const FingerModel& finger, const JointAngles& angles, std::string_view tendon,
                     RomCheck check = RomCheck::strict);

/// tendon_length(angles) - tendon_length(zero pose).
double tendon_deviation(const FingerModel& finger, const JointAngles& angles, const Tendon& tendon,
                        RomCheck check = RomCheck::strict);

/// Sum of both members' deviations.
double paired_deviation(const FingerModel& finger, const JointAngles& angles, std::string_view pair,
                        RomCheck check = RomCheck::strict);

struct TendonState {
  std::string name;
  double length = 0.0;
  double deviation = 0.0;
};

/// Length and deviation of every tendon in the finger's routing plan.
std::vector<TendonState> cable_state(const FingerModel& finger, const JointAngles& angles,
                                     RomCheck check = RomCheck::strict);

}  // namespace rcjhand
