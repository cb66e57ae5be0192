#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcjhand/transform.hpp"

namespace rcjhand {

enum class JointAxis {
  deviation_x,  // radial-ulnar deviation, rotation about local X
  flexion_y,    // flexion-extension, rotation about local Y
};

/// Rolling-contact joint. Both mating surfaces share `radius`; the joint's
/// two end faces are tangent to the rolling circle at rom_min/2 and rom_max/2.
struct JointGeometry {
  JointAxis axis = JointAxis::flexion_y;
  double radius = 0.0;           // r [mm]
  double flex_offset = 0.0;      // kappa [mm]
  double lateral_spacing = 0.0;  // gamma [mm]
  double surface_angle = 0.0;    // beta (flexion) or alpha (deviation) [deg]
  double rom_min = 0.0;          // [deg]
  double rom_max = 0.0;          // [deg]

  /// Half of the ROM, i.e. the angle between the two end faces [deg].
  double face_angle() const { return 0.5 * (rom_max - rom_min); }
  /// Pivot-to-hole distance along a face: kappa on flexion joints, gamma on the deviation joint.
  double moment_arm() const {
    return axis == JointAxis::flexion_y ? flex_offset : lateral_spacing;
  }

  bool operator==(const JointGeometry&) const = default;
};

struct LinkGeometry {
  double length = 0.0;  // l [mm]
  std::optional<double> width_g;  // solid-geometry only
  std::optional<double> width_k;

  bool operator==(const LinkGeometry&) const = default;
};

enum class FingerKind { thumb, finger };

enum class Finger { thumb = 0, index, middle, ring, little };
inline constexpr std::array<Finger, 5> kAllFingers = {Finger::thumb, Finger::index, Finger::middle,
                                                     Finger::ring, Finger::little};
inline constexpr std::array<Finger, 4> kOpposedFingers = {Finger::index, Finger::middle, Finger::ring,
                                                         Finger::little};

std::string_view to_string(Finger f);
std::string_view to_string(FingerKind k);
std::optional<Finger> finger_from_string(std::string_view name);

/// (phi0, theta1, theta2, theta3) in degrees.
using JointAngles = std::array<double, 4>;

struct FingerModel {
  FingerKind kind = FingerKind::finger;
  std::array<JointGeometry, 4> joints;
  std::array<LinkGeometry, 4> links;

  /// Sum of phalanx lengths [mm].
  double total_length() const;

  bool operator==(const FingerModel&) const = default;
};

struct HandModel {
  std::array<FingerModel, 5> fingers;
  std::array<RigidTransform, 5> placements;  // palm frame -> finger origin O
  double thumb_length = 0.0;                 // d [mm]

  const FingerModel& finger(Finger f) const { return fingers[static_cast<int>(f)]; }
  FingerModel& finger(Finger f) { return fingers[static_cast<int>(f)]; }
  const RigidTransform& placement(Finger f) const { return placements[static_cast<int>(f)]; }
  RigidTransform& placement(Finger f) { return placements[static_cast<int>(f)]; }

  /// Every length (joints, links, placements, d) multiplied by `s`; angles untouched.
  HandModel scaled(double s) const;
  /// Every placement pre-multiplied by `x`.
  HandModel transformed(const RigidTransform& x) const;
};

struct Pose {
  std::array<JointAngles, 5> angles{};

  const JointAngles& operator[](Finger f) const { return angles[static_cast<int>(f)]; }
  JointAngles& operator[](Finger f) { return angles[static_cast<int>(f)]; }

  bool operator==(const Pose&) const = default;
};

/// Shipped parameters for the two finger kinds.
FingerModel default_thumb();
FingerModel default_finger();
/// Default parameters plus the shipped palm placements.
HandModel default_hand();

/// Throws Error(invalid_geometry) naming the first violated invariant.
void validate(const JointGeometry& joint, std::string_view where = {});
void validate(const FingerModel& finger, std::string_view where = {});
void validate(const HandModel& hand);

/// Rot(angle/2) * Trans_z(2r) * Rot(angle/2) about the joint axis.
RigidTransform roll_transform(double radius, JointAxis axis, double angle_deg);

/// Constant frame offset inside link `i` (J_i -> L_i; for i = 3, J_3 -> tip).
RigidTransform link_offset(const FingerModel& finger, int i);

enum class RomCheck { strict, clamp, none };

/// Indices of joints whose angle lies outside [rom_min, rom_max] (beyond kGeometryTol).
std::vector<int> rom_violations(const FingerModel& finger, const JointAngles& angles);

/// strict: returns `angles` or throws Error(rom_violation); clamp: saturates; none: passthrough.
JointAngles validate_rom(const FingerModel& finger, const JointAngles& angles, RomCheck mode = RomCheck::strict);

enum class FrameId { J0 = 0, L0, J1, L1, J2, L2, J3, tip };
inline constexpr int kFrameCount = 8;
std::string_view to_string(FrameId id);

struct FingerFrames {
  std::array<RigidTransform, kFrameCount> frames;

  const RigidTransform& operator[](FrameId id) const { return frames[static_cast<int>(id)]; }
  const RigidTransform& tip() const { return frames.back(); }
};

/// Frame chain of one finger in its origin frame O.
FingerFrames finger_fk(const FingerModel& finger, const JointAngles& angles, RomCheck check = RomCheck::strict);

/// Tip frames of all fingers in palm coordinates.
std::array<RigidTransform, 5> hand_fk(const HandModel& hand, const Pose& pose, RomCheck check = RomCheck::strict);

}  // namespace rcjhand
