#include "rcjhand/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcjhand/error.hpp"
#include "rcjhand/units.hpp"

namespace rcjhand {

namespace {

constexpr std::array<std::string_view, 5> kFingerNames = {"thumb", "index", "middle", "ring", "little"};

std::string prefix(std::string_view where) {
  return where.empty() ? std::string{} : std::string(where) + ": ";
}

[[noreturn]] void fail(std::string_view where, const std::string& what) {
  throw Error(ErrorCode::invalid_geometry, prefix(where) + what);
}

JointGeometry flexion_joint(double r, double kappa, double gamma, double beta) {
  return {JointAxis::flexion_y, r, kappa, gamma, beta, 0.0, 2.0 * beta};
}

JointGeometry deviation_joint(double r, double kappa, double gamma, double alpha) {
  return {JointAxis::deviation_x, r, kappa, gamma, alpha, -2.0 * alpha, 2.0 * alpha};
}

std::array<LinkGeometry, 4> links(double l0, double l1, double l2, double l3) {
  std::array<LinkGeometry, 4> out;
  out[0].length = l0;
  out[1].length = l1;
  out[2].length = l2;
  out[3].length = l3;
  return out;
}

}  // namespace

std::string_view to_string(Finger f) { return kFingerNames[static_cast<int>(f)]; }

std::string_view to_string(FingerKind k) { return k == FingerKind::thumb ? "thumb" : "finger"; }

std::optional<Finger> finger_from_string(std::string_view name) {
  for (Finger f : kAllFingers) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view to_string(FrameId id) {
  static constexpr std::array<std::string_view, kFrameCount> names = {"J0", "L0", "J1", "L1",
                                                                      "J2", "L2", "J3", "tip"};
  return names[static_cast<int>(id)];
}

double FingerModel::total_length() const {
  double sum = 0.0;
  for (const auto& link : links) sum += link.length;
  return sum;
}

HandModel HandModel::scaled(double s) const {
  HandModel out = *this;
  for (auto& finger : out.fingers) {
    for (auto& j : finger.joints) {
      j.radius *= s;
      j.flex_offset *= s;
      j.lateral_spacing *= s;
    }
    for (auto& l : finger.links) {
      l.length *= s;
      if (l.width_g) *l.width_g *= s;
      if (l.width_k) *l.width_k *= s;
    }
  }
  for (auto& p : out.placements) p = p.scaled(s);
  out.thumb_length *= s;
  return out;
}

HandModel HandModel::transformed(const RigidTransform& x) const {
  HandModel out = *this;
  for (auto& p : out.placements) p = x * p;
  return out;
}

FingerModel default_thumb() {
  FingerModel f;
  f.kind = FingerKind::thumb;
  f.joints = {deviation_joint(3.4, 9.1, 9.5, 22.5), flexion_joint(4.5, 11.7, 9.5, 50.0),
              flexion_joint(3.9, 10.2, 8.2, 50.0), flexion_joint(3.3, 8.7, 7.5, 50.0)};
  f.links = links(16.0, 35.0, 27.5, 27.5);
  return f;
}

FingerModel default_finger() {
  FingerModel f;
  f.kind = FingerKind::finger;
  f.joints = {deviation_joint(1.9, 9.5, 7.5, 15.0), flexion_joint(4.9, 12.7, 7.5, 50.0),
              flexion_joint(3.3, 8.7, 6.5, 50.0), flexion_joint(3.1, 8.2, 6.0, 50.0)};
  f.links = links(15.5, 42.5, 24.5, 24.5);
  return f;
}

HandModel default_hand() {
  HandModel hand;
  hand.fingers = {default_thumb(), default_finger(), default_finger(), default_finger(), default_finger()};
  // Palm frame: +z towards the fingertips, +x out of the palm, +y radial.
  // Fingers fan out from the wrist; the thumb sits on the thenar side,
  // rotated so that its flexion plane sweeps across the palm.
  hand.placement(Finger::thumb) =
      RigidTransform::from_axis_angle({-0.503, -0.074, -0.861}, 96.0, {6.5, 21.5, 50.5});
  hand.placement(Finger::index) = RigidTransform::from_axis_angle({1.0, 0.0, 0.0}, -12.0, {0.0, 19.0, 90.0});
  hand.placement(Finger::middle) = RigidTransform::from_axis_angle({1.0, 0.0, 0.0}, 0.0, {0.0, 0.0, 95.0});
  hand.placement(Finger::ring) = RigidTransform::from_axis_angle({1.0, 0.0, 0.0}, 12.0, {0.0, -19.0, 89.0});
  hand.placement(Finger::little) = RigidTransform::from_axis_angle({1.0, 0.0, 0.0}, 24.0, {0.0, -34.0, 77.0});
  hand.thumb_length = hand.finger(Finger::thumb).total_length();
  return hand;
}

void validate(const JointGeometry& j, std::string_view where) {
  if (!(j.radius > 0.0)) fail(where, "r > 0 violated");
  if (!(j.flex_offset > 0.0)) fail(where, "kappa > 0 violated");
  if (!(j.lateral_spacing > 0.0)) fail(where, "gamma > 0 violated");
  if (!(j.radius < j.flex_offset)) fail(where, "r < kappa violated");
  if (!(j.surface_angle > 0.0)) fail(where, "surface angle > 0 violated");
  const double span = j.rom_max - j.rom_min;
  if (j.axis == JointAxis::flexion_y) {
    if (std::abs(span - 2.0 * j.surface_angle) > kGeometryTol) {
      std::ostringstream os;
      os << "ROM span " << span << " deg must equal 2*beta = " << 2.0 * j.surface_angle << " deg";
      fail(where, os.str());
    }
  } else {
    if (std::abs(span - 4.0 * j.surface_angle) > kGeometryTol) {
      std::ostringstream os;
      os << "ROM span " << span << " deg must equal 4*alpha = " << 4.0 * j.surface_angle << " deg";
      fail(where, os.str());
    }
    if (std::abs(j.rom_min + j.rom_max) > kGeometryTol) fail(where, "deviation ROM must be symmetric");
  }
  if (!(j.face_angle() < 180.0)) fail(where, "face angle must be < 180 deg");
  // The hole must sit outside the rolling surface on its face.
  if (!(j.moment_arm() - j.radius * std::tan(deg2rad(0.5 * j.face_angle())) > 0.0)) {
    fail(where, "cable hole lies inside the rolling surface (moment arm <= r tan(B/2))");
  }
}

void validate(const FingerModel& f, std::string_view where) {
  const std::string w(where);
  if (f.joints[0].axis != JointAxis::deviation_x) fail(where, "joint 0 must be the deviation joint");
  for (int i = 0; i < 4; ++i) {
    if (i > 0 && f.joints[i].axis != JointAxis::flexion_y) fail(where, "joints 1-3 must be flexion joints");
    validate(f.joints[i], w + (w.empty() ? "" : " ") + "joint " + std::to_string(i));
  }
  for (int i = 0; i < 4; ++i) {
    const auto& l = f.links[i];
    if (!(l.length > 0.0)) fail(where, "link " + std::to_string(i) + ": l > 0 violated");
    if (l.width_g && !(*l.width_g > 0.0)) fail(where, "link " + std::to_string(i) + ": G > 0 violated");
    if (l.width_k && !(*l.width_k > 0.0)) fail(where, "link " + std::to_string(i) + ": K > 0 violated");
    if (i > 0) {
      const auto& p = f.links[i - 1];
      if (l.width_g && p.width_g && *l.width_g > *p.width_g)
        fail(where, "link " + std::to_string(i) + ": G must taper distally");
      if (l.width_k && p.width_k && *l.width_k > *p.width_k)
        fail(where, "link " + std::to_string(i) + ": K must taper distally");
    }
  }
  try {
    for (int i = 0; i < 4; ++i) link_offset(f, i);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

void validate(const HandModel& hand) {
  for (Finger f : kAllFingers) {
    validate(hand.finger(f), to_string(f));
    if (!hand.placement(f).is_proper()) fail(to_string(f), "placement is not a rigid transform");
  }
  if (hand.finger(Finger::thumb).kind != FingerKind::thumb) fail("thumb", "kind must be thumb");
  for (Finger f : kOpposedFingers) {
    if (hand.finger(f).kind != FingerKind::finger) fail(to_string(f), "kind must be finger");
  }
  if (!(hand.thumb_length > 0.0)) fail("hand", "thumb length d > 0 violated");
}

RigidTransform roll_transform(double radius, JointAxis axis, double angle_deg) {
  const double half = 0.5 * deg2rad(angle_deg);
  const RigidTransform rot = axis == JointAxis::flexion_y ? RigidTransform::rot_y(half) : RigidTransform::rot_x(half);
  return rot * RigidTransform::from_translation({0.0, 0.0, 2.0 * radius}) * rot;
}

RigidTransform link_offset(const FingerModel& finger, int i) {
  if (i < 0 || i > 3) throw Error(ErrorCode::invalid_geometry, "link index out of range: " + std::to_string(i));
  const auto& joints = finger.joints;
  const double l = finger.links[i].length;
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (i == 0) {
    t.z() = l - joints[1].radius - joints[0].radius;
  } else if (i == 3) {
    t.z() = l - joints[3].radius;
  } else {
    auto inset = [](const JointGeometry& j) {
      return j.flex_offset - j.radius * std::tan(deg2rad(0.5 * j.surface_angle));
    };
    t.x() = inset(joints[i + 1]) - inset(joints[i]);
    t.z() = l - joints[i].radius - joints[i + 1].radius;
  }
  if (!(t.z() > 0.0)) {
    std::ostringstream os;
    os << "link " << i << " has non-positive span " << t.z() << " mm";
    throw Error(ErrorCode::invalid_geometry, os.str());
  }
  return RigidTransform::from_translation(t);
}

std::vector<int> rom_violations(const FingerModel& finger, const JointAngles& angles) {
  std::vector<int> out;
  for (int i = 0; i < 4; ++i) {
    const auto& j = finger.joints[i];
    const double a = angles[i];
    if (!std::isfinite(a) || a < j.rom_min - kGeometryTol || a > j.rom_max + kGeometryTol) out.push_back(i);
  }
  return out;
}

JointAngles validate_rom(const FingerModel& finger, const JointAngles& angles, RomCheck mode) {
  if (mode == RomCheck::none) return angles;
  if (mode == RomCheck::clamp) {
    JointAngles out = angles;
    for (int i = 0; i < 4; ++i) out[i] = std::clamp(out[i], finger.joints[i].rom_min, finger.joints[i].rom_max);
    return out;
  }
  const auto bad = rom_violations(finger, angles);
  if (!bad.empty()) {
    std::ostringstream os;
    os << "angles outside ROM at joint";
    for (int i : bad) {
      const auto& j = finger.joints[i];
      os << ' ' << i << " (" << angles[i] << " not in [" << j.rom_min << ", " << j.rom_max << "])";
    }
    throw Error(ErrorCode::rom_violation, os.str());
  }
  return angles;
}

FingerFrames finger_fk(const FingerModel& finger, const JointAngles& angles, RomCheck check) {
  const JointAngles q = validate_rom(finger, angles, check);
  FingerFrames out;
  auto& f = out.frames;
  RigidTransform current;
  for (int i = 0; i < 4; ++i) {
    const auto& j = finger.joints[i];
    current = current * roll_transform(j.radius, j.axis, q[i]);
    f[2 * i] = current;
    current = current * link_offset(finger, i);
    f[2 * i + 1] = current;
  }
  return out;
}

std::array<RigidTransform, 5> hand_fk(const HandModel& hand, const Pose& pose, RomCheck check) {
  std::array<RigidTransform, 5> tips;
  for (Finger f : kAllFingers) {
    tips[static_cast<int>(f)] = hand.placement(f) * finger_fk(hand.finger(f), pose[f], check).tip();
  }
  return tips;
}

}  // namespace rcjhand
