#include "rcjhand/cable.hpp"

#include <algorithm>
#include <cmath>

#include "rcjhand/error.hpp"
#include "rcjhand/units.hpp"

namespace rcjhand {

namespace {

// In-plane hole coordinates of one face: w along the bending direction, h
// towards the joint (away from the link body).
struct FaceHole {
  double w;
  double h;
};

FaceHole face_hole(const JointGeometry& joint, bool closing_face, double r) {
  const double half_face = 0.5 * deg2rad(joint.face_angle());
  const double inset = joint.moment_arm() - r * std::tan(half_face);
  const double tau = 0.5 * deg2rad(closing_face ? joint.rom_max : joint.rom_min);
  const double dir = closing_face ? 1.0 : -1.0;
  return {r * std::sin(tau) + dir * inset * std::cos(tau), r * std::cos(tau) - dir * inset * std::sin(tau)};
}

double lateral_offset(const JointGeometry& joint, CableLateral lateral) {
  switch (lateral) {
    case CableLateral::radial: return 0.5 * joint.lateral_spacing;
    case CableLateral::ulnar: return -0.5 * joint.lateral_spacing;
    case CableLateral::center: return 0.0;
  }
  return 0.0;
}

TendonRoutingPlan make_plan(FingerKind kind) {
  // Base cables cross the deviation joint and basal flexion; on the thumb
  // they continue through the MC to the PP, coupling CMC and MCP flexion.
  const int base_last = kind == FingerKind::thumb ? 2 : 1;
  const int distal_first = kind == FingerKind::thumb ? 3 : 2;
  const std::string distal = kind == FingerKind::thumb ? "ip" : "distal";
  TendonRoutingPlan plan;
  plan.tendons = {
      {"base-flexor-radial", CableSide::flexor, CableLateral::radial, 0, base_last, base_last},
      {"base-flexor-ulnar", CableSide::flexor, CableLateral::ulnar, 0, base_last, base_last},
      {"base-extensor-radial", CableSide::extensor, CableLateral::radial, 0, base_last, base_last},
      {"base-extensor-ulnar", CableSide::extensor, CableLateral::ulnar, 0, base_last, base_last},
      {distal + "-flexor", CableSide::flexor, CableLateral::center, distal_first, 3, 3},
      {distal + "-extensor", CableSide::extensor, CableLateral::center, distal_first, 3, 3},
  };
  plan.pairs = {
      {"base-a", "base-flexor-ulnar", "base-extensor-radial"},
      {"base-b", "base-flexor-radial", "base-extensor-ulnar"},
      {distal, distal + "-flexor", distal + "-extensor"},
  };
  return plan;
}

}  // namespace

Eigen::Vector3d hole_position(const JointGeometry& joint, const CableHole& hole, JointEnd end,
                              std::optional<double> radius) {
  const double r = radius.value_or(joint.radius);
  Eigen::Vector3d p;
  if (joint.axis == JointAxis::flexion_y) {
    const FaceHole fh = face_hole(joint, hole.side == CableSide::flexor, r);
    p = {fh.w, lateral_offset(joint, hole.lateral), fh.h};
  } else {
    if (hole.lateral == CableLateral::center) {
      throw Error(ErrorCode::invalid_geometry, "the deviation joint has no center cable holes");
    }
    // Positive deviation bends towards -y, so the ulnar face is the closing one.
    const FaceHole fh = face_hole(joint, hole.lateral == CableLateral::ulnar, r);
    const double x = hole.side == CableSide::flexor ? joint.flex_offset : -joint.flex_offset;
    p = {x, -fh.w, fh.h};
  }
  if (end == JointEnd::distal) p.z() = -p.z();
  return p;
}

double joint_cable_length(const JointGeometry& joint, double angle_deg, const CableHole& hole,
                          std::optional<double> radius, RomCheck check) {
  double angle = angle_deg;
  if (check != RomCheck::none) {
    if (check == RomCheck::clamp) {
      angle = std::clamp(angle, joint.rom_min, joint.rom_max);
    } else if (!(angle >= joint.rom_min - kGeometryTol && angle <= joint.rom_max + kGeometryTol)) {
      throw Error(ErrorCode::rom_violation, "joint angle " + std::to_string(angle_deg) + " deg outside ROM");
    }
  }
  const double r = radius.value_or(joint.radius);
  const Eigen::Vector3d proximal = hole_position(joint, hole, JointEnd::proximal, r);
  const Eigen::Vector3d distal = roll_transform(r, joint.axis, angle) * hole_position(joint, hole, JointEnd::distal, r);
  return (distal - proximal).norm();
}

SideDeviation cable_deviation(const JointGeometry& joint, double angle_deg, std::optional<double> radius,
                              RomCheck check) {
  CableHole closing, opening;
  if (joint.axis == JointAxis::flexion_y) {
    closing = {CableSide::flexor, CableLateral::center};
    opening = {CableSide::extensor, CableLateral::center};
  } else {
    closing = {CableSide::flexor, CableLateral::ulnar};
    opening = {CableSide::flexor, CableLateral::radial};
  }
  auto dev = [&](const CableHole& h) {
    return joint_cable_length(joint, angle_deg, h, radius, check) -
           joint_cable_length(joint, 0.0, h, radius, RomCheck::none);
  };
  return {dev(closing), dev(opening)};
}

const TendonRoutingPlan& routing_plan(FingerKind kind) {
  static const TendonRoutingPlan thumb = make_plan(FingerKind::thumb);
  static const TendonRoutingPlan finger = make_plan(FingerKind::finger);
  return kind == FingerKind::thumb ? thumb : finger;
}

const Tendon& TendonRoutingPlan::tendon(std::string_view name) const {
  for (const auto& t : tendons) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::unknown_tendon, "unknown tendon '" + std::string(name) + "'");
}

const TendonPair& TendonRoutingPlan::pair(std::string_view name) const {
  for (const auto& p : pairs) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::unknown_pair, "unknown tendon pair '" + std::string(name) + "'");
}

double in_link_run(const FingerModel& finger, const Tendon& tendon, int link) {
  if (link < 0 || link > 2) throw Error(ErrorCode::invalid_geometry, "no in-link run for link " + std::to_string(link));
  const CableHole hole{tendon.side, tendon.lateral};
  // Link `link` carries the distal end of joint `link` (frame J_link) and the
  // proximal end of joint `link + 1` (frame L_link = J_link * T_link).
  const Eigen::Vector3d entry = hole_position(finger.joints[link], hole, JointEnd::distal);
  const Eigen::Vector3d exit =
      link_offset(finger, link) * hole_position(finger.joints[link + 1], hole, JointEnd::proximal);
  return (exit - entry).norm();
}

double tendon_length(const FingerModel& finger, const JointAngles& angles, const Tendon& tendon, RomCheck check) {
  const JointAngles q = validate_rom(finger, angles, check);
  const CableHole hole{tendon.side, tendon.lateral};
  double total = 0.0;
  for (int j = tendon.first_joint; j <= tendon.last_joint; ++j) {
    total += joint_cable_length(finger.joints[j], q[j], hole, std::nullopt, RomCheck::none);
    if (j < tendon.last_joint) total += in_link_run(finger, tendon, j);
  }
  return total;
}

double tendon_length(const FingerModel& finger, const JointAngles& angles, std::string_view tendon, RomCheck check) {
  return tendon_length(finger, angles, routing_plan(finger.kind).tendon(tendon), check);
}

double tendon_deviation(const FingerModel& finger, const JointAngles& angles, const Tendon& tendon, RomCheck check) {
  return tendon_length(finger, angles, tendon, check) - tendon_length(finger, {0, 0, 0, 0}, tendon, RomCheck::none);
}

double paired_deviation(const FingerModel& finger, const JointAngles& angles, std::string_view pair, RomCheck check) {
  const auto& plan = routing_plan(finger.kind);
  const auto& p = plan.pair(pair);
  return tendon_deviation(finger, angles, plan.tendon(p.flexor), check) +
         tendon_deviation(finger, angles, plan.tendon(p.extensor), check);
}

std::vector<TendonState> cable_state(const FingerModel& finger, const JointAngles& angles, RomCheck check) {
  const JointAngles q = validate_rom(finger, angles, check);
  std::vector<TendonState> out;
  for (const auto& t : routing_plan(finger.kind).tendons) {
    const double len = tendon_length(finger, q, t, RomCheck::none);
    out.push_back({t.name, len, len - tendon_length(finger, {0, 0, 0, 0}, t, RomCheck::none)});
  }
  return out;
}

}  // namespace rcjhand
