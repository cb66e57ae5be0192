#include "rcjhand/transform.hpp"

#include <cmath>

#include "rcjhand/error.hpp"
#include "rcjhand/units.hpp"

namespace rcjhand {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_geometry: return "invalid-geometry";
    case ErrorCode::rom_violation: return "rom-violation";
    case ErrorCode::unknown_tendon: return "unknown-tendon";
    case ErrorCode::unknown_pair: return "unknown-pair";
    case ErrorCode::no_minimum_found: return "no-minimum-found";
    case ErrorCode::empty_rom: return "empty-rom";
    case ErrorCode::resolution_mismatch: return "resolution-mismatch";
    case ErrorCode::coupling_violation: return "coupling-violation";
    case ErrorCode::unreachable_payout: return "unreachable-payout";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::unknown_preset: return "unknown-preset";
    case ErrorCode::no_overlap: return "no-overlap";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::io_error: return "io-error";
  }
  return "error";
}

RigidTransform RigidTransform::from_translation(const Eigen::Vector3d& t) {
  return {Eigen::Matrix3d::Identity(), t};
}

RigidTransform RigidTransform::rot_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rot_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rot_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return {r, Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis, double deg,
                                               const Eigen::Vector3d& translation) {
  if (deg == 0.0) return from_translation(translation);
  const double n = axis.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::invalid_geometry, "rotation axis must be non-zero");
  const Eigen::Matrix3d r = Eigen::AngleAxisd(deg2rad(deg), axis / n).toRotationMatrix();
  return {r, translation};
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

bool RigidTransform::is_proper(double tol) const {
  const Eigen::Matrix3d gram = rotation_.transpose() * rotation_;
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation_.determinant() - 1.0) <= tol && translation_.allFinite();
}

void RigidTransform::to_axis_angle(Eigen::Vector3d& axis, double& deg) const {
  const Eigen::AngleAxisd aa(rotation_);
  deg = rad2deg(aa.angle());
  axis = aa.axis();
  if (deg == 0.0) axis = Eigen::Vector3d::UnitZ();
}

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.rotation() - b.rotation()).cwiseAbs().maxCoeff() <= tol &&
         (a.translation() - b.translation()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace rcjhand
