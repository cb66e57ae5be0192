#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rcjhand {

/// Proper rigid motion (rotation + translation in mm) acting on points.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Eigen::Vector3d& t);
  static RigidTransform rot_x(double rad);
  static RigidTransform rot_y(double rad);
  static RigidTransform rot_z(double rad);
  /// Rotation of `deg` degrees about `axis` (normalised internally), then translation.
  static RigidTransform from_axis_angle(const Eigen::Vector3d& axis, double deg,
                                        const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation_ * rhs.rotation_, rotation_ * rhs.translation_ + translation_};
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation_ * point + translation_;
  }

  RigidTransform inverse() const;
  Eigen::Matrix4d matrix() const;

  /// Orthonormal with det +1 within `tol`.
  bool is_proper(double tol = 1e-9) const;

  /// Same rotation, translation scaled by `s` (uniform scaling of the scene).
  RigidTransform scaled(double s) const { return {rotation_, translation_ * s}; }

  /// Axis (unit) and angle in degrees; angle in [0, 180].
  void to_axis_angle(Eigen::Vector3d& axis, double& deg) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol = 1e-9);

}  // namespace rcjhand
