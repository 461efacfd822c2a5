#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace sms {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// DCM for intrinsic X-Y-Z (roll, pitch, yaw) Euler angles: R = Rx * Ry * Rz.
Mat3 euler_xyz_dcm(const Vec3& rpy);

/// Recovers intrinsic X-Y-Z angles from a DCM (pitch in [-pi/2, pi/2]).
Vec3 dcm_to_euler_xyz(const Mat3& r);

/// Maps intrinsic X-Y-Z Euler-angle rates to the inertial angular velocity:
/// omega = euler_rate_matrix(rpy) * rpy_dot.  Columns are the instantaneous
/// rotation axes; det = cos(pitch), so the map degenerates at pitch = +-pi/2.
Mat3 euler_rate_matrix(const Vec3& rpy);

/// Time derivative of euler_rate_matrix along rpy_dot.
Mat3 euler_rate_matrix_dot(const Vec3& rpy, const Vec3& rpy_dot);

/// True when pitch is within tol of +-pi/2 (Euler kinematics singular).
bool euler_singular(const Vec3& rpy, double tol = 1e-6);

/// Rotation-vector (log map) of a rotation, angle * axis.
Vec3 rotation_log(const Mat3& r);
Vec3 rotation_log(const Quat& q);

/// Position + orientation of a frame relative to the inertial frame.
/// Orientation is stored as a unit quaternion.  Construction renormalizes
/// only when the input is measurably off-unit, so already-normalized
/// coefficients survive a store/load round trip bit-for-bit.
struct SpatialPose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  SpatialPose() = default;
  SpatialPose(const Vec3& p, const Quat& q) : position(p), orientation(q) {
    if (std::abs(orientation.squaredNorm() - 1.0) > 1e-12) orientation.normalize();
  }
  SpatialPose(const Vec3& p, const Mat3& r) : SpatialPose(p, Quat(r)) {}

  Mat3 dcm() const { return orientation.toRotationMatrix(); }

  /// this * other: other expressed in this frame, result in the inertial frame.
  SpatialPose compose(const SpatialPose& other) const;
  SpatialPose inverse() const;

  /// Applies the pose to a point given in the local frame.
  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
};

/// Exact (bitwise) equality; used by round-trip and schedule-identity tests.
inline bool operator==(const SpatialPose& a, const SpatialPose& b) {
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs();
}
inline bool operator!=(const SpatialPose& a, const SpatialPose& b) { return !(a == b); }

/// Position distance and rotation angle between two poses.
struct PoseError {
  double position;  // m
  double rotation;  // rad
};
PoseError pose_error(const SpatialPose& a, const SpatialPose& b);

}  // namespace sms
