#include "sms/spatial.hpp"

#include <cmath>

namespace sms {

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

Mat3 euler_xyz_dcm(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()))
      .toRotationMatrix();
}

Vec3 dcm_to_euler_xyz(const Mat3& r) {
  // R = Rx(a) Ry(b) Rz(c); R(0,2) = sin(b).
  const double sb = std::clamp(r(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  double a, c;
  if (std::abs(std::cos(b)) > 1e-12) {
    a = std::atan2(-r(1, 2), r(2, 2));
    c = std::atan2(-r(0, 1), r(0, 0));
  } else {
    a = std::atan2(r(2, 1), r(1, 1));  // gimbal lock: fold yaw into roll
    c = 0.0;
  }
  return {a, b, c};
}

Mat3 euler_rate_matrix(const Vec3& rpy) {
  const double cf = std::cos(rpy.x()), sf = std::sin(rpy.x());
  const double ct = std::cos(rpy.y()), st = std::sin(rpy.y());
  Mat3 e;
  // omega = roll_dot * x + pitch_dot * Rx*y + yaw_dot * Rx*Ry*z
  e << 1.0, 0.0, st,
       0.0, cf, -sf * ct,
       0.0, sf, cf * ct;
  return e;
}

Mat3 euler_rate_matrix_dot(const Vec3& rpy, const Vec3& rpy_dot) {
  const double cf = std::cos(rpy.x()), sf = std::sin(rpy.x());
  const double ct = std::cos(rpy.y()), st = std::sin(rpy.y());
  const double fd = rpy_dot.x(), td = rpy_dot.y();
  Mat3 e;
  e << 0.0, 0.0, ct * td,
       0.0, -sf * fd, -cf * fd * ct + sf * st * td,
       0.0, cf * fd, -sf * fd * ct - cf * st * td;
  return e;
}

bool euler_singular(const Vec3& rpy, double tol) {
  return std::abs(std::cos(rpy.y())) < tol;
}

Vec3 rotation_log(const Mat3& r) { return rotation_log(Quat(r)); }

Vec3 rotation_log(const Quat& q) {
  Eigen::AngleAxisd aa(q.normalized());
  double angle = aa.angle();
  if (angle > M_PI) angle -= 2.0 * M_PI;  // shortest rotation
  return angle * aa.axis();
}

SpatialPose SpatialPose::compose(const SpatialPose& other) const {
  return {position + orientation * other.position, orientation * other.orientation};
}

SpatialPose SpatialPose::inverse() const {
  const Quat qi = orientation.conjugate();
  return {qi * (-position), qi};
}

PoseError pose_error(const SpatialPose& a, const SpatialPose& b) {
  return {(a.position - b.position).norm(),
          rotation_log(a.orientation * b.orientation.conjugate()).norm()};
}

}  // namespace sms
