#include <doctest.h>

#include <cmath>

#include "sms/spatial.hpp"

using namespace sms;

TEST_CASE("skew matrix reproduces the cross product") {
  const Vec3 a(0.3, -1.2, 2.5);
  const Vec3 b(-0.7, 0.4, 1.1);
  CHECK((skew(a) * b - a.cross(b)).norm() == 0.0);
  CHECK((skew(a) + skew(a).transpose()).norm() == 0.0);
}

TEST_CASE("euler_xyz_dcm matches the single-axis rotations") {
  // Pure rotations must agree with Eigen's AngleAxis about each axis.
  const double th = 0.37;
  CHECK((euler_xyz_dcm(Vec3(th, 0, 0)) -
         Eigen::AngleAxisd(th, Vec3::UnitX()).toRotationMatrix())
            .norm() < 1e-15);
  CHECK((euler_xyz_dcm(Vec3(0, th, 0)) -
         Eigen::AngleAxisd(th, Vec3::UnitY()).toRotationMatrix())
            .norm() < 1e-15);
  CHECK((euler_xyz_dcm(Vec3(0, 0, th)) -
         Eigen::AngleAxisd(th, Vec3::UnitZ()).toRotationMatrix())
            .norm() < 1e-15);

  // Intrinsic X-Y-Z composes as Rx * Ry * Rz.
  const Vec3 rpy(0.2, -0.5, 1.1);
  const Mat3 expect = Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()).toRotationMatrix() *
                      Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()).toRotationMatrix() *
                      Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()).toRotationMatrix();
  CHECK((euler_xyz_dcm(rpy) - expect).norm() < 1e-15);
}

TEST_CASE("dcm_to_euler_xyz inverts euler_xyz_dcm") {
  const Vec3 rpy(-2.9, 1.2, 0.7);
  const Vec3 back = dcm_to_euler_xyz(euler_xyz_dcm(rpy));
  CHECK((back - rpy).norm() < 1e-12);
}

TEST_CASE("euler_rate_matrix maps rates to angular velocity") {
  // omega = d/dt of the rotation: compare against a central difference of
  // the DCM, using the identity omega_skew = Rdot * R'.
  const Vec3 rpy(0.3, -0.4, 0.9);
  const Vec3 rpy_dot(0.7, 0.2, -0.5);
  const double h = 1e-6;
  const Mat3 r_plus = euler_xyz_dcm(rpy + h * rpy_dot);
  const Mat3 r_minus = euler_xyz_dcm(rpy - h * rpy_dot);
  const Mat3 rdot = (r_plus - r_minus) / (2.0 * h);
  const Mat3 omega_skew = rdot * euler_xyz_dcm(rpy).transpose();
  const Vec3 omega_fd(omega_skew(2, 1), omega_skew(0, 2), omega_skew(1, 0));
  const Vec3 omega = euler_rate_matrix(rpy) * rpy_dot;
  CHECK((omega - omega_fd).norm() < 1e-8);
}

TEST_CASE("euler_rate_matrix_dot matches a finite difference") {
  const Vec3 rpy(0.3, -0.4, 0.9);
  const Vec3 rpy_dot(0.7, 0.2, -0.5);
  const double h = 1e-6;
  const Mat3 fd = (euler_rate_matrix(rpy + h * rpy_dot) -
                   euler_rate_matrix(rpy - h * rpy_dot)) /
                  (2.0 * h);
  CHECK((euler_rate_matrix_dot(rpy, rpy_dot) - fd).norm() < 1e-8);
}

TEST_CASE("euler singularity detection") {
  CHECK(euler_singular(Vec3(0.1, M_PI / 2, 0.3)));
  CHECK(euler_singular(Vec3(0.1, -M_PI / 2 + 1e-9, 0.3)));
  CHECK_FALSE(euler_singular(Vec3(0.1, 1.2, 0.3)));
  CHECK(std::abs(euler_rate_matrix(Vec3(0, M_PI / 2, 0)).determinant()) < 1e-12);
}

TEST_CASE("rotation_log inverts the exponential map") {
  const Vec3 axis = Vec3(0.3, -0.5, 0.8).normalized();
  const double angle = 1.3;
  const Mat3 r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  CHECK((rotation_log(r) - angle * axis).norm() < 1e-12);
  CHECK(rotation_log(Mat3::Identity()).norm() == 0.0);
  CHECK((rotation_log(Quat(r)) - angle * axis).norm() < 1e-12);

  // Near pi the log is still well defined.
  const Mat3 r_pi = Eigen::AngleAxisd(M_PI - 1e-7, Vec3::UnitZ()).toRotationMatrix();
  CHECK(std::abs(rotation_log(r_pi).norm() - (M_PI - 1e-7)) < 1e-5);
}

TEST_CASE("pose compose and inverse") {
  const SpatialPose a(Vec3(1, 2, 3), Quat(Eigen::AngleAxisd(0.7, Vec3::UnitZ())));
  const SpatialPose b(Vec3(-0.5, 0.1, 0.4), Quat(Eigen::AngleAxisd(-0.4, Vec3::UnitX())));

  const SpatialPose ab = a.compose(b);
  CHECK((ab.position - (a.position + a.orientation * b.position)).norm() < 1e-15);
  CHECK((ab.dcm() - a.dcm() * b.dcm()).norm() < 1e-15);

  const SpatialPose id = a.compose(a.inverse());
  CHECK(id.position.norm() < 1e-15);
  CHECK(rotation_log(id.orientation).norm() < 1e-15);

  CHECK((a.apply(Vec3(0.2, 0, 0)) - (a.position + 0.2 * a.dcm().col(0))).norm() <
        1e-15);
}

TEST_CASE("pose constructor keeps normalized quaternions bit-exact") {
  // A quaternion that is already unit to within 1e-12 must not be touched:
  // store/load round trips rely on this.
  Quat q(Eigen::AngleAxisd(0.7, Vec3(0.3, -0.5, 0.8).normalized()));
  const SpatialPose p(Vec3::Zero(), q);
  CHECK(p.orientation.coeffs() == q.coeffs());

  // A badly scaled one gets normalized.
  Quat off(2.0, 0.0, 0.0, 0.0);
  const SpatialPose p2(Vec3::Zero(), off);
  CHECK(std::abs(p2.orientation.norm() - 1.0) < 1e-15);
}

TEST_CASE("pose_error reports distance and angle") {
  const SpatialPose a(Vec3(0, 0, 0), Quat::Identity());
  const SpatialPose b(Vec3(3, 4, 0), Quat(Eigen::AngleAxisd(0.25, Vec3::UnitY())));
  const PoseError e = pose_error(a, b);
  CHECK(e.position == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(e.rotation == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("pose equality is exact") {
  const SpatialPose a(Vec3(0.1, 0.2, 0.3), Quat(Eigen::AngleAxisd(0.5, Vec3::UnitZ())));
  SpatialPose b = a;
  CHECK(a == b);
  b.position.x() += 1e-16;
  CHECK(a != b);
}
