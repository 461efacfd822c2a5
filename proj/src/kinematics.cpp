#include "sms/kinematics.hpp"

#include <sstream>

namespace sms {

BodyPoses forward_kinematics(const SystemModel& model, const GeneralizedState& state) {
  if (state.q.size() != model.dof() || state.q_dot.size() != model.dof()) {
    std::ostringstream s;
    s << "state dimension " << state.q.size() << " does not match model dof "
      << model.dof();
    throw KinematicsError(s.str());
  }
  if (!state.finite()) throw KinematicsError("state has non-finite entries");

  BodyPoses out;
  const Quat r_base = Quat(euler_xyz_dcm(state.base_rpy()));
  out.base = SpatialPose(state.base_position(), r_base);

  for (Arm k : {Arm::A, Arm::B}) {
    const ArmModel& arm = model.arm(k);
    auto& chain = out.links[static_cast<int>(k)];
    chain.reserve(arm.links.size());

    Quat r = r_base;
    Vec3 p = out.base.position + r_base * arm.mount_offset;
    const int off = model.arm_offset(k);
    for (int i = 0; i < arm.dof(); ++i) {
      const ArmLink& link = arm.links[i];
      const Vec3 axis_world = r * link.joint.axis;
      r = r * Quat(Eigen::AngleAxisd(state.q[off + i], link.joint.axis));
      const Vec3 com = p + r * link.body.joint_to_com;
      chain.push_back({SpatialPose(com, r), p, axis_world});
      p = com + r * link.body.com_to_next_joint;
    }
    out.end_effector[static_cast<int>(k)] = SpatialPose(p + r * arm.tool_offset, r);
  }
  return out;
}

MatX geometric_jacobian(const SystemModel& model, const GeneralizedState& state, Arm arm) {
  if (euler_singular(state.base_rpy())) {
    throw EulerSingularityError(
        "base pitch at +-pi/2: Euler-angle rate mapping is singular");
  }
  const BodyPoses poses = forward_kinematics(model, state);
  const int n = model.arm(arm).dof();
  MatX jac = MatX::Zero(6, 6 + n);

  const Vec3 r_e = poses.ee(arm).position;
  const Vec3 r_s = poses.base.position;
  jac.block<3, 3>(0, 0).setIdentity();

  const Mat3 rate_map = euler_rate_matrix(state.base_rpy());
  for (int j = 0; j < 3; ++j) {
    const Vec3 u = rate_map.col(j);
    jac.block<3, 1>(0, 3 + j) = u.cross(r_e - r_s);
    jac.block<3, 1>(3, 3 + j) = u;
  }
  const auto& chain = poses.arm(arm);
  for (int i = 0; i < n; ++i) {
    const Vec3& z = chain[i].joint_axis;
    jac.block<3, 1>(0, 6 + i) = z.cross(r_e - chain[i].joint_position);
    jac.block<3, 1>(3, 6 + i) = z;
  }
  return jac;
}

Vec6 end_effector_velocity(const SystemModel& model, const GeneralizedState& state,
                           Arm arm) {
  const MatX jac = geometric_jacobian(model, state, arm);
  VecX rates(6 + model.arm(arm).dof());
  rates.head<6>() = state.q_dot.head<6>();
  rates.tail(model.arm(arm).dof()) = state.arm_rates(model, arm);
  return jac * rates;
}

Vec3 system_com(const SystemModel& model, const BodyPoses& poses) {
  double total = model.base.mass;
  Vec3 weighted = model.base.mass * poses.base.position;
  for (Arm k : {Arm::A, Arm::B}) {
    const auto& chain = poses.arm(k);
    for (size_t i = 0; i < chain.size(); ++i) {
      const double m = model.arm(k).links[i].body.mass;
      total += m;
      weighted += m * chain[i].com.position;
    }
  }
  return weighted / total;
}

Vec3 system_com(const SystemModel& model, const GeneralizedState& state) {
  return system_com(model, forward_kinematics(model, state));
}

double jacobian_fd_error(const SystemModel& model, const GeneralizedState& state,
                         double eps) {
  double worst = 0.0;
  for (Arm arm : {Arm::A, Arm::B}) {
    const Vec6 twist = end_effector_velocity(model, state, arm);

    GeneralizedState fwd = state, bwd = state;
    fwd.q += eps * state.q_dot;
    bwd.q -= eps * state.q_dot;
    const SpatialPose pose_f = forward_kinematics(model, fwd).ee(arm);
    const SpatialPose pose_b = forward_kinematics(model, bwd).ee(arm);

    Vec6 fd;
    fd.head<3>() = (pose_f.position - pose_b.position) / (2.0 * eps);
    fd.tail<3>() = rotation_log(pose_f.dcm() * pose_b.dcm().transpose()) / (2.0 * eps);

    const double scale = std::max(1.0, twist.norm());
    worst = std::max(worst, (twist - fd).norm() / scale);
  }
  return worst;
}

}  // namespace sms
