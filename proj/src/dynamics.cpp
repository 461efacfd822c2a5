#include "sms/dynamics.hpp"

#include <Eigen/Cholesky>
#include <sstream>

namespace sms {

GeneralizedForces GeneralizedForces::internal(const SystemModel& model,
                                              const VecX& joint_torques) {
  const int n = model.arm_a.dof() + model.arm_b.dof();
  if (joint_torques.size() != n) {
    std::ostringstream s;
    s << "expected " << n << " joint torques, got " << joint_torques.size();
    throw DynamicsError(s.str());
  }
  GeneralizedForces f{VecX::Zero(model.dof())};
  f.Q.tail(n) = joint_torques;
  return f;
}

namespace {

// Per-body world-frame kinematic and inertial quantities along one arm.
struct BodyMotion {
  Vec3 com;        // CoM position
  Vec3 vel;        // CoM velocity
  Vec3 omega;      // angular velocity
  Vec3 acc;        // CoM acceleration
  Vec3 omega_dot;  // angular acceleration
  Mat3 inertia_w;  // CoM inertia in world axes, symmetrized
  double mass;
};

struct SystemMotion {
  BodyMotion base;
  std::array<std::vector<BodyMotion>, 2> links;
  Mat3 rate_map;      // Euler-rate to angular-velocity map E
  Mat3 rate_map_dot;  // dE/dt along the current rates
};

Mat3 world_inertia(const Mat3& r, const Mat3& local) {
  const Mat3 iw = r * local * r.transpose();
  return 0.5 * (iw + iw.transpose());
}

// Velocity and (optionally) acceleration recursion over all bodies.
// q_ddot == nullptr computes the zero-acceleration sweep used for bias.
SystemMotion sweep_motion(const SystemModel& model, const GeneralizedState& state,
                          const BodyPoses& poses, const VecX* q_ddot) {
  SystemMotion out;
  const Vec3 rpy = state.base_rpy();
  const Vec3 rpy_dot = state.base_rpy_rates();
  out.rate_map = euler_rate_matrix(rpy);
  out.rate_map_dot = euler_rate_matrix_dot(rpy, rpy_dot);

  BodyMotion& base = out.base;
  base.com = poses.base.position;
  base.vel = state.base_velocity();
  base.omega = out.rate_map * rpy_dot;
  base.mass = model.base.mass;
  base.inertia_w = world_inertia(poses.base.dcm(), model.base.inertia);
  base.acc.setZero();
  base.omega_dot = out.rate_map_dot * rpy_dot;
  if (q_ddot) {
    base.acc = q_ddot->segment<3>(0);
    base.omega_dot += out.rate_map * q_ddot->segment<3>(3);
  }

  for (Arm k : {Arm::A, Arm::B}) {
    const ArmModel& arm = model.arm(k);
    const auto& chain = poses.arm(k);
    auto& bodies = out.links[static_cast<int>(k)];
    bodies.resize(chain.size());
    const int off = model.arm_offset(k);

    // Running point state at the chain attachment, starting from the mount.
    Vec3 p = base.com + poses.base.orientation * arm.mount_offset;
    Vec3 lever = p - base.com;
    Vec3 v = base.vel + base.omega.cross(lever);
    Vec3 a = base.acc + base.omega_dot.cross(lever) +
             base.omega.cross(base.omega.cross(lever));
    Vec3 omega = base.omega;
    Vec3 omega_dot = base.omega_dot;

    for (size_t i = 0; i < chain.size(); ++i) {
      const double qd = state.q_dot[off + static_cast<int>(i)];
      const Vec3& z = chain[i].joint_axis;
      omega_dot += omega.cross(z) * qd;
      if (q_ddot) omega_dot += z * (*q_ddot)[off + static_cast<int>(i)];
      omega += z * qd;

      BodyMotion& b = bodies[i];
      b.mass = arm.links[i].body.mass;
      b.inertia_w = world_inertia(chain[i].com.dcm(), arm.links[i].body.inertia);
      b.com = chain[i].com.position;
      lever = b.com - p;
      b.vel = v + omega.cross(lever);
      b.acc = a + omega_dot.cross(lever) + omega.cross(omega.cross(lever));
      b.omega = omega;
      b.omega_dot = omega_dot;

      // Advance the running point to the next joint.
      const Vec3 next = b.com + chain[i].com.orientation *
                                    arm.links[i].body.com_to_next_joint;
      lever = next - b.com;
      v = b.vel + omega.cross(lever);
      a = b.acc + omega_dot.cross(lever) + omega.cross(omega.cross(lever));
      p = next;
    }
  }
  return out;
}

void require_regular_rates(const GeneralizedState& state) {
  if (euler_singular(state.base_rpy())) {
    throw EulerSingularityError(
        "base pitch at +-pi/2: Euler-angle rate mapping is singular");
  }
}

// Compact CoM Jacobian of link i on arm k: columns are the 6 base
// coordinates followed by that arm's joints 1..i+1.  Filled in place.
void link_jacobian(const BodyPoses& poses, const Mat3& rate_map, Arm k, int i,
                   const Vec3& com, MatX& jv, MatX& jw) {
  const auto& chain = poses.arm(k);
  const Vec3 r_s = poses.base.position;
  jv.setZero(3, 6 + i + 1);
  jw.setZero(3, 6 + i + 1);
  jv.block<3, 3>(0, 0).setIdentity();
  for (int j = 0; j < 3; ++j) {
    const Vec3 u = rate_map.col(j);
    jv.col(3 + j) = u.cross(com - r_s);
    jw.col(3 + j) = u;
  }
  for (int l = 0; l <= i; ++l) {
    const Vec3& z = chain[l].joint_axis;
    jv.col(6 + l) = z.cross(com - chain[l].joint_position);
    jw.col(6 + l) = z;
  }
}

// Scatters a compact (6 + c)-column contribution into the full matrix.
void accumulate_blocks(MatX& h, const MatX& contrib, int off, int c) {
  h.topLeftCorner<6, 6>() += contrib.topLeftCorner<6, 6>();
  h.block(0, off, 6, c) += contrib.block(0, 6, 6, c);
  h.block(off, 0, c, 6) += contrib.block(6, 0, c, 6);
  h.block(off, off, c, c) += contrib.block(6, 6, c, c);
}

}  // namespace

InertiaMatrix inertia_matrix(const SystemModel& model, const GeneralizedState& state) {
  require_regular_rates(state);
  const BodyPoses poses = forward_kinematics(model, state);
  const Mat3 rate_map = euler_rate_matrix(state.base_rpy());

  InertiaMatrix out;
  out.n_a = model.arm_a.dof();
  out.n_b = model.arm_b.dof();
  out.H = MatX::Zero(model.dof(), model.dof());

  // Base body: translational block is m_b I3, rotational block E' Iw E.
  out.H.topLeftCorner<3, 3>() = model.base.mass * Mat3::Identity();
  const Mat3 iw_base = world_inertia(poses.base.dcm(), model.base.inertia);
  out.H.block<3, 3>(3, 3) = rate_map.transpose() * iw_base * rate_map;

  MatX jv, jw, contrib;
  for (Arm k : {Arm::A, Arm::B}) {
    const ArmModel& arm = model.arm(k);
    const auto& chain = poses.arm(k);
    const int off = model.arm_offset(k);
    for (int i = 0; i < arm.dof(); ++i) {
      const RigidBodyParams& body = arm.links[i].body;
      link_jacobian(poses, rate_map, k, i, chain[i].com.position, jv, jw);
      const Mat3 iw = world_inertia(chain[i].com.dcm(), body.inertia);
      contrib.noalias() = body.mass * (jv.transpose() * jv);
      contrib.noalias() += jw.transpose() * (iw * jw);
      accumulate_blocks(out.H, contrib, off, i + 1);
    }
  }
  return out;
}

VecX inverse_dynamics(const SystemModel& model, const GeneralizedState& state,
                      const VecX& q_ddot) {
  require_regular_rates(state);
  if (q_ddot.size() != model.dof()) throw DynamicsError("q_ddot dimension mismatch");
  const BodyPoses poses = forward_kinematics(model, state);
  const SystemMotion motion = sweep_motion(model, state, poses, &q_ddot);

  VecX q_force = VecX::Zero(model.dof());
  // Base body contribution: rows 0..2 get the force, rows 3..5 E' * torque.
  const BodyMotion& base = motion.base;
  q_force.segment<3>(0) = base.mass * base.acc;
  const Vec3 torque_base =
      base.inertia_w * base.omega_dot + base.omega.cross(base.inertia_w * base.omega);
  q_force.segment<3>(3) = motion.rate_map.transpose() * torque_base;

  MatX jv, jw;
  for (Arm k : {Arm::A, Arm::B}) {
    const auto& bodies = motion.links[static_cast<int>(k)];
    const int off = model.arm_offset(k);
    for (size_t i = 0; i < bodies.size(); ++i) {
      const BodyMotion& b = bodies[i];
      link_jacobian(poses, motion.rate_map, k, static_cast<int>(i), b.com, jv, jw);
      const Vec3 force = b.mass * b.acc;
      const Vec3 torque = b.inertia_w * b.omega_dot + b.omega.cross(b.inertia_w * b.omega);
      VecX contrib = jv.transpose() * force + jw.transpose() * torque;
      q_force.head<6>() += contrib.head<6>();
      q_force.segment(off, i + 1) += contrib.tail(static_cast<int>(i) + 1);
    }
  }
  return q_force;
}

VecX bias_forces(const SystemModel& model, const GeneralizedState& state) {
  return inverse_dynamics(model, state, VecX::Zero(model.dof()));
}

VecX forward_dynamics(const SystemModel& model, const GeneralizedState& state,
                      const GeneralizedForces& forces) {
  if (forces.Q.size() != model.dof()) throw DynamicsError("forces dimension mismatch");
  if (!forces.free_floating()) {
    throw DynamicsError("generalized forces violate the free-floating constraint "
                        "(nonzero base wrench)");
  }
  const InertiaMatrix inertia = inertia_matrix(model, state);
  const VecX rhs = forces.Q - bias_forces(model, state);
  Eigen::LLT<MatX> llt(inertia.H);
  if (llt.info() != Eigen::Success) {
    throw DynamicsError("inertia matrix is numerically indefinite");
  }
  return llt.solve(rhs);
}

double kinetic_energy(const SystemModel& model, const GeneralizedState& state) {
  const BodyPoses poses = forward_kinematics(model, state);
  const SystemMotion motion = sweep_motion(model, state, poses, nullptr);
  auto body_energy = [](const BodyMotion& b) {
    return 0.5 * (b.mass * b.vel.squaredNorm() + b.omega.dot(b.inertia_w * b.omega));
  };
  double t = body_energy(motion.base);
  for (const auto& chain : motion.links)
    for (const auto& b : chain) t += body_energy(b);
  return t;
}

Momenta momenta(const SystemModel& model, const GeneralizedState& state) {
  const BodyPoses poses = forward_kinematics(model, state);
  const SystemMotion motion = sweep_motion(model, state, poses, nullptr);
  const Vec3 com = system_com(model, poses);

  Momenta out{Vec3::Zero(), Vec3::Zero()};
  auto add = [&](const BodyMotion& b) {
    out.linear += b.mass * b.vel;
    out.angular += (b.com - com).cross(b.mass * b.vel) + b.inertia_w * b.omega;
  };
  add(motion.base);
  for (const auto& chain : motion.links)
    for (const auto& b : chain) add(b);
  return out;
}

}  // namespace sms
