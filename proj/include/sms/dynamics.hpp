#pragma once

#include "sms/kinematics.hpp"
#include "sms/state.hpp"

namespace sms {

struct DynamicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Generalized force vector.  The first six entries (base wrench) are zero
/// for a free-floating system; `internal` builds a vector that satisfies
/// the constraint by construction.
struct GeneralizedForces {
  VecX Q;

  static GeneralizedForces zero(const SystemModel& model) {
    return {VecX::Zero(model.dof())};
  }
  /// joint_torques stacks arm A then arm B actuator torques.
  static GeneralizedForces internal(const SystemModel& model, const VecX& joint_torques);

  Eigen::VectorBlock<const VecX> tau(const SystemModel& m, Arm k) const {
    return Q.segment(m.arm_offset(k), m.arm(k).dof());
  }
  bool free_floating() const { return Q.head<6>().isZero(0.0); }
};

/// Generalized inertia matrix with the block views of the usual
/// base/manipulator partition.
struct InertiaMatrix {
  MatX H;
  int n_a = 0;
  int n_b = 0;

  auto base_block() const { return H.topLeftCorner<6, 6>(); }
  auto coupling_block(Arm k) const {
    return H.block(0, k == Arm::A ? 6 : 6 + n_a, 6, k == Arm::A ? n_a : n_b);
  }
  auto arm_block(Arm k) const {
    const int o = k == Arm::A ? 6 : 6 + n_a;
    const int n = k == Arm::A ? n_a : n_b;
    return H.block(o, o, n, n);
  }
  auto cross_block() const { return H.block(6, 6 + n_a, n_a, n_b); }
};

/// H(q) such that the kinetic energy is (1/2) q_dot' H q_dot.
/// Throws EulerSingularityError near pitch = +-pi/2.
InertiaMatrix inertia_matrix(const SystemModel& model, const GeneralizedState& state);

/// Velocity-dependent generalized force vector C(q, q_dot) q_dot, computed
/// as inverse dynamics at zero generalized acceleration.
VecX bias_forces(const SystemModel& model, const GeneralizedState& state);

/// Generalized force required to realize q_ddot at the given state
/// (no gravity): returns H q_ddot + C q_dot.
VecX inverse_dynamics(const SystemModel& model, const GeneralizedState& state,
                      const VecX& q_ddot);

/// q_ddot solving H q_ddot = Q - bias via Cholesky; an indefinite H is an
/// error (model or state fault), never a fallback.
VecX forward_dynamics(const SystemModel& model, const GeneralizedState& state,
                      const GeneralizedForces& forces);

/// Direct kinetic-energy sum over the base and every link.
double kinetic_energy(const SystemModel& model, const GeneralizedState& state);

struct Momenta {
  Vec3 linear;   // kg m/s
  Vec3 angular;  // kg m^2/s, about the system CoM
};
Momenta momenta(const SystemModel& model, const GeneralizedState& state);

}  // namespace sms
