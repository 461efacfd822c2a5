#pragma once

#include <random>

#include "sms/model.hpp"
#include "sms/spatial.hpp"

namespace sms {

/// Generalized coordinates and rates.  Layout of q:
///   [0..2]  base CoM position in the inertial frame (m)
///   [3..5]  base attitude, intrinsic X-Y-Z Euler angles (rad)
///   [6..]   arm A joint angles, then arm B joint angles (rad)
/// q_dot holds the matching rates (Euler-angle rates for [3..5]).
struct GeneralizedState {
  VecX q;
  VecX q_dot;

  static GeneralizedState zero(const SystemModel& model) {
    GeneralizedState s;
    s.q = VecX::Zero(model.dof());
    s.q_dot = VecX::Zero(model.dof());
    return s;
  }

  Vec3 base_position() const { return q.segment<3>(0); }
  Vec3 base_rpy() const { return q.segment<3>(3); }
  Vec3 base_velocity() const { return q_dot.segment<3>(0); }
  Vec3 base_rpy_rates() const { return q_dot.segment<3>(3); }

  Eigen::VectorBlock<const VecX> arm_angles(const SystemModel& m, Arm k) const {
    return q.segment(m.arm_offset(k), m.arm(k).dof());
  }
  Eigen::VectorBlock<const VecX> arm_rates(const SystemModel& m, Arm k) const {
    return q_dot.segment(m.arm_offset(k), m.arm(k).dof());
  }

  bool finite() const { return q.allFinite() && q_dot.allFinite(); }
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Checks dimension, finiteness, and (wrapped) joint limits; returns the
/// list of violations, empty when the state is consistent with the model.
std::vector<std::string> validate_state(const SystemModel& model,
                                        const GeneralizedState& state);

/// Uniform random state for verification sweeps: base position in
/// [-0.5, 0.5], roll/yaw in [-pi, pi], pitch in [-1.2, 1.2] (clear of the
/// Euler singularity), joints within limits clipped to [-pi, pi], all
/// rates in [-0.5, 0.5].
GeneralizedState random_state(const SystemModel& model, std::mt19937& rng);

}  // namespace sms
