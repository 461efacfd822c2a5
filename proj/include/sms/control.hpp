#pragma once

#include <vector>

#include "sms/dynamics.hpp"
#include "sms/schedule.hpp"

namespace sms {

/// Per-joint diagonal PID gains over the actuated coordinates.
struct PidGains {
  VecX kp, ki, kd;

  static PidGains uniform(int n_joints, double kp, double ki, double kd);
  /// Throws ValidationError on negative or size-mismatched gains.
  void validate() const;
};

/// Joint-space tracking error, e = q - q_d on the actuated coordinates.
struct TrackingError {
  VecX e;
  VecX e_dot;
  VecX integral_e;  // rad*s, PID only

  static TrackingError zero(int n_joints);
};

/// Anti-windup clamp for the PID integral term, per joint.
// Anti-windup: with unit-scale integral gains, a clamp this size caps the
// integral torque near the proportional term instead of swamping it during
// the long first-contact transients.
inline constexpr double kIntegralClamp = 2.0;  // rad*s

/// Advances integral_e by e*dt and clamps each entry to +-kIntegralClamp.
void accumulate_integral(TrackingError& error, double dt);

/// PID joint torques.  Returns the torque to apply: -(Kp e + Ki int(e) + Kd e_dot),
/// the restoring sign for e = q - q_d.
VecX pid_torque(const TrackingError& error, const PidGains& gains);

/// Closed-form predictive tracking gains derived from the rolling period.
struct NmpcConfig {
  double rolling_period = 1.0;  // s

  double a1() const { return 10.0 / (3.0 * rolling_period * rolling_period); }
  double a2() const { return 5.0 / (2.0 * rolling_period); }
};

/// Desired trajectory point for the actuated joints.
struct DesiredJointState {
  VecX q;
  VecX q_dot;
  VecX q_ddot;

  /// Set-point regulation: zero desired rates and accelerations.
  static DesiredJointState set_point(const VecX& q_d);
};

/// Closed-form predictive control law: the commanded joint acceleration
/// w = q_ddot_d - a1*e - a2*e_dot is combined with the free-floating base
/// reaction accel (solved from the base rows of H qddot + bias = 0), and the
/// torque u = H*[base_reaction; w] + bias is returned with its base rows
/// zeroed.  With an exact model the closed loop obeys
/// e_ddot + a2*e_dot + a1*e = 0 per joint.
GeneralizedForces nmpc_torque(const SystemModel& model, const GeneralizedState& state,
                              const DesiredJointState& desired, const NmpcConfig& config);

/// Rolling period for a phase: the per-phase override when set (> 0),
/// otherwise 1.0 s before the first grasp and 2.0 s after it.
double rolling_period_schedule(const ScenarioPhase& phase);

/// Trapezoidal 0.5 * integral of e'e over [t_begin, t_end].  Samples must
/// span the window; boundary values are interpolated.  Diagnostic only.
double evaluate_tracking_cost(const std::vector<double>& times,
                              const std::vector<VecX>& errors, double t_begin,
                              double t_end);

}  // namespace sms
