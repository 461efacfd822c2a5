#pragma once

#include "sms/kinematics.hpp"
#include "sms/state.hpp"

namespace sms {

/// Pose-level IK request.  The base pose is taken from initial_guess and
/// held fixed while iterating; only arm joint angles move.
struct IkRequest {
  Arm arm = Arm::A;
  SpatialPose target;
  GeneralizedState initial_guess;  // full configuration, base locked from here
  double position_weight = 1.0;
  double orientation_weight = 0.5;
  int max_iterations = 100;
  double position_tolerance = 1e-5;     // m
  double orientation_tolerance = 1e-4;  // rad
  double initial_damping = 1e-3;
  double max_step = 0.5;    // per-iteration step cap, rad (inf-norm)
  int max_restarts = 6;     // deterministic scattered retries on a stall

  // Optional redundancy resolution: penalize the nullspace-projected offset
  // w * N * (theta - anchor) alongside the pose residual, N being the
  // projector onto the Jacobian's nullspace.  Pins the arm's self-motion when
  // the same target is re-solved as the base moves, without ever trading task
  // accuracy for posture; leave the anchor empty to disable.
  VecX posture_anchor;
  double posture_weight = 0.0;
};

struct IkResult {
  VecX joint_angles;  // arm joints only
  bool converged = false;
  PoseError residual{0.0, 0.0};
  int iterations = 0;
};

/// Levenberg-Marquardt damped least squares with the base locked.
/// Damping is multiplicative (x10 on a rejected step, /10 on an accepted
/// one); steps are capped at max_step per iteration so large orientation
/// errors cannot throw the iterate across the workspace.  Joint limits are
/// enforced by clamping with re-linearization.  If the first descent stalls,
/// up to max_restarts scattered (deterministic) initial guesses are tried
/// and the lowest-residual attempt wins.  Non-convergence is reported
/// through the result, never an exception.
IkResult solve_ik_lm(const SystemModel& model, const IkRequest& request);

/// Minimum-norm rate solution q_dot = pinv(J) * v via SVD; singular values
/// below 1e-8 * sigma_max are truncated.
VecX rate_ik_pseudoinverse(const MatX& jacobian, const VecX& desired_velocity);

}  // namespace sms
