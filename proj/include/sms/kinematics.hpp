#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "sms/state.hpp"

namespace sms {

struct KinematicsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when the base pitch angle sits at +-pi/2 and the Euler-rate
/// mapping degenerates.
struct EulerSingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

struct LinkPose {
  SpatialPose com;      // link CoM position + link frame orientation
  Vec3 joint_position;  // inboard joint, inertial frame
  Vec3 joint_axis;      // joint axis, inertial frame
};

struct BodyPoses {
  SpatialPose base;
  std::array<std::vector<LinkPose>, 2> links;     // indexed by Arm
  std::array<SpatialPose, 2> end_effector;        // tool point + chain orientation

  const std::vector<LinkPose>& arm(Arm k) const { return links[static_cast<int>(k)]; }
  const SpatialPose& ee(Arm k) const { return end_effector[static_cast<int>(k)]; }
};

/// Inertial poses of the base, every link CoM, joint, and end-effector.
/// Throws KinematicsError on dimension mismatch or non-finite state.
BodyPoses forward_kinematics(const SystemModel& model, const GeneralizedState& state);

/// Geometric Jacobian of arm k's end-effector: maps
/// [base velocity (3); Euler-angle rates (3); arm k joint rates (n)]
/// to the end-effector [linear; angular] inertial velocity.  The other
/// arm's joints do not appear (they cannot move this end-effector).
/// Throws EulerSingularityError near pitch = +-pi/2.
MatX geometric_jacobian(const SystemModel& model, const GeneralizedState& state, Arm arm);

/// geometric_jacobian times the stacked [base; arm k] rates.
Vec6 end_effector_velocity(const SystemModel& model, const GeneralizedState& state, Arm arm);

/// Mass-weighted mean of the base and link CoM positions.
Vec3 system_com(const SystemModel& model, const GeneralizedState& state);
Vec3 system_com(const SystemModel& model, const BodyPoses& poses);

/// Verification helper: relative error between the Jacobian-predicted
/// end-effector twist J q_dot and a central finite difference of the
/// forward kinematics along q_dot, max over both arms.
double jacobian_fd_error(const SystemModel& model, const GeneralizedState& state,
                         double eps = 1e-6);

}  // namespace sms
