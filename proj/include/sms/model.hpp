#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sms/spatial.hpp"

namespace sms {

/// Inertial parameters of one rigid body plus the two chain offsets:
/// joint_to_com runs from the body's inboard joint to its CoM, and
/// com_to_next_joint from the CoM to the outboard joint (for the last link
/// of an arm this is the end-effector frame).  Both are constant in the
/// body frame.  The inertia tensor is about the CoM, in the body frame.
struct RigidBodyParams {
  std::string name;
  double mass = 0.0;
  Mat3 inertia = Mat3::Zero();
  Vec3 joint_to_com = Vec3::Zero();       // d
  Vec3 com_to_next_joint = Vec3::Zero();  // b
};

/// Revolute joint: axis is a unit vector in the parent body frame
/// (equivalently, in the shared zero-configuration orientation).
struct JointParams {
  std::string name;
  Vec3 axis = Vec3::UnitZ();
  double limit_min = -2.0 * M_PI;
  double limit_max = 2.0 * M_PI;
};

struct ArmLink {
  RigidBodyParams body;
  JointParams joint;
};

struct ArmModel {
  Vec3 mount_offset = Vec3::Zero();  // base CoM to first joint, base frame
  Vec3 tool_offset = Vec3::Zero();   // end-effector frame to tool point
  std::vector<ArmLink> links;

  int dof() const { return static_cast<int>(links.size()); }
  double total_mass() const;
};

enum class Arm { A = 0, B = 1 };
inline const char* arm_name(Arm a) { return a == Arm::A ? "A" : "B"; }

struct SystemModel {
  std::string name;
  RigidBodyParams base;
  ArmModel arm_a;
  ArmModel arm_b;

  const ArmModel& arm(Arm k) const { return k == Arm::A ? arm_a : arm_b; }
  ArmModel& arm(Arm k) { return k == Arm::A ? arm_a : arm_b; }

  int dof() const { return 6 + arm_a.dof() + arm_b.dof(); }
  /// Offset of arm k's first joint coordinate within the generalized vector.
  int arm_offset(Arm k) const { return k == Arm::A ? 6 : 6 + arm_a.dof(); }

  /// Returns every violated invariant, empty when the model is valid.
  std::vector<std::string> validate() const;
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
  std::vector<std::string> violations;
};

/// Throws ValidationError listing every violation.
void validate_or_throw(const SystemModel& model);

/// (arm A mass + arm B mass) / base mass.
double mass_ratio(const SystemModel& model);

}  // namespace sms
