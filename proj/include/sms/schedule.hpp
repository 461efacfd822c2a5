#pragma once

#include <array>
#include <string>
#include <vector>

#include "sms/model.hpp"
#include "sms/spatial.hpp"

namespace sms {

/// Per-arm directive for one phase: drive the end effector to a pose, or
/// hold whatever joint configuration the arm had when the phase began.
enum class GoalKind { hold, move };

struct ArmGoal {
  GoalKind kind = GoalKind::hold;
  SpatialPose target;  // meaningful only when kind == move
};

inline bool operator==(const ArmGoal& a, const ArmGoal& b) {
  if (a.kind != b.kind) return false;
  return a.kind == GoalKind::hold || a.target == b.target;
}

enum class GraspAction { grasp, release };

/// Fires at the start of its phase; events within a phase run in list order.
struct PhaseEvent {
  GraspAction action = GraspAction::grasp;
  Arm arm = Arm::A;
};

inline bool operator==(const PhaseEvent& a, const PhaseEvent& b) {
  return a.action == b.action && a.arm == b.arm;
}

struct ScenarioPhase {
  std::string name;
  double start_time = 0.0;  // s
  std::array<ArmGoal, 2> goals{};
  std::vector<PhaseEvent> events;
  bool post_grasp = false;              // set by TaskSchedule::finalize()
  double rolling_period_override = 0.0; // <= 0 means "use the grasp rule"

  const ArmGoal& goal(Arm arm) const { return goals[static_cast<int>(arm)]; }
};

bool operator==(const ScenarioPhase& a, const ScenarioPhase& b);

/// Time-ordered phase list covering [0, total_time).  The event sequence may
/// never leave the deputy attached to both arms at once (no closed chain).
struct TaskSchedule {
  double total_time = 0.0;  // s
  std::vector<ScenarioPhase> phases;

  /// Recomputes post_grasp flags and validates ordering and the
  /// single-attachment invariant.  Throws ValidationError.
  void finalize();

  /// Index of the phase active at time t (t clamped into [0, total_time]).
  int phase_at(double t) const;
};

bool operator==(const TaskSchedule& a, const TaskSchedule& b);

/// Numeric poses of the bundled handover scenario.  The deputy is grasped
/// through a fixed offset: deputy pose = end-effector pose ∘ grasp_offset.
struct HandoverGeometry {
  SpatialPose deputy_start;
  SpatialPose handover_pose;     // deputy pose where the arms meet
  SpatialPose demo_pose;         // deputy pose presented at the end
  SpatialPose receive_staging;   // arm B end-effector pose while it waits
  SpatialPose grasp_offset_a;
  SpatialPose grasp_offset_b;

  const SpatialPose& grasp_offset(Arm arm) const {
    return arm == Arm::A ? grasp_offset_a : grasp_offset_b;
  }
};

HandoverGeometry default_handover_geometry();

/// The bundled 60 s handover: arm A approaches and grasps the deputy at
/// t = 20 s while arm B moves partway toward its receiving grip; arm A then
/// carries the deputy to the handover point as arm B closes the rest of the
/// way; at t = 45 s arm A releases and arm B grasps (in that order) and
/// carries the deputy to the demonstration pose.
TaskSchedule default_handover_schedule();

}  // namespace sms
