#include "sms/schedule.hpp"

#include <optional>
#include <sstream>

namespace sms {

bool operator==(const ScenarioPhase& a, const ScenarioPhase& b) {
  return a.name == b.name && a.start_time == b.start_time && a.goals == b.goals &&
         a.events == b.events && a.post_grasp == b.post_grasp &&
         a.rolling_period_override == b.rolling_period_override;
}

bool operator==(const TaskSchedule& a, const TaskSchedule& b) {
  return a.total_time == b.total_time && a.phases == b.phases;
}

void TaskSchedule::finalize() {
  std::vector<std::string> violations;
  if (!(total_time > 0.0)) violations.push_back("total_time must be positive");
  if (phases.empty()) violations.push_back("schedule has no phases");

  std::optional<Arm> holder;
  bool grasped_once = false;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    ScenarioPhase& phase = phases[i];
    const std::string label = "phase '" + phase.name + "'";
    if (i == 0 && phase.start_time != 0.0)
      violations.push_back(label + ": first phase must start at t = 0");
    if (i > 0 && !(phase.start_time > phases[i - 1].start_time))
      violations.push_back(label + ": start times must strictly increase");
    if (phase.start_time >= total_time)
      violations.push_back(label + ": starts at or after total_time");
    for (Arm arm : {Arm::A, Arm::B}) {
      const ArmGoal& goal = phase.goal(arm);
      if (goal.kind == GoalKind::move && !goal.target.position.allFinite())
        violations.push_back(label + ": non-finite pose goal");
    }
    for (const PhaseEvent& event : phase.events) {
      if (event.action == GraspAction::grasp) {
        if (holder)
          violations.push_back(label + ": grasp while the deputy is already attached");
        holder = event.arm;
        grasped_once = true;
      } else {
        if (!holder || *holder != event.arm)
          violations.push_back(label + ": release by an arm that does not hold the deputy");
        holder.reset();
      }
    }
    phase.post_grasp = grasped_once;
  }

  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid task schedule:";
    for (const std::string& v : violations) msg << "\n  - " << v;
    ValidationError err(msg.str());
    err.violations = violations;
    throw err;
  }
}

int TaskSchedule::phase_at(double t) const {
  int idx = 0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (phases[i].start_time <= t) idx = static_cast<int>(i);
  }
  return idx;
}

HandoverGeometry default_handover_geometry() {
  HandoverGeometry g;
  g.deputy_start = SpatialPose(Vec3(0.35, 0.95, 0.10), Quat::Identity());
  g.handover_pose = SpatialPose(Vec3(0.60, 0.00, 0.05), Quat::Identity());
  g.demo_pose = SpatialPose(Vec3(0.40, -0.95, 0.30),
                            Quat(Eigen::AngleAxisd(0.4, Vec3::UnitZ())));
  // Mid-swing posture on arm B's path to its receiving grip; staging here
  // splits one large joint excursion into two moderate ones.
  g.receive_staging = SpatialPose(Vec3(0.5684, -1.0990, -0.3491),
                                  Quat(0.893501, 0.313205, 0.091777, 0.308440));
  // deputy pose = end-effector pose ∘ grasp offset: each arm grips one end
  // of the 3U body, the deputy frame sits at its geometric center, 0.22 m
  // along the hand's +x.  The ∓90° yaw keeps the wrist in a posture the
  // roll-pitch arms can actually hold on both sides of the handover point.
  g.grasp_offset_a = SpatialPose(Vec3(0.22, 0.0, 0.0),
                                 Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ())));
  g.grasp_offset_b = SpatialPose(Vec3(0.22, 0.0, 0.0),
                                 Quat(Eigen::AngleAxisd(-M_PI / 2, Vec3::UnitZ())));
  return g;
}

TaskSchedule default_handover_schedule() {
  const HandoverGeometry g = default_handover_geometry();
  TaskSchedule s;
  s.total_time = 60.0;

  ScenarioPhase approach;
  approach.name = "approach";
  approach.start_time = 0.0;
  approach.goals[static_cast<int>(Arm::A)] = {GoalKind::move,
                                              g.deputy_start.compose(g.grasp_offset_a.inverse())};
  approach.goals[static_cast<int>(Arm::B)] = {GoalKind::move, g.receive_staging};

  ScenarioPhase transfer;
  transfer.name = "transfer";
  transfer.start_time = 20.0;
  transfer.events = {{GraspAction::grasp, Arm::A}};
  transfer.goals[static_cast<int>(Arm::A)] = {GoalKind::move,
                                              g.handover_pose.compose(g.grasp_offset_a.inverse())};
  transfer.goals[static_cast<int>(Arm::B)] = {GoalKind::move,
                                              g.handover_pose.compose(g.grasp_offset_b.inverse())};

  // The transfer leg gets the longest dwell: both arms make their largest
  // joint excursions there and must co-settle before the regrasp.
  ScenarioPhase present;
  present.name = "present";
  present.start_time = 45.0;
  present.events = {{GraspAction::release, Arm::A}, {GraspAction::grasp, Arm::B}};
  present.goals[static_cast<int>(Arm::A)] = {GoalKind::hold, SpatialPose{}};
  present.goals[static_cast<int>(Arm::B)] = {GoalKind::move,
                                             g.demo_pose.compose(g.grasp_offset_b.inverse())};

  s.phases = {approach, transfer, present};
  s.finalize();
  return s;
}

}  // namespace sms
