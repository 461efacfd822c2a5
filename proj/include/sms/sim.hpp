#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sms/control.hpp"
#include "sms/dynamics.hpp"
#include "sms/ik.hpp"
#include "sms/schedule.hpp"

namespace sms {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ControllerKind { pid, nmpc };
enum class IntegratorKind { rk4, rk45 };

const char* to_string(ControllerKind kind);
const char* to_string(IntegratorKind kind);

struct IntegratorConfig {
  IntegratorKind kind = IntegratorKind::rk4;
  double dt = 1e-3;             // fixed step, or the adaptive initial step (s)
  double abs_tolerance = 1e-4;  // adaptive only
  double rel_tolerance = 1e-4;  // adaptive only
};

/// Initial deputy pose plus the nominal grasp frames:
/// deputy pose = end-effector pose ∘ grasp_offset.
struct DeputyConfig {
  SpatialPose initial_pose;
  SpatialPose grasp_offset_a;
  SpatialPose grasp_offset_b;

  const SpatialPose& grasp_offset(Arm arm) const {
    return arm == Arm::A ? grasp_offset_a : grasp_offset_b;
  }
};

/// The deputy is massless: it never enters the dynamics.  While attached its
/// pose is slaved to the holding arm through the offset captured at grasp.
struct GraspAttachment {
  Arm arm = Arm::A;
  SpatialPose offset;  // deputy = end-effector ∘ offset
};

struct DeputyState {
  SpatialPose pose;
  std::optional<GraspAttachment> attachment;

  bool attached() const { return attachment.has_value(); }
};

/// Pose-error cap for a grasp event to fire (nominal grasp frame vs. the
/// arm's actual end-effector pose).
inline constexpr double kGraspPositionTolerance = 0.01;    // m
inline constexpr double kGraspOrientationTolerance = 0.05; // rad

/// Posture-anchor weight for the per-tick IK re-solves.  Each phase's first
/// solution becomes the anchor, so later solves compensate base motion
/// without walking along the arm's nullspace.
inline constexpr double kPostureAnchorWeight = 0.1;

/// Convergence gate for the per-tick tracking solves: an order of magnitude
/// inside the grasp gate, which is the accuracy the scenario actually needs.
inline constexpr double kTrackingIkPositionTolerance = 1e-4;    // m
inline constexpr double kTrackingIkOrientationTolerance = 1e-3; // rad

struct ScenarioConfig {
  std::string name = "handover";
  std::string model_path;
  ControllerKind controller = ControllerKind::nmpc;
  PidGains gains;  // actuated-joint length, or length 1 to broadcast
  TaskSchedule schedule;
  DeputyConfig deputy;
  IntegratorConfig integrator;
  double control_dt = 0.01;  // controller/IK/log tick (s)
  Vec3 initial_base_position = Vec3::Zero();
  Vec3 initial_base_rpy = Vec3::Zero();
  VecX initial_joints_a;
  VecX initial_joints_b;
  unsigned seed = 0;  // randomized tests only; the scenario itself is deterministic
  std::string output_dir = "out";
};

/// Bundled scenario: the default handover schedule on the 20-DOF model.
ScenarioConfig default_scenario_config();

/// One sample of every logged time series (uniform control-tick grid).
struct LogSample {
  double t = 0.0;
  VecX q;
  VecX q_dot;
  VecX q_desired;       // actuated set-points active at t
  VecX torque;          // actuated torques applied over [t, t + dt)
  double ee_error_pos[2] = {0.0, 0.0};  // vs. the active per-arm goal (m)
  double ee_error_rot[2] = {0.0, 0.0};  // (rad)
  Vec3 linear_momentum = Vec3::Zero();
  Vec3 angular_momentum = Vec3::Zero();
  // Base-only momenta: with zero total momentum these equal (minus) what the
  // arms carry, i.e. the internal momentum exchange.
  Vec3 base_linear_momentum = Vec3::Zero();
  Vec3 base_angular_momentum = Vec3::Zero();
  Vec3 system_com = Vec3::Zero();
  double kinetic_energy = 0.0;
  int phase = 0;
  double rolling_period = 0.0;
  SpatialPose deputy_pose;
  int deputy_holder = -1;  // -1 free, 0 arm A, 1 arm B
};

struct TrajectoryLog {
  std::string scenario_name;
  ControllerKind controller = ControllerKind::nmpc;
  double sample_dt = 0.0;
  int n_arm_a = 0;
  int n_arm_b = 0;
  std::vector<LogSample> samples;
  bool failed = false;  // grasp tolerance violated or IK flagged at a phase start
  std::vector<std::string> warnings;
};

/// One fixed-step RK4 step of (q, q_dot) under zero-order-hold forces.
/// Throws IntegrationError if the state leaves the finite range.
GeneralizedState rk4_step(const SystemModel& model, const GeneralizedState& state,
                          const GeneralizedForces& forces, double dt);

/// Advances by `horizon` under zero-order-hold forces: repeated fixed RK4
/// steps, or an embedded Dormand-Prince 5(4) march honoring the configured
/// tolerances.  `step_hint` carries the adaptive step across calls.
GeneralizedState advance(const SystemModel& model, const GeneralizedState& state,
                         const GeneralizedForces& forces, double horizon,
                         const IntegratorConfig& integrator, double* step_hint);

/// Runs the schedule: per control tick re-solves IK, evaluates the selected
/// controller, integrates with zero-order-hold torques, applies attachment
/// kinematics, and logs.  Deterministic for a given config and build.
TrajectoryLog run_scenario(const ScenarioConfig& config, const SystemModel& model);

/// Convenience overload that loads the model from config.model_path.
TrajectoryLog run_scenario(const ScenarioConfig& config);

}  // namespace sms
