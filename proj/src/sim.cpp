#include "sms/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sms/model_io.hpp"

namespace sms {

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::pid ? "pid" : "nmpc";
}

const char* to_string(IntegratorKind kind) {
  return kind == IntegratorKind::rk4 ? "rk4" : "rk45";
}

namespace {

struct Derivative {
  VecX dq;
  VecX dv;
};

Derivative derivative(const SystemModel& model, const GeneralizedState& state,
                      const GeneralizedForces& forces) {
  return {state.q_dot, forward_dynamics(model, state, forces)};
}

GeneralizedState offset_state(const GeneralizedState& s, const Derivative& d, double h) {
  GeneralizedState out;
  out.q = s.q + h * d.dq;
  out.q_dot = s.q_dot + h * d.dv;
  return out;
}

}  // namespace

GeneralizedState rk4_step(const SystemModel& model, const GeneralizedState& state,
                          const GeneralizedForces& forces, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integration step must be positive");
  const Derivative k1 = derivative(model, state, forces);
  const Derivative k2 = derivative(model, offset_state(state, k1, 0.5 * dt), forces);
  const Derivative k3 = derivative(model, offset_state(state, k2, 0.5 * dt), forces);
  const Derivative k4 = derivative(model, offset_state(state, k3, dt), forces);

  GeneralizedState out;
  out.q = state.q + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  out.q_dot = state.q_dot + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  if (!out.finite())
    throw IntegrationError("integration diverged: non-finite state after RK4 step");
  return out;
}

namespace {

// Dormand-Prince 5(4) embedded pair on the stacked state y = [q; q_dot].
GeneralizedState rk45_advance(const SystemModel& model, const GeneralizedState& state,
                              const GeneralizedForces& forces, double horizon,
                              const IntegratorConfig& cfg, double* step_hint) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0,
                          e4 = 393.0 / 640.0, e5 = -92097.0 / 339200.0,
                          e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;

  const int n = static_cast<int>(state.q.size());
  auto rhs = [&](const VecX& y) {
    GeneralizedState s;
    s.q = y.head(n);
    s.q_dot = y.tail(n);
    VecX dy(2 * n);
    dy.head(n) = s.q_dot;
    dy.tail(n) = forward_dynamics(model, s, forces);
    return dy;
  };

  VecX y(2 * n);
  y << state.q, state.q_dot;

  double t = 0.0;
  double h = (step_hint && *step_hint > 0.0) ? *step_hint : cfg.dt;
  const double tiny = 1e-12 * std::max(1.0, horizon);

  while (t < horizon - tiny) {
    h = std::min(h, horizon - t);
    if (h < 1e-12)
      throw IntegrationError("adaptive integration step collapsed below 1e-12 s");

    const VecX k1 = rhs(y);
    const VecX k2 = rhs(y + h * (a21 * k1));
    const VecX k3 = rhs(y + h * (a31 * k1 + a32 * k2));
    const VecX k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const VecX k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const VecX k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const VecX y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const VecX k7 = rhs(y5);
    const VecX y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_sq = 0.0;
    for (int i = 0; i < 2 * n; ++i) {
      const double scale =
          cfg.abs_tolerance +
          cfg.rel_tolerance * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double e = (y5[i] - y4[i]) / scale;
      err_sq += e * e;
    }
    const double err = std::sqrt(err_sq / (2 * n));

    if (err <= 1.0) {
      t += h;
      y = y5;
      if (!y.allFinite())
        throw IntegrationError("integration diverged: non-finite state in adaptive step");
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h *= factor;
  }

  if (step_hint) *step_hint = h;
  GeneralizedState out;
  out.q = y.head(n);
  out.q_dot = y.tail(n);
  return out;
}

}  // namespace

GeneralizedState advance(const SystemModel& model, const GeneralizedState& state,
                         const GeneralizedForces& forces, double horizon,
                         const IntegratorConfig& integrator, double* step_hint) {
  if (!(horizon > 0.0)) throw std::invalid_argument("advance horizon must be positive");
  if (integrator.kind == IntegratorKind::rk45)
    return rk45_advance(model, state, forces, horizon, integrator, step_hint);

  const double dt = integrator.dt;
  const long n_steps = std::lround(std::floor(horizon / dt + 1e-9));
  GeneralizedState s = state;
  for (long i = 0; i < n_steps; ++i) s = rk4_step(model, s, forces, dt);
  const double remainder = horizon - static_cast<double>(n_steps) * dt;
  if (remainder > 1e-9 * dt) s = rk4_step(model, s, forces, remainder);
  return s;
}

ScenarioConfig default_scenario_config() {
  ScenarioConfig cfg;
  cfg.name = "handover";
  cfg.model_path = "data/models/sms_20dof.toml";
  cfg.controller = ControllerKind::nmpc;
  cfg.gains = PidGains::uniform(1, 2.0, 1.0, 1.5);  // length 1 broadcasts per joint
  cfg.schedule = default_handover_schedule();
  const HandoverGeometry g = default_handover_geometry();
  cfg.deputy = {g.deputy_start, g.grasp_offset_a, g.grasp_offset_b};
  cfg.control_dt = 0.01;
  VecX joints(7);
  joints << 0.0, -0.6, 0.0, 1.2, 0.0, -0.6, 0.0;
  cfg.initial_joints_a = joints;
  cfg.initial_joints_b = joints;
  return cfg;
}

namespace {

int actuated_offset(const SystemModel& model, Arm arm) {
  return arm == Arm::A ? 0 : model.arm_a.dof();
}

std::string format_pose_error(const PoseError& err) {
  std::ostringstream os;
  os << err.position << " m / " << err.rotation << " rad";
  return os.str();
}

}  // namespace

TrajectoryLog run_scenario(const ScenarioConfig& config, const SystemModel& model) {
  const int na = model.arm_a.dof();
  const int nb = model.arm_b.dof();
  const int nm = na + nb;

  config.gains.validate();
  PidGains gains = config.gains;
  if (gains.kp.size() == 1 && nm != 1)
    gains = PidGains::uniform(nm, gains.kp[0], gains.ki[0], gains.kd[0]);
  if (gains.kp.size() != nm)
    throw ValidationError("gain vectors do not match the model's actuated joint count");
  if (config.initial_joints_a.size() != na || config.initial_joints_b.size() != nb)
    throw ValidationError("initial joint vectors do not match the model");
  if (!(config.control_dt > 0.0)) throw ValidationError("control_dt must be positive");
  if (!(config.integrator.dt > 0.0) || !(config.integrator.abs_tolerance > 0.0) ||
      !(config.integrator.rel_tolerance > 0.0))
    throw ValidationError("integrator step and tolerances must be positive");

  TaskSchedule schedule = config.schedule;
  schedule.finalize();

  GeneralizedState state = GeneralizedState::zero(model);
  state.q.head<3>() = config.initial_base_position;
  state.q.segment<3>(3) = config.initial_base_rpy;
  state.q.segment(6, na) = config.initial_joints_a;
  state.q.segment(6 + na, nb) = config.initial_joints_b;
  if (const auto violations = validate_state(model, state); !violations.empty()) {
    std::ostringstream msg;
    msg << "invalid initial state:";
    for (const std::string& v : violations) msg << "\n  - " << v;
    ValidationError err(msg.str());
    err.violations = violations;
    throw err;
  }

  TrajectoryLog log;
  log.scenario_name = config.name;
  log.controller = config.controller;
  log.sample_dt = config.control_dt;
  log.n_arm_a = na;
  log.n_arm_b = nb;

  DeputyState deputy{config.deputy.initial_pose, std::nullopt};

  std::array<std::optional<SpatialPose>, 2> move_goal;  // inertial EE targets
  std::array<VecX, 2> posture_anchor;  // phase-entry IK branch, pins redundancy
  VecX q_desired = state.q.tail(nm);
  TrackingError pid_error = TrackingError::zero(nm);
  std::array<int, 2> ik_warned_phase = {-1, -1};

  int active_phase = -1;
  double rolling_period = 1.0;
  double step_hint = config.integrator.dt;
  VecX tau = VecX::Zero(nm);

  const long n_ticks = std::lround(schedule.total_time / config.control_dt);
  if (n_ticks < 1) throw ValidationError("total_time is shorter than one control tick");
  log.samples.reserve(static_cast<std::size_t>(n_ticks) + 1);

  for (long tick = 0; tick <= n_ticks; ++tick) {
    const double t = static_cast<double>(tick) * config.control_dt;
    const BodyPoses poses = forward_kinematics(model, state);

    if (deputy.attached())
      deputy.pose = poses.ee(deputy.attachment->arm).compose(deputy.attachment->offset);

    const int phase_idx = schedule.phase_at(t);
    if (phase_idx != active_phase) {
      active_phase = phase_idx;
      const ScenarioPhase& phase = schedule.phases[static_cast<std::size_t>(phase_idx)];

      for (const PhaseEvent& event : phase.events) {
        std::ostringstream tag;
        tag << "t=" << t << " phase '" << phase.name << "'";
        if (event.action == GraspAction::grasp) {
          const SpatialPose& ee = poses.ee(event.arm);
          const SpatialPose nominal =
              deputy.pose.compose(config.deputy.grasp_offset(event.arm).inverse());
          const PoseError err = pose_error(nominal, ee);
          if (deputy.attached()) {
            log.failed = true;
            log.warnings.push_back(tag.str() + ": grasp refused, deputy already held");
          } else if (err.position < kGraspPositionTolerance &&
                     err.rotation < kGraspOrientationTolerance) {
            deputy.attachment = GraspAttachment{event.arm, ee.inverse().compose(deputy.pose)};
          } else {
            log.failed = true;
            log.warnings.push_back(tag.str() + ": grasp missed by " + format_pose_error(err));
          }
        } else {
          if (deputy.attached() && deputy.attachment->arm == event.arm) {
            deputy.attachment.reset();  // deputy keeps its current pose, at rest
          } else {
            log.failed = true;
            log.warnings.push_back(tag.str() + ": release by an arm that holds nothing");
          }
        }
      }

      rolling_period = rolling_period_schedule(phase);

      for (Arm arm : {Arm::A, Arm::B}) {
        const int ai = static_cast<int>(arm);
        const ArmGoal& goal = phase.goal(arm);
        if (goal.kind == GoalKind::move) {
          SpatialPose target = goal.target;
          if (deputy.attached() && deputy.attachment->arm == arm) {
            // Steer the deputy itself: recover its intended pose from the
            // nominal grasp frame, then retarget through the captured offset.
            const SpatialPose deputy_target =
                goal.target.compose(config.deputy.grasp_offset(arm));
            target = deputy_target.compose(deputy.attachment->offset.inverse());
          }
          move_goal[ai] = target;
        } else {
          move_goal[ai] = std::nullopt;
          q_desired.segment(actuated_offset(model, arm), model.arm(arm).dof()) =
              state.q.segment(model.arm_offset(arm), model.arm(arm).dof());
        }
        posture_anchor[ai] = VecX();  // first solve of the phase picks the branch
      }
      pid_error = TrackingError::zero(nm);  // new set point, fresh integral
    }

    // Re-solve IK each control tick: the goal pose is inertial, the base is
    // not.  Warm-starting from the previous desired angles (not the moving
    // measured state) keeps the solution on one redundancy branch, so the
    // set point only creeps as much as the base does.
    for (Arm arm : {Arm::A, Arm::B}) {
      const int ai = static_cast<int>(arm);
      if (!move_goal[ai]) continue;
      IkRequest request;
      request.arm = arm;
      request.target = *move_goal[ai];
      request.initial_guess = state;
      request.initial_guess.q.segment(model.arm_offset(arm), model.arm(arm).dof()) =
          q_desired.segment(actuated_offset(model, arm), model.arm(arm).dof());
      request.position_tolerance = kTrackingIkPositionTolerance;
      request.orientation_tolerance = kTrackingIkOrientationTolerance;
      if (posture_anchor[ai].size() == model.arm(arm).dof()) {
        request.posture_anchor = posture_anchor[ai];
        request.posture_weight = kPostureAnchorWeight;
        request.max_restarts = 0;  // scattering would hop off the pinned branch
      }
      const IkResult result = solve_ik_lm(model, request);
      if (posture_anchor[ai].size() == 0) posture_anchor[ai] = result.joint_angles;
      q_desired.segment(actuated_offset(model, arm), model.arm(arm).dof()) =
          result.joint_angles;
      if (!result.converged && ik_warned_phase[ai] != active_phase) {
        ik_warned_phase[ai] = active_phase;
        log.failed = true;
        std::ostringstream msg;
        msg << "IK for arm " << (arm == Arm::A ? "A" : "B") << " did not converge at t="
            << t << " (residual " << format_pose_error(result.residual)
            << "); proceeding best-effort";
        log.warnings.push_back(msg.str());
      }
    }

    GeneralizedForces forces = GeneralizedForces::zero(model);
    if (tick < n_ticks) {
      if (config.controller == ControllerKind::pid) {
        pid_error.e = state.q.tail(nm) - q_desired;
        pid_error.e_dot = state.q_dot.tail(nm);
        accumulate_integral(pid_error, config.control_dt);
        tau = pid_torque(pid_error, gains);
        forces = GeneralizedForces::internal(model, tau);
      } else {
        forces = nmpc_torque(model, state, DesiredJointState::set_point(q_desired),
                             NmpcConfig{rolling_period});
        tau = forces.Q.tail(nm);
      }
    }

    LogSample sample;
    sample.t = t;
    sample.q = state.q;
    sample.q_dot = state.q_dot;
    sample.q_desired = q_desired;
    sample.torque = tau;
    for (Arm arm : {Arm::A, Arm::B}) {
      const int ai = static_cast<int>(arm);
      SpatialPose target;
      if (move_goal[ai]) {
        target = *move_goal[ai];
      } else {
        GeneralizedState held = state;
        held.q.segment(model.arm_offset(arm), model.arm(arm).dof()) =
            q_desired.segment(actuated_offset(model, arm), model.arm(arm).dof());
        target = forward_kinematics(model, held).ee(arm);
      }
      const PoseError err = pose_error(target, poses.ee(arm));
      sample.ee_error_pos[ai] = err.position;
      sample.ee_error_rot[ai] = err.rotation;
    }
    const Momenta mom = momenta(model, state);
    sample.linear_momentum = mom.linear;
    sample.angular_momentum = mom.angular;
    sample.system_com = system_com(model, poses);
    {
      const Vec3 rpy = state.q.segment<3>(3);
      const Vec3 omega = euler_rate_matrix(rpy) * state.q_dot.segment<3>(3);
      const Mat3 r = poses.base.dcm();
      const Vec3 v = state.q_dot.head<3>();
      sample.base_linear_momentum = model.base.mass * v;
      sample.base_angular_momentum =
          (state.q.head<3>() - sample.system_com).cross(model.base.mass * v) +
          r * model.base.inertia * r.transpose() * omega;
    }
    sample.kinetic_energy = kinetic_energy(model, state);
    sample.phase = active_phase;
    sample.rolling_period = rolling_period;
    sample.deputy_pose = deputy.pose;
    sample.deputy_holder = deputy.attached() ? static_cast<int>(deputy.attachment->arm) : -1;
    log.samples.push_back(std::move(sample));

    if (tick < n_ticks)
      state = advance(model, state, forces, config.control_dt, config.integrator, &step_hint);
  }

  return log;
}

TrajectoryLog run_scenario(const ScenarioConfig& config) {
  const SystemModel model = load_system_model(config.model_path);
  return run_scenario(config, model);
}

}  // namespace sms
