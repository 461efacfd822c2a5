#include "sms/scenario_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace sms {

namespace {

constexpr const char* kFormat = "sms-scenario-v1";

Vec3 vec3_of(const toml::Value& v, const std::string& what) {
  const std::vector<double> a = v.as_number_array();
  if (a.size() != 3) throw ScenarioParseError(what + " must have 3 entries");
  return Vec3(a[0], a[1], a[2]);
}

Quat quat_of(const toml::Value& v, const std::string& what) {
  const std::vector<double> a = v.as_number_array();
  if (a.size() != 4) throw ScenarioParseError(what + " must have 4 entries (w, x, y, z)");
  return Quat(a[0], a[1], a[2], a[3]);
}

SpatialPose pose_of(const toml::Table& t, const std::string& what) {
  SpatialPose pose;
  pose.position = vec3_of(t.at("position"), what + ".position");
  if (t.has("orientation"))
    pose = SpatialPose(pose.position, quat_of(t.at("orientation"), what + ".orientation"));
  return pose;
}

VecX gain_of(const toml::Value& v) {
  if (v.is_array()) {
    const std::vector<double> a = v.as_number_array();
    return Eigen::Map<const VecX>(a.data(), static_cast<Eigen::Index>(a.size()));
  }
  return VecX::Constant(1, v.as_number());
}

PhaseEvent event_of(const std::string& s, const std::string& what) {
  if (s == "grasp_a") return {GraspAction::grasp, Arm::A};
  if (s == "grasp_b") return {GraspAction::grasp, Arm::B};
  if (s == "release_a") return {GraspAction::release, Arm::A};
  if (s == "release_b") return {GraspAction::release, Arm::B};
  throw ScenarioParseError(what + ": unknown event '" + s +
                           "' (expected grasp_a|grasp_b|release_a|release_b)");
}

ArmGoal goal_of(const toml::Table& t, const std::string& what) {
  const std::string kind = t.at("kind").as_string();
  if (kind == "hold") return {GoalKind::hold, SpatialPose{}};
  if (kind == "move") return {GoalKind::move, pose_of(t, what)};
  throw ScenarioParseError(what + ": unknown goal kind '" + kind + "'");
}

// ---- serialization helpers ----

toml::Value number_array(const double* data, int n) {
  toml::Array arr;
  for (int i = 0; i < n; ++i) arr.push_back(toml::Value(data[i]));
  return toml::Value(std::move(arr));
}

toml::Value vec3_value(const Vec3& v) { return number_array(v.data(), 3); }

toml::Value quat_value(const Quat& q) {
  const double c[4] = {q.w(), q.x(), q.y(), q.z()};
  return number_array(c, 4);
}

void put_pose(toml::Table& t, const SpatialPose& pose) {
  t.insert("position") = vec3_value(pose.position);
  t.insert("orientation") = quat_value(pose.orientation);
}

toml::Value gain_value(const VecX& v) {
  if (v.size() == 1) return toml::Value(v[0]);
  return number_array(v.data(), static_cast<int>(v.size()));
}

const char* event_name(const PhaseEvent& e) {
  if (e.action == GraspAction::grasp) return e.arm == Arm::A ? "grasp_a" : "grasp_b";
  return e.arm == Arm::A ? "release_a" : "release_b";
}

}  // namespace

ScenarioConfig parse_scenario_config(const toml::Value& root, const std::string& origin) {
  try {
    const toml::Table& top = root.as_table();
    if (!top.has("format") || top.at("format").as_string() != kFormat)
      throw ScenarioParseError(origin + ": missing or unsupported format marker (want \"" +
                               kFormat + "\")");

    ScenarioConfig cfg = default_scenario_config();
    cfg.schedule = TaskSchedule{};  // the file's schedule replaces the default entirely

    if (top.has("name")) cfg.name = top.at("name").as_string();
    cfg.model_path = top.at("model").as_string();
    if (top.has("controller")) {
      const std::string c = top.at("controller").as_string();
      if (c == "pid") cfg.controller = ControllerKind::pid;
      else if (c == "nmpc") cfg.controller = ControllerKind::nmpc;
      else throw ScenarioParseError(origin + ": unknown controller '" + c + "'");
    }
    if (top.has("control_dt")) cfg.control_dt = top.at("control_dt").as_number();
    if (top.has("output_dir")) cfg.output_dir = top.at("output_dir").as_string();
    if (top.has("seed"))
      cfg.seed = static_cast<unsigned>(std::llround(top.at("seed").as_number()));

    if (top.has("gains")) {
      const toml::Table& g = top.at("gains").as_table();
      if (g.has("kp")) cfg.gains.kp = gain_of(g.at("kp"));
      if (g.has("ki")) cfg.gains.ki = gain_of(g.at("ki"));
      if (g.has("kd")) cfg.gains.kd = gain_of(g.at("kd"));
    }

    if (top.has("integrator")) {
      const toml::Table& integ = top.at("integrator").as_table();
      if (integ.has("kind")) {
        const std::string k = integ.at("kind").as_string();
        if (k == "rk4") cfg.integrator.kind = IntegratorKind::rk4;
        else if (k == "rk45") cfg.integrator.kind = IntegratorKind::rk45;
        else throw ScenarioParseError(origin + ": unknown integrator '" + k + "'");
      }
      if (integ.has("dt")) cfg.integrator.dt = integ.at("dt").as_number();
      if (integ.has("abs_tolerance"))
        cfg.integrator.abs_tolerance = integ.at("abs_tolerance").as_number();
      if (integ.has("rel_tolerance"))
        cfg.integrator.rel_tolerance = integ.at("rel_tolerance").as_number();
    }

    if (top.has("initial")) {
      const toml::Table& init = top.at("initial").as_table();
      if (init.has("base_position"))
        cfg.initial_base_position = vec3_of(init.at("base_position"), "initial.base_position");
      if (init.has("base_rpy"))
        cfg.initial_base_rpy = vec3_of(init.at("base_rpy"), "initial.base_rpy");
      auto joints = [&](const char* key) {
        const std::vector<double> a = init.at(key).as_number_array();
        return VecX(Eigen::Map<const VecX>(a.data(), static_cast<Eigen::Index>(a.size())));
      };
      if (init.has("joints_a")) cfg.initial_joints_a = joints("joints_a");
      if (init.has("joints_b")) cfg.initial_joints_b = joints("joints_b");
    }

    if (top.has("deputy")) {
      const toml::Table& dep = top.at("deputy").as_table();
      cfg.deputy.initial_pose = pose_of(dep, "deputy");
      if (dep.has("grasp_offset_a"))
        cfg.deputy.grasp_offset_a =
            pose_of(dep.at("grasp_offset_a").as_table(), "deputy.grasp_offset_a");
      if (dep.has("grasp_offset_b"))
        cfg.deputy.grasp_offset_b =
            pose_of(dep.at("grasp_offset_b").as_table(), "deputy.grasp_offset_b");
    }

    const toml::Table& sched = top.at("schedule").as_table();
    cfg.schedule.total_time = sched.at("total_time").as_number();
    if (!sched.has("phase"))
      throw ScenarioParseError(origin + ": schedule has no [[schedule.phase]] entries");
    for (const toml::Value& pv : sched.at("phase").as_array()) {
      const toml::Table& pt = pv.as_table();
      ScenarioPhase phase;
      phase.name = pt.at("name").as_string();
      phase.start_time = pt.at("start_time").as_number();
      if (pt.has("rolling_period_override"))
        phase.rolling_period_override = pt.at("rolling_period_override").as_number();
      if (pt.has("events"))
        for (const toml::Value& ev : pt.at("events").as_array())
          phase.events.push_back(event_of(ev.as_string(), "phase '" + phase.name + "'"));
      phase.goals[static_cast<int>(Arm::A)] =
          goal_of(pt.at("goal_a").as_table(), "phase '" + phase.name + "' goal_a");
      phase.goals[static_cast<int>(Arm::B)] =
          goal_of(pt.at("goal_b").as_table(), "phase '" + phase.name + "' goal_b");
      cfg.schedule.phases.push_back(std::move(phase));
    }
    cfg.schedule.finalize();
    return cfg;
  } catch (const toml::ParseError& e) {
    throw ScenarioParseError(origin + ": " + e.what());
  }
}

ScenarioConfig load_scenario_config(const std::string& path) {
  toml::Value root;
  try {
    root = toml::parse_file(path);
  } catch (const toml::ParseError& e) {
    throw ScenarioParseError(e.what());
  }
  ScenarioConfig cfg = parse_scenario_config(root, path);
  namespace fs = std::filesystem;
  const fs::path model(cfg.model_path);
  if (model.is_relative())
    cfg.model_path = (fs::path(path).parent_path() / model).lexically_normal().string();
  return cfg;
}

std::string serialize_scenario_config(const ScenarioConfig& config) {
  toml::Value root{toml::Table{}};
  toml::Table& top = root.as_table();
  top.insert("format") = toml::Value(std::string(kFormat));
  top.insert("name") = toml::Value(config.name);
  top.insert("model") = toml::Value(config.model_path);
  top.insert("controller") = toml::Value(std::string(to_string(config.controller)));
  top.insert("control_dt") = toml::Value(config.control_dt);
  top.insert("output_dir") = toml::Value(config.output_dir);
  top.insert("seed") = toml::Value(static_cast<double>(config.seed));

  toml::Table gains;
  gains.insert("kp") = gain_value(config.gains.kp);
  gains.insert("ki") = gain_value(config.gains.ki);
  gains.insert("kd") = gain_value(config.gains.kd);
  top.insert("gains") = toml::Value(std::move(gains));

  toml::Table integ;
  integ.insert("kind") = toml::Value(std::string(to_string(config.integrator.kind)));
  integ.insert("dt") = toml::Value(config.integrator.dt);
  integ.insert("abs_tolerance") = toml::Value(config.integrator.abs_tolerance);
  integ.insert("rel_tolerance") = toml::Value(config.integrator.rel_tolerance);
  top.insert("integrator") = toml::Value(std::move(integ));

  toml::Table init;
  init.insert("base_position") = vec3_value(config.initial_base_position);
  init.insert("base_rpy") = vec3_value(config.initial_base_rpy);
  init.insert("joints_a") =
      number_array(config.initial_joints_a.data(), static_cast<int>(config.initial_joints_a.size()));
  init.insert("joints_b") =
      number_array(config.initial_joints_b.data(), static_cast<int>(config.initial_joints_b.size()));
  top.insert("initial") = toml::Value(std::move(init));

  toml::Table deputy;
  put_pose(deputy, config.deputy.initial_pose);
  toml::Table offset_a, offset_b;
  put_pose(offset_a, config.deputy.grasp_offset_a);
  put_pose(offset_b, config.deputy.grasp_offset_b);
  deputy.insert("grasp_offset_a") = toml::Value(std::move(offset_a));
  deputy.insert("grasp_offset_b") = toml::Value(std::move(offset_b));
  top.insert("deputy") = toml::Value(std::move(deputy));

  toml::Table sched;
  sched.insert("total_time") = toml::Value(config.schedule.total_time);
  toml::Array phases;
  for (const ScenarioPhase& phase : config.schedule.phases) {
    toml::Table pt;
    pt.insert("name") = toml::Value(phase.name);
    pt.insert("start_time") = toml::Value(phase.start_time);
    if (phase.rolling_period_override > 0.0)
      pt.insert("rolling_period_override") = toml::Value(phase.rolling_period_override);
    toml::Array events;
    for (const PhaseEvent& e : phase.events)
      events.push_back(toml::Value(std::string(event_name(e))));
    pt.insert("events") = toml::Value(std::move(events));
    for (Arm arm : {Arm::A, Arm::B}) {
      const ArmGoal& goal = phase.goal(arm);
      toml::Table gt;
      if (goal.kind == GoalKind::hold) {
        gt.insert("kind") = toml::Value(std::string("hold"));
      } else {
        gt.insert("kind") = toml::Value(std::string("move"));
        put_pose(gt, goal.target);
      }
      pt.insert(arm == Arm::A ? "goal_a" : "goal_b") = toml::Value(std::move(gt));
    }
    phases.push_back(toml::Value(std::move(pt)));
  }
  sched.insert("phase") = toml::Value(std::move(phases));
  top.insert("schedule") = toml::Value(std::move(sched));

  return toml::write(root);
}

void save_scenario_config(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << serialize_scenario_config(config);
}

}  // namespace sms
