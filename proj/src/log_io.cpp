#include "sms/log_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace sms {

namespace {

// Round-trip-exact decimal formatting shared by every CSV cell.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_log_csv(const TrajectoryLog& log, std::ostream& out) {
  const int n = log.samples.empty() ? 0 : static_cast<int>(log.samples.front().q.size());
  const int nm = log.n_arm_a + log.n_arm_b;

  out << "# smsim-log v" << kLogSchemaVersion << " scenario=" << log.scenario_name
      << " controller=" << to_string(log.controller) << "\n";

  out << "t";
  for (int i = 0; i < n; ++i) out << ",q" << i;
  for (int i = 0; i < n; ++i) out << ",v" << i;
  for (int i = 0; i < nm; ++i) out << ",qd" << i;
  for (int i = 0; i < nm; ++i) out << ",tau" << i;
  out << ",ee_pos_err_a,ee_rot_err_a,ee_pos_err_b,ee_rot_err_b"
      << ",p_x,p_y,p_z,L_x,L_y,L_z"
      << ",pb_x,pb_y,pb_z,Lb_x,Lb_y,Lb_z"
      << ",com_x,com_y,com_z,ke,phase,T_r"
      << ",dep_x,dep_y,dep_z,dep_qw,dep_qx,dep_qy,dep_qz,holder\n";

  for (const LogSample& s : log.samples) {
    out << fmt(s.t);
    for (int i = 0; i < n; ++i) out << ',' << fmt(s.q[i]);
    for (int i = 0; i < n; ++i) out << ',' << fmt(s.q_dot[i]);
    for (int i = 0; i < nm; ++i) out << ',' << fmt(s.q_desired[i]);
    for (int i = 0; i < nm; ++i) out << ',' << fmt(s.torque[i]);
    out << ',' << fmt(s.ee_error_pos[0]) << ',' << fmt(s.ee_error_rot[0]) << ','
        << fmt(s.ee_error_pos[1]) << ',' << fmt(s.ee_error_rot[1]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.linear_momentum[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.angular_momentum[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.base_linear_momentum[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.base_angular_momentum[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.system_com[i]);
    out << ',' << fmt(s.kinetic_energy) << ',' << s.phase << ',' << fmt(s.rolling_period);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(s.deputy_pose.position[i]);
    out << ',' << fmt(s.deputy_pose.orientation.w()) << ','
        << fmt(s.deputy_pose.orientation.x()) << ',' << fmt(s.deputy_pose.orientation.y())
        << ',' << fmt(s.deputy_pose.orientation.z());
    out << ',' << s.deputy_holder << '\n';
  }
}

void write_log_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out = open_or_throw(path);
  write_log_csv(log, out);
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["schema"] = "smsim-metrics-v1";
  j["scenario"] = report.scenario;
  j["controller"] = report.controller;
  j["n_joints"] = report.n_joints;
  j["n_phases"] = report.n_phases;
  j["overshoot_pct"] = report.overshoot_pct;
  j["settling_time_s"] = report.settling_time;
  j["max_torque_nm"] = report.max_torque;
  j["max_torque_overall_nm"] = report.max_torque_overall;

  nlohmann::json steps = nlohmann::json::array();
  for (int p = 0; p < report.n_phases; ++p) {
    for (int joint = 0; joint < report.n_joints; ++joint) {
      const StepResponse& r =
          report.step_responses[static_cast<std::size_t>(p) * report.n_joints + joint];
      steps.push_back({{"phase", p},
                       {"joint", joint},
                       {"step_rad", r.step},
                       {"overshoot_pct", r.overshoot_pct},
                       {"settling_time_s", r.settling_time},
                       {"settled", r.settled}});
    }
  }
  j["step_responses"] = steps;

  j["ee_ise_m2s"] = {{"arm_a", report.ee_ise[0]}, {"arm_b", report.ee_ise[1]}};
  j["tracking_cost"] = report.tracking_cost;

  nlohmann::json drifts = nlohmann::json::array();
  for (const PhaseDrift& d : report.base_drift)
    drifts.push_back({{"phase", d.phase},
                      {"window_s", d.window},
                      {"position_m", d.position},
                      {"attitude_rad", d.attitude}});
  j["base_drift"] = drifts;
  j["base_drift_position_m"] = report.base_drift_position;
  j["base_drift_attitude_rad"] = report.base_drift_attitude;

  j["momentum_drift"] = {{"linear", report.momentum_drift_linear},
                         {"angular", report.momentum_drift_angular},
                         {"relative_linear", report.momentum_rel_linear},
                         {"relative_angular", report.momentum_rel_angular}};
  j["com_max_excursion_m"] = report.com_max_excursion;
  j["kinetic_energy_j"] = {{"initial", report.kinetic_energy_initial},
                           {"peak", report.kinetic_energy_peak},
                           {"final", report.kinetic_energy_final}};
  j["run_failed"] = report.run_failed;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

void write_metrics_json(const MetricsReport& report, const std::string& path) {
  std::ofstream out = open_or_throw(path);
  out << metrics_to_json(report);
}

}  // namespace sms
