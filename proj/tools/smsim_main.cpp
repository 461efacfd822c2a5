#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sms/control.hpp"
#include "sms/dynamics.hpp"
#include "sms/kinematics.hpp"
#include "sms/log_io.hpp"
#include "sms/metrics.hpp"
#include "sms/model_io.hpp"
#include "sms/planar_check.hpp"
#include "sms/scenario_io.hpp"
#include "sms/sim.hpp"

namespace {

using namespace sms;

int emit_error(int code, const char* kind, const std::string& what) {
  nlohmann::json j{{"error", what}, {"kind", kind}};
  std::cerr << j.dump() << "\n";
  return code;
}

// Exit codes: 0 ok, 1 verification failure, 2 config/model error, 3 simulation failure.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ScenarioParseError& e) {
    return emit_error(2, "config", e.what());
  } catch (const ModelParseError& e) {
    return emit_error(2, "model", e.what());
  } catch (const toml::ParseError& e) {
    return emit_error(2, "config", e.what());
  } catch (const ValidationError& e) {
    return emit_error(2, "validation", e.what());
  } catch (const std::invalid_argument& e) {
    return emit_error(2, "config", e.what());
  } catch (const IntegrationError& e) {
    return emit_error(3, "integration", e.what());
  } catch (const DynamicsError& e) {
    return emit_error(3, "dynamics", e.what());
  } catch (const std::exception& e) {
    return emit_error(3, "runtime", e.what());
  }
}

struct Overrides {
  std::string controller;
  std::optional<double> kp, ki, kd;
  double rolling_period = 0.0;
  double dt = 0.0;
  std::string integrator;
  std::optional<unsigned> seed;
  std::string output_dir;
};

void add_override_flags(CLI::App* cmd, Overrides& o, bool with_controller) {
  if (with_controller)
    cmd->add_option("--controller", o.controller, "Controller: pid or nmpc")
        ->check(CLI::IsMember({"pid", "nmpc"}));
  cmd->add_option("--kp", o.kp, "Proportional gain (uniform across joints)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--ki", o.ki, "Integral gain (uniform across joints)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--kd", o.kd, "Derivative gain (uniform across joints)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--rolling-period", o.rolling_period,
                  "Rolling period T_r in seconds, applied to every phase")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dt", o.dt, "Integrator step in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--integrator", o.integrator, "Integrator: rk4 or rk45")
      ->check(CLI::IsMember({"rk4", "rk45"}));
  cmd->add_option("--seed", o.seed, "Random seed (randomized verification only)");
  cmd->add_option("-o,--output-dir", o.output_dir,
                  "Output directory (overrides config and SMSIM_OUTPUT_DIR)");
}

ScenarioConfig make_config(const std::string& config_path, const Overrides& o) {
  ScenarioConfig cfg =
      config_path.empty() ? default_scenario_config() : load_scenario_config(config_path);
  if (!o.controller.empty())
    cfg.controller = o.controller == "pid" ? ControllerKind::pid : ControllerKind::nmpc;
  if (o.kp) cfg.gains.kp = VecX::Constant(1, *o.kp);
  if (o.ki) cfg.gains.ki = VecX::Constant(1, *o.ki);
  if (o.kd) cfg.gains.kd = VecX::Constant(1, *o.kd);
  if (o.rolling_period > 0.0)
    for (ScenarioPhase& phase : cfg.schedule.phases)
      phase.rolling_period_override = o.rolling_period;
  if (o.dt > 0.0) cfg.integrator.dt = o.dt;
  if (o.integrator == "rk4") cfg.integrator.kind = IntegratorKind::rk4;
  if (o.integrator == "rk45") cfg.integrator.kind = IntegratorKind::rk45;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.output_dir.empty()) {
    cfg.output_dir = o.output_dir;
  } else if (const char* env = std::getenv("SMSIM_OUTPUT_DIR")) {
    cfg.output_dir = env;
  }
  return cfg;
}

double vec_max(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void print_report(const MetricsReport& r) {
  std::cout << "scenario " << r.scenario << ", controller " << r.controller
            << (r.run_failed ? "  [FLAGGED]" : "") << "\n"
            << "  worst overshoot        " << vec_max(r.overshoot_pct) << " %\n"
            << "  worst settling time    " << vec_max(r.settling_time) << " s\n"
            << "  max |joint torque|     " << r.max_torque_overall << " N m\n"
            << "  base drift (pos)       " << r.base_drift_position << " m\n"
            << "  base drift (att)       " << r.base_drift_attitude << " rad\n"
            << "  tracking cost          " << r.tracking_cost << "\n"
            << "  EE ISE (A / B)         " << r.ee_ise[0] << " / " << r.ee_ise[1]
            << " m^2 s\n"
            << "  momentum drift (rel)   " << r.momentum_rel_linear << " lin, "
            << r.momentum_rel_angular << " ang\n"
            << "  CoM excursion          " << r.com_max_excursion << " m\n";
  for (const std::string& w : r.warnings) std::cout << "  warning: " << w << "\n";
}

struct RunArtifacts {
  TrajectoryLog log;
  MetricsReport report;
};

RunArtifacts run_and_write(const ScenarioConfig& cfg, const SystemModel& model) {
  RunArtifacts out{run_scenario(cfg, model), {}};
  out.report = compute_metrics(out.log);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string stem =
      cfg.output_dir + "/" + cfg.name + "_" + to_string(cfg.controller);
  write_log_csv(out.log, stem + "_log.csv");
  write_metrics_json(out.report, stem + "_metrics.json");
  std::cout << "wrote " << stem << "_log.csv and " << stem << "_metrics.json\n";
  return out;
}

int cmd_run(const std::string& config_path, const Overrides& o) {
  const ScenarioConfig cfg = make_config(config_path, o);
  const SystemModel model = load_system_model(cfg.model_path);
  const RunArtifacts artifacts = run_and_write(cfg, model);
  print_report(artifacts.report);
  if (artifacts.log.failed)
    return emit_error(3, "scenario", "run flagged: " +
                                         (artifacts.log.warnings.empty()
                                              ? std::string("see metrics warnings")
                                              : artifacts.log.warnings.front()));
  return 0;
}

int cmd_compare(const std::string& config_path, const Overrides& o) {
  ScenarioConfig cfg = make_config(config_path, o);
  const SystemModel model = load_system_model(cfg.model_path);

  ScenarioConfig cfg_pid = cfg, cfg_nmpc = cfg;
  cfg_pid.controller = ControllerKind::pid;
  cfg_nmpc.controller = ControllerKind::nmpc;

  // Runs share only the immutable model; execute them concurrently.
  auto pid_future = std::async(std::launch::async,
                               [&] { return run_and_write(cfg_pid, model); });
  const RunArtifacts nmpc = run_and_write(cfg_nmpc, model);
  const RunArtifacts pid = pid_future.get();

  const MetricsReport& p = pid.report;
  const MetricsReport& n = nmpc.report;
  auto row = [](const std::string& name, double a, double b) {
    std::cout << "  " << std::left << std::setw(24) << name << std::right
              << std::setw(14) << a << std::setw(14) << b << "\n";
  };
  std::cout << "\ncontroller comparison (" << cfg.name << ")\n  " << std::left
            << std::setw(24) << "metric" << std::right << std::setw(14) << "pid"
            << std::setw(14) << "nmpc" << "\n";
  row("worst overshoot [%]", vec_max(p.overshoot_pct), vec_max(n.overshoot_pct));
  row("worst settling [s]", vec_max(p.settling_time), vec_max(n.settling_time));
  row("max |torque| [N m]", p.max_torque_overall, n.max_torque_overall);
  row("base drift pos [m]", p.base_drift_position, n.base_drift_position);
  row("base drift att [rad]", p.base_drift_attitude, n.base_drift_attitude);
  row("tracking cost", p.tracking_cost, n.tracking_cost);
  row("EE ISE arm A [m^2 s]", p.ee_ise[0], n.ee_ise[0]);
  row("EE ISE arm B [m^2 s]", p.ee_ise[1], n.ee_ise[1]);

  int better_overshoot = 0, better_settling = 0;
  for (int j = 0; j < n.n_joints; ++j) {
    if (n.overshoot_pct[j] < p.overshoot_pct[j]) ++better_overshoot;
    if (n.settling_time[j] < p.settling_time[j]) ++better_settling;
  }
  std::cout << "  NMPC better on " << better_overshoot << "/" << n.n_joints
            << " joints (overshoot), " << better_settling << "/" << n.n_joints
            << " (settling)\n";

  return (pid.log.failed || nmpc.log.failed) ? 3 : 0;
}

int cmd_export_schedule(const std::string& out_path, const std::string& model_path) {
  ScenarioConfig cfg = default_scenario_config();
  if (!model_path.empty()) cfg.model_path = model_path;
  const std::string text = serialize_scenario_config(cfg);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) return emit_error(2, "io", "cannot open output file: " + out_path);
    out << text;
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

// ---- verification suites ----

struct SuiteResult {
  bool pass = false;
  std::string detail;
};

SuiteResult suite_jacobian(const SystemModel& model, unsigned seed) {
  std::mt19937 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 25; ++i)
    worst = std::max(worst, jacobian_fd_error(model, random_state(model, rng)));
  std::ostringstream os;
  os << "max FD twist error " << worst << " (tol 1e-6)";
  return {worst < 1e-6, os.str()};
}

SuiteResult suite_inertia(const SystemModel& model, unsigned seed) {
  std::mt19937 rng(seed);
  for (int i = 0; i < 25; ++i) {
    const GeneralizedState s = random_state(model, rng);
    const InertiaMatrix im = inertia_matrix(model, s);
    const double scale = im.H.cwiseAbs().maxCoeff();
    const double asym = (im.H - im.H.transpose()).cwiseAbs().maxCoeff() / scale;
    if (asym >= 1e-10) return {false, "asymmetry " + std::to_string(asym)};
    if (Eigen::LLT<MatX>(im.H).info() != Eigen::Success)
      return {false, "H not positive definite"};
    if (!(im.cross_block().array() == 0.0).all())
      return {false, "arm-arm cross block not exactly zero"};
  }
  return {true, "symmetric, positive definite, zero cross block on 25 states"};
}

SuiteResult suite_oracle(unsigned seed) {
  const PlanarParams params;
  const SystemModel model = planar_system_model(params);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);

  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = pos(rng), yaw = angle(rng), joint = angle(rng);
    const double vx = rate(rng), vyaw = rate(rng), vjoint = rate(rng);
    const GeneralizedState s = planar_state(params, x, yaw, joint, vx, vyaw, vjoint);

    const MatX h = inertia_matrix(model, s).H;
    const VecX bias = bias_forces(model, s);
    const Mat3 h_ref = planar_inertia_oracle(params, yaw, joint);
    const Vec3 bias_ref = planar_bias_oracle(params, yaw, joint, vyaw, vjoint);

    Mat3 h_sub;
    Vec3 bias_sub;
    for (int r = 0; r < 3; ++r) {
      bias_sub[r] = bias[kPlanarIdx[r]];
      for (int c = 0; c < 3; ++c) h_sub(r, c) = h(kPlanarIdx[r], kPlanarIdx[c]);
    }
    worst = std::max(worst, (h_sub - h_ref).cwiseAbs().maxCoeff() /
                                h_ref.cwiseAbs().maxCoeff());
    worst = std::max(worst, (bias_sub - bias_ref).cwiseAbs().maxCoeff() /
                                std::max(1.0, bias_ref.cwiseAbs().maxCoeff()));
  }
  std::ostringstream os;
  os << "max relative deviation " << worst << " over 200 samples (tol 1e-8)";
  return {worst < 1e-8, os.str()};
}

SuiteResult suite_momentum(const SystemModel& model) {
  ScenarioConfig cfg = default_scenario_config();
  GeneralizedState s = GeneralizedState::zero(model);
  if (model.arm_a.dof() == cfg.initial_joints_a.size())
    s.q.segment(6, model.arm_a.dof()) = cfg.initial_joints_a;
  if (model.arm_b.dof() == cfg.initial_joints_b.size())
    s.q.segment(6 + model.arm_a.dof(), model.arm_b.dof()) = cfg.initial_joints_b;
  for (int i = 6; i < model.dof(); ++i) s.q_dot[i] = (i % 2 == 0) ? 0.3 : -0.25;
  s.q_dot.segment<3>(3) = Vec3(0.02, -0.03, 0.04);
  // Cancel the total linear momentum so the system CoM must stay put.
  const double total = model.base.mass + model.arm_a.total_mass() + model.arm_b.total_mass();
  s.q_dot.head<3>().setZero();
  s.q_dot.head<3>() = -momenta(model, s).linear / total;

  const Momenta m0 = momenta(model, s);
  const double ke0 = kinetic_energy(model, s);
  const Vec3 com0 = system_com(model, s);

  const GeneralizedForces zero_forces = GeneralizedForces::zero(model);
  double drift_lin = 0.0, drift_ang = 0.0, drift_ke = 0.0, drift_com = 0.0;
  double peak_base_lin = 0.0;
  for (int step = 0; step < 10000; ++step) {
    s = rk4_step(model, s, zero_forces, 1e-3);
    if (step % 100 != 99) continue;
    const Momenta m = momenta(model, s);
    drift_lin = std::max(drift_lin, (m.linear - m0.linear).norm());
    drift_ang = std::max(drift_ang, (m.angular - m0.angular).norm());
    drift_ke = std::max(drift_ke, std::abs(kinetic_energy(model, s) - ke0));
    drift_com = std::max(drift_com, (system_com(model, s) - com0).norm());
    peak_base_lin = std::max(peak_base_lin, model.base.mass * s.q_dot.head<3>().norm());
  }
  const double rel_lin = drift_lin / std::max(peak_base_lin, 1e-12);
  const double rel_ang = drift_ang / std::max(m0.angular.norm(), 1e-12);
  const double rel_ke = drift_ke / ke0;

  std::ostringstream os;
  os << "10 s passive coast: momentum drift " << rel_lin << " lin / " << rel_ang
     << " ang (tol 1e-8), energy drift " << rel_ke << " (tol 1e-6), CoM motion "
     << drift_com << " m (tol 2e-10)";
  return {rel_lin < 1e-8 && rel_ang < 1e-8 && rel_ke < 1e-6 && drift_com < 2e-10,
          os.str()};
}

SuiteResult suite_nmpc(const SystemModel& model, unsigned seed) {
  const int nm = model.dof() - 6;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);

  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const GeneralizedState s = random_state(model, rng);
    DesiredJointState desired;
    desired.q = s.q.tail(nm);
    desired.q_dot = s.q_dot.tail(nm);
    desired.q_ddot = VecX::Zero(nm);
    for (int j = 0; j < nm; ++j) {
      desired.q[j] += unit(rng);
      desired.q_dot[j] += unit(rng);
      desired.q_ddot[j] = unit(rng);
    }
    const NmpcConfig cfg{1.0 + 0.5 * (i % 3)};
    const GeneralizedForces u = nmpc_torque(model, s, desired, cfg);
    if (!u.free_floating()) return {false, "controller output has nonzero base rows"};

    const VecX e = s.q.tail(nm) - desired.q;
    const VecX e_dot = s.q_dot.tail(nm) - desired.q_dot;
    const VecX w = desired.q_ddot - cfg.a1() * e - cfg.a2() * e_dot;
    const VecX q_ddot = forward_dynamics(model, s, u);
    const double err = (q_ddot.tail(nm) - w).cwiseAbs().maxCoeff() /
                       std::max(1.0, w.cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
  }
  std::ostringstream os;
  os << "max closed-form acceleration mismatch " << worst << " (tol 1e-9)";
  return {worst < 1e-9, os.str()};
}

int cmd_verify(const std::string& model_path, const std::string& config_path,
               const std::string& filter, unsigned seed) {
  std::string path = model_path;
  if (!config_path.empty()) path = load_scenario_config(config_path).model_path;
  if (path.empty()) path = default_scenario_config().model_path;

  struct Suite {
    std::string name;
    std::function<SuiteResult()> run;
    bool needs_model;
  };

  std::optional<SystemModel> model;
  std::string load_error;
  try {
    model = load_system_model(path);
  } catch (const std::exception& e) {
    load_error = e.what();
  }

  const std::vector<Suite> suites = {
      {"validation",
       [&] {
         return model ? SuiteResult{true, "model '" + model->name + "' loads and validates"}
                      : SuiteResult{false, load_error};
       },
       false},
      {"jacobian", [&] { return suite_jacobian(*model, seed); }, true},
      {"inertia", [&] { return suite_inertia(*model, seed + 1); }, true},
      {"oracle", [&] { return suite_oracle(seed + 2); }, false},
      {"momentum", [&] { return suite_momentum(*model); }, true},
      {"nmpc", [&] { return suite_nmpc(*model, seed + 3); }, true},
  };

  bool any_selected = false;
  bool all_pass = true;
  for (const Suite& suite : suites) {
    if (!filter.empty() && suite.name.find(filter) == std::string::npos) continue;
    any_selected = true;
    if (suite.needs_model && !model) {
      std::cout << "SKIP " << suite.name << " (model failed to load)\n";
      all_pass = false;
      continue;
    }
    const SuiteResult result = suite.run();
    std::cout << (result.pass ? "PASS " : "FAIL ") << suite.name << ": "
              << result.detail << "\n";
    all_pass = all_pass && result.pass;
  }
  if (!any_selected)
    return emit_error(2, "config", "no verification suite matches '" + filter + "'");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-floating dual-arm space manipulator simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "smsim 1.0");

  std::string config_path, model_path, out_path, suite_filter, export_model;
  unsigned verify_seed = 12345;
  Overrides run_o, compare_o;

  // Missing files are reported by the loaders (as ScenarioParseError /
  // ModelParseError -> exit 2 with a JSON error line), not by CLI11 validators,
  // so the exit-code contract stays uniform.
  CLI::App* run = app.add_subcommand("run", "Run one scenario and write log + metrics");
  run->add_option("-c,--config", config_path, "Scenario config file (TOML)");
  add_override_flags(run, run_o, true);

  CLI::App* compare =
      app.add_subcommand("compare", "Run PID and NMPC back-to-back and tabulate metrics");
  compare->add_option("-c,--config", config_path, "Scenario config file (TOML)");
  add_override_flags(compare, compare_o, false);

  CLI::App* verify = app.add_subcommand("verify", "Run the verification suites");
  verify->add_option("-m,--model", model_path, "Model file (TOML)");
  verify->add_option("-c,--config", config_path, "Scenario config naming the model");
  verify->add_option("-s,--suite", suite_filter,
                     "Only run suites whose name contains this substring");
  verify->add_option("--seed", verify_seed, "Random seed for the sampled checks");

  CLI::App* export_sched = app.add_subcommand(
      "export-schedule", "Write the bundled handover scenario config as TOML");
  export_sched->add_option("-o,--output", out_path, "Output path ('-' for stdout)");
  export_sched->add_option("--model-path", export_model,
                           "Model path string to embed in the exported config");

  CLI11_PARSE(app, argc, argv);

  if (*run) return guarded([&] { return cmd_run(config_path, run_o); });
  if (*compare) return guarded([&] { return cmd_compare(config_path, compare_o); });
  if (*verify)
    return guarded(
        [&] { return cmd_verify(model_path, config_path, suite_filter, verify_seed); });
  return guarded([&] { return cmd_export_schedule(out_path, export_model); });
}
