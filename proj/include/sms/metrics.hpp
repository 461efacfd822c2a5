#pragma once

#include <string>
#include <vector>

#include "sms/sim.hpp"

namespace sms {

/// Step-response figures for one joint within one phase.  The step is the
/// set-point change at phase entry; settling uses the 5% band.
struct StepResponse {
  double step = 0.0;           // rad (signed)
  double overshoot_pct = 0.0;  // peak excursion past the target, % of |step|
  double settling_time = 0.0;  // s after phase start until |e| stays in band
  bool settled = false;
};

/// Settling band as a fraction of the commanded step.
inline constexpr double kSettlingBand = 0.05;

/// Base pose change over the trailing window of one phase (drift once the
/// goal is nominally reached).
struct PhaseDrift {
  int phase = 0;
  double window = 0.0;    // s actually measured
  double position = 0.0;  // m
  double attitude = 0.0;  // rad (Euler-angle vector norm)
};

struct MetricsReport {
  std::string scenario;
  std::string controller;
  int n_joints = 0;
  int n_phases = 0;

  // Per joint, worst case across phases with a significant step.
  std::vector<double> overshoot_pct;
  std::vector<double> settling_time;
  std::vector<double> max_torque;  // per joint, N*m
  double max_torque_overall = 0.0;

  // Per phase x joint detail (row-major: phase * n_joints + joint).
  std::vector<StepResponse> step_responses;

  double ee_ise[2] = {0.0, 0.0};  // integral of squared EE position error, m^2 s
  double tracking_cost = 0.0;     // 0.5 * integral of e'e over the whole run

  std::vector<PhaseDrift> base_drift;
  double base_drift_position = 0.0;  // worst phase window, m
  double base_drift_attitude = 0.0;  // worst phase window, rad

  double momentum_drift_linear = 0.0;    // max |P(t) - P(0)|, kg m/s
  double momentum_drift_angular = 0.0;   // max |L(t) - L(0)|, kg m^2/s
  double momentum_rel_linear = 0.0;      // relative to peak base momentum
  double momentum_rel_angular = 0.0;
  double com_max_excursion = 0.0;        // max |com(t) - com(0)|, m

  double kinetic_energy_initial = 0.0;
  double kinetic_energy_peak = 0.0;
  double kinetic_energy_final = 0.0;

  bool run_failed = false;
  std::vector<std::string> warnings;
};

/// Joint steps smaller than this are not scored for overshoot/settling:
/// dividing a coupling-induced excursion by a near-zero commanded step says
/// nothing about the controller.  Every joint still gets scored in the
/// phases that actually command it.
inline constexpr double kStepFloor = 0.05;  // rad

/// Trailing window used for the per-phase base-drift figure.  The window is
/// meant to sample the quiet tail of a phase: a well-tuned response has
/// settled before it opens, so what it sees is residual base wander.
inline constexpr double kDriftWindow = 5.0;  // s

MetricsReport compute_metrics(const TrajectoryLog& log);

}  // namespace sms
