#include "sms/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace sms {

namespace {

struct PhaseRun {
  int phase = 0;
  std::size_t first = 0;  // sample indices, inclusive
  std::size_t last = 0;
};

std::vector<PhaseRun> phase_runs(const TrajectoryLog& log) {
  std::vector<PhaseRun> runs;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    if (runs.empty() || log.samples[i].phase != runs.back().phase)
      runs.push_back({log.samples[i].phase, i, i});
    else
      runs.back().last = i;
  }
  return runs;
}

StepResponse step_response(const TrajectoryLog& log, const PhaseRun& run, int nm,
                           int joint) {
  const int qi = static_cast<int>(log.samples.front().q.size()) - nm + joint;
  const double q0 = log.samples[run.first].q[qi];
  const double target = log.samples[run.last].q_desired[joint];

  StepResponse r;
  r.step = target - q0;
  if (std::abs(r.step) < kStepFloor) {
    r.settled = true;
    return r;
  }

  const double sign = r.step > 0.0 ? 1.0 : -1.0;
  const double band = kSettlingBand * std::abs(r.step);
  const double t0 = log.samples[run.first].t;

  double peak_past = 0.0;
  double last_violation = t0;  // time of the last sample outside the band
  bool violated = false;
  for (std::size_t i = run.first; i <= run.last; ++i) {
    const double q = log.samples[i].q[qi];
    peak_past = std::max(peak_past, sign * (q - target));
    if (std::abs(q - target) > band) {
      last_violation = log.samples[i].t;
      violated = true;
    }
  }
  r.overshoot_pct = 100.0 * peak_past / std::abs(r.step);
  if (!violated) {
    r.settling_time = 0.0;
    r.settled = true;
  } else {
    const double t_end = log.samples[run.last].t;
    r.settled = last_violation < t_end;
    r.settling_time = (r.settled ? last_violation + log.sample_dt : t_end) - t0;
  }
  return r;
}

double trapezoid(const TrajectoryLog& log, const std::function<double(const LogSample&)>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < log.samples.size(); ++i) {
    const double dt = log.samples[i + 1].t - log.samples[i].t;
    total += 0.5 * (f(log.samples[i]) + f(log.samples[i + 1])) * dt;
  }
  return total;
}

}  // namespace

MetricsReport compute_metrics(const TrajectoryLog& log) {
  if (log.samples.empty()) throw std::invalid_argument("cannot score an empty log");
  const int nm = log.n_arm_a + log.n_arm_b;
  const int n = static_cast<int>(log.samples.front().q.size());

  MetricsReport report;
  report.scenario = log.scenario_name;
  report.controller = to_string(log.controller);
  report.n_joints = nm;
  report.run_failed = log.failed;
  report.warnings = log.warnings;

  const std::vector<PhaseRun> runs = phase_runs(log);
  report.n_phases = static_cast<int>(runs.size());

  report.overshoot_pct.assign(nm, 0.0);
  report.settling_time.assign(nm, 0.0);
  report.max_torque.assign(nm, 0.0);
  report.step_responses.resize(runs.size() * static_cast<std::size_t>(nm));

  for (std::size_t p = 0; p < runs.size(); ++p) {
    for (int j = 0; j < nm; ++j) {
      StepResponse r = step_response(log, runs[p], nm, j);
      report.step_responses[p * nm + j] = r;
      if (std::abs(r.step) >= kStepFloor) {
        report.overshoot_pct[j] = std::max(report.overshoot_pct[j], r.overshoot_pct);
        report.settling_time[j] = std::max(report.settling_time[j], r.settling_time);
      }
    }
  }

  for (const LogSample& s : log.samples)
    for (int j = 0; j < nm; ++j)
      report.max_torque[j] = std::max(report.max_torque[j], std::abs(s.torque[j]));
  report.max_torque_overall =
      *std::max_element(report.max_torque.begin(), report.max_torque.end());

  for (int arm = 0; arm < 2; ++arm)
    report.ee_ise[arm] = trapezoid(log, [arm](const LogSample& s) {
      return s.ee_error_pos[arm] * s.ee_error_pos[arm];
    });
  report.tracking_cost = trapezoid(log, [n, nm](const LogSample& s) {
    return 0.5 * (s.q.tail(nm) - s.q_desired).squaredNorm();
  });

  for (const PhaseRun& run : runs) {
    const double t_end = log.samples[run.last].t;
    const double window_start = std::max(log.samples[run.first].t, t_end - kDriftWindow);
    std::size_t w = run.first;
    while (w < run.last && log.samples[w].t < window_start) ++w;
    PhaseDrift drift;
    drift.phase = run.phase;
    drift.window = t_end - log.samples[w].t;
    drift.position =
        (log.samples[run.last].q.head<3>() - log.samples[w].q.head<3>()).norm();
    drift.attitude =
        (log.samples[run.last].q.segment<3>(3) - log.samples[w].q.segment<3>(3)).norm();
    report.base_drift.push_back(drift);
    report.base_drift_position = std::max(report.base_drift_position, drift.position);
    report.base_drift_attitude = std::max(report.base_drift_attitude, drift.attitude);
  }

  const Vec3 p0 = log.samples.front().linear_momentum;
  const Vec3 l0 = log.samples.front().angular_momentum;
  const Vec3 com0 = log.samples.front().system_com;
  double peak_base_lin = 0.0, peak_base_ang = 0.0;
  for (const LogSample& s : log.samples) {
    report.momentum_drift_linear =
        std::max(report.momentum_drift_linear, (s.linear_momentum - p0).norm());
    report.momentum_drift_angular =
        std::max(report.momentum_drift_angular, (s.angular_momentum - l0).norm());
    report.com_max_excursion =
        std::max(report.com_max_excursion, (s.system_com - com0).norm());
    peak_base_lin = std::max(peak_base_lin, s.base_linear_momentum.norm());
    peak_base_ang = std::max(peak_base_ang, s.base_angular_momentum.norm());
  }
  report.momentum_rel_linear =
      report.momentum_drift_linear / std::max(peak_base_lin, 1e-12);
  report.momentum_rel_angular =
      report.momentum_drift_angular / std::max(peak_base_ang, 1e-12);

  report.kinetic_energy_initial = log.samples.front().kinetic_energy;
  report.kinetic_energy_final = log.samples.back().kinetic_energy;
  for (const LogSample& s : log.samples)
    report.kinetic_energy_peak = std::max(report.kinetic_energy_peak, s.kinetic_energy);

  return report;
}

}  // namespace sms
