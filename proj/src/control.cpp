#include "sms/control.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sms {

PidGains PidGains::uniform(int n_joints, double kp, double ki, double kd) {
  PidGains g;
  g.kp = VecX::Constant(n_joints, kp);
  g.ki = VecX::Constant(n_joints, ki);
  g.kd = VecX::Constant(n_joints, kd);
  return g;
}

void PidGains::validate() const {
  std::vector<std::string> violations;
  if (kp.size() != ki.size() || kp.size() != kd.size())
    violations.push_back("gain vectors must all have the actuated-joint length");
  if (kp.size() == 0) violations.push_back("gain vectors are empty");
  auto check = [&](const VecX& v, const char* name) {
    if (!v.allFinite() || (v.array() < 0.0).any())
      violations.push_back(std::string(name) + " gains must be finite and non-negative");
  };
  check(kp, "proportional");
  check(ki, "integral");
  check(kd, "derivative");
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid PID gains:";
    for (const std::string& v : violations) msg << "\n  - " << v;
    ValidationError err(msg.str());
    err.violations = violations;
    throw err;
  }
}

TrackingError TrackingError::zero(int n_joints) {
  return {VecX::Zero(n_joints), VecX::Zero(n_joints), VecX::Zero(n_joints)};
}

void accumulate_integral(TrackingError& error, double dt) {
  error.integral_e += error.e * dt;
  error.integral_e = error.integral_e.cwiseMax(-kIntegralClamp).cwiseMin(kIntegralClamp);
}

VecX pid_torque(const TrackingError& error, const PidGains& gains) {
  if (error.e.size() != gains.kp.size() || error.e_dot.size() != gains.kp.size() ||
      error.integral_e.size() != gains.kp.size())
    throw std::invalid_argument("tracking error size does not match the gain vectors");
  return -(gains.kp.cwiseProduct(error.e) + gains.ki.cwiseProduct(error.integral_e) +
           gains.kd.cwiseProduct(error.e_dot));
}

DesiredJointState DesiredJointState::set_point(const VecX& q_d) {
  return {q_d, VecX::Zero(q_d.size()), VecX::Zero(q_d.size())};
}

GeneralizedForces nmpc_torque(const SystemModel& model, const GeneralizedState& state,
                              const DesiredJointState& desired, const NmpcConfig& config) {
  const int n = model.dof();
  const int nm = n - 6;
  if (desired.q.size() != nm || desired.q_dot.size() != nm || desired.q_ddot.size() != nm)
    throw std::invalid_argument("desired joint state size does not match the model");
  if (!(config.rolling_period > 0.0))
    throw std::invalid_argument("rolling period must be positive");

  const InertiaMatrix im = inertia_matrix(model, state);
  const VecX bias = bias_forces(model, state);

  const VecX e = state.q.tail(nm) - desired.q;
  const VecX e_dot = state.q_dot.tail(nm) - desired.q_dot;
  const VecX w = desired.q_ddot - config.a1() * e - config.a2() * e_dot;

  // The base is unactuated, so its rows of H qddot + bias = u carry zero on
  // the right-hand side; the desired acceleration embedded for the base is
  // therefore the free-floating reaction to the commanded joint acceleration.
  const Mat6 h_bb = im.base_block();
  Eigen::LLT<Mat6> llt(h_bb);
  if (llt.info() != Eigen::Success)
    throw DynamicsError("base inertia block is not positive definite");
  const Vec6 base_reaction =
      llt.solve(-bias.head<6>() - im.H.topRightCorner(6, nm) * w);

  VecX accel(n);
  accel.head<6>() = base_reaction;
  accel.tail(nm) = w;

  VecX u = im.H * accel + bias;
  u.head<6>().setZero();  // base rows hold only the linear-solve residual
  return {u};
}

double rolling_period_schedule(const ScenarioPhase& phase) {
  if (phase.rolling_period_override > 0.0) return phase.rolling_period_override;
  return phase.post_grasp ? 2.0 : 1.0;
}

double evaluate_tracking_cost(const std::vector<double>& times,
                              const std::vector<VecX>& errors, double t_begin,
                              double t_end) {
  if (!(t_end > t_begin)) throw std::invalid_argument("empty tracking-cost horizon");
  if (times.size() != errors.size())
    throw std::invalid_argument("time and error sample counts differ");
  if (times.size() < 2 || times.front() > t_begin || times.back() < t_end)
    throw std::invalid_argument("error samples do not span the horizon");

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = times[i];
    const double b = times[i + 1];
    if (!(b > a)) continue;
    const double lo = std::max(a, t_begin);
    const double hi = std::min(b, t_end);
    if (hi <= lo) continue;
    const double ga = 0.5 * errors[i].squaredNorm();
    const double gb = 0.5 * errors[i + 1].squaredNorm();
    const double g_lo = ga + (gb - ga) * (lo - a) / (b - a);
    const double g_hi = ga + (gb - ga) * (hi - a) / (b - a);
    total += 0.5 * (g_lo + g_hi) * (hi - lo);
  }
  return total;
}

}  // namespace sms
