#include "sms/state.hpp"

#include <cmath>
#include <sstream>

namespace sms {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

std::vector<std::string> validate_state(const SystemModel& model,
                                        const GeneralizedState& state) {
  std::vector<std::string> out;
  if (state.q.size() != model.dof() || state.q_dot.size() != model.dof()) {
    std::ostringstream s;
    s << "state dimension " << state.q.size() << "/" << state.q_dot.size()
      << " does not match model dof " << model.dof();
    out.push_back(s.str());
    return out;
  }
  if (!state.finite()) out.push_back("state has non-finite entries");
  for (Arm k : {Arm::A, Arm::B}) {
    const auto& arm = model.arm(k);
    for (int i = 0; i < arm.dof(); ++i) {
      const auto& j = arm.links[i].joint;
      const double q = state.q[model.arm_offset(k) + i];
      // Wide limits (>= full turn) accept any angle.
      if (j.limit_max - j.limit_min >= 2.0 * M_PI) continue;
      const double w = wrap_angle(q);
      if (w < j.limit_min - 1e-12 || w > j.limit_max + 1e-12) {
        std::ostringstream s;
        s << "arm " << arm_name(k) << " joint " << (i + 1) << " angle " << w
          << " outside limits [" << j.limit_min << ", " << j.limit_max << "]";
        out.push_back(s.str());
      }
    }
  }
  return out;
}

GeneralizedState random_state(const SystemModel& model, std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-0.5, 0.5);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> pitch(-1.2, 1.2);
  std::uniform_real_distribution<double> rate(-0.5, 0.5);

  GeneralizedState s = GeneralizedState::zero(model);
  for (int i = 0; i < 3; ++i) s.q[i] = pos(rng);
  s.q[3] = angle(rng);
  s.q[4] = pitch(rng);
  s.q[5] = angle(rng);
  for (Arm k : {Arm::A, Arm::B}) {
    const auto& arm = model.arm(k);
    for (int i = 0; i < arm.dof(); ++i) {
      const auto& j = arm.links[i].joint;
      std::uniform_real_distribution<double> joint(std::max(j.limit_min, -M_PI),
                                                   std::min(j.limit_max, M_PI));
      s.q[model.arm_offset(k) + i] = joint(rng);
    }
  }
  for (int i = 0; i < model.dof(); ++i) s.q_dot[i] = rate(rng);
  return s;
}

}  // namespace sms
