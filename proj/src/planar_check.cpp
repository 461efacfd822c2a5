#include "sms/planar_check.hpp"

#include <cmath>

namespace sms {

SystemModel planar_system_model(const PlanarParams& p) {
  SystemModel m;
  m.name = "planar-check";
  m.base.name = "base";
  m.base.mass = p.base_mass;
  m.base.inertia = Mat3::Identity() * p.base_yaw_inertia;

  ArmLink link;
  link.joint.name = "j1";
  link.joint.axis = Vec3::UnitZ();
  link.body.name = "link1";
  link.body.mass = p.link_mass;
  link.body.inertia = Mat3::Identity() * p.link_inertia;
  link.body.joint_to_com = Vec3(p.com_x, p.com_y, 0.0);
  link.body.com_to_next_joint = Vec3::Zero();

  m.arm_a.mount_offset = Vec3(p.mount_x, p.mount_y, 0.0);
  m.arm_a.tool_offset = Vec3::Zero();
  m.arm_a.links = {link};
  m.arm_b.mount_offset = Vec3::Zero();
  m.arm_b.tool_offset = Vec3::Zero();
  m.arm_b.links = {};

  validate_or_throw(m);
  return m;
}

GeneralizedState planar_state(const PlanarParams& p, double x, double yaw,
                              double joint, double vx, double vyaw, double vjoint) {
  GeneralizedState s;
  s.q = VecX::Zero(7);
  s.q_dot = VecX::Zero(7);
  s.q[0] = x;
  s.q[1] = p.base_y;
  s.q[5] = yaw;
  s.q[6] = joint;
  s.q_dot[0] = vx;
  s.q_dot[5] = vyaw;
  s.q_dot[6] = vjoint;
  return s;
}

// Coefficients below are the frozen output of the offline symbolic
// derivation of the planar Lagrangian (base mass M at (x, y0), yaw th,
// mount (ax, ay), link mass m with CoM at mount + Rz(th + ph) (dx, dy)).

Mat3 planar_inertia_oracle(const PlanarParams& p, double yaw, double joint) {
  const double M = p.base_mass, I0 = p.base_yaw_inertia;
  const double ax = p.mount_x, ay = p.mount_y;
  const double m = p.link_mass, Il = p.link_inertia;
  const double dx = p.com_x, dy = p.com_y;
  const double th = yaw, ph = joint;

  Mat3 h;
  h(0, 0) = M + m;
  h(0, 1) = -m * (ax * std::sin(th) + ay * std::cos(th) + dx * std::sin(ph + th) +
                  dy * std::cos(ph + th));
  h(0, 2) = -m * (dx * std::sin(ph + th) + dy * std::cos(ph + th));
  h(1, 1) = I0 + Il + ax * ax * m + 2.0 * ax * dx * m * std::cos(ph) -
            2.0 * ax * dy * m * std::sin(ph) + ay * ay * m +
            2.0 * ay * dx * m * std::sin(ph) + 2.0 * ay * dy * m * std::cos(ph) +
            dx * dx * m + dy * dy * m;
  h(1, 2) = Il + ax * dx * m * std::cos(ph) - ax * dy * m * std::sin(ph) +
            ay * dx * m * std::sin(ph) + ay * dy * m * std::cos(ph) + dx * dx * m +
            dy * dy * m;
  h(2, 2) = Il + dx * dx * m + dy * dy * m;
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

Vec3 planar_bias_oracle(const PlanarParams& p, double yaw, double joint,
                        double vyaw, double vjoint) {
  const double ax = p.mount_x, ay = p.mount_y;
  const double m = p.link_mass;
  const double dx = p.com_x, dy = p.com_y;
  const double th = yaw, ph = joint;
  const double vth = vyaw, vph = vjoint;

  Vec3 bias;
  bias(0) = m * (-ax * vth * vth * std::cos(th) + ay * vth * vth * std::sin(th) -
                 dx * vph * vph * std::cos(ph + th) -
                 2.0 * dx * vph * vth * std::cos(ph + th) -
                 dx * vth * vth * std::cos(ph + th) +
                 dy * vph * vph * std::sin(ph + th) +
                 2.0 * dy * vph * vth * std::sin(ph + th) +
                 dy * vth * vth * std::sin(ph + th));
  bias(1) = m * vph *
            (-ax * dx * vph * std::sin(ph) - 2.0 * ax * dx * vth * std::sin(ph) -
             ax * dy * vph * std::cos(ph) - 2.0 * ax * dy * vth * std::cos(ph) +
             ay * dx * vph * std::cos(ph) + 2.0 * ay * dx * vth * std::cos(ph) -
             ay * dy * vph * std::sin(ph) - 2.0 * ay * dy * vth * std::sin(ph));
  bias(2) = m * vth * vth *
            (ax * dx * std::sin(ph) + ax * dy * std::cos(ph) - ay * dx * std::cos(ph) +
             ay * dy * std::sin(ph));
  return bias;
}

}  // namespace sms
