#pragma once

#include "sms/model.hpp"
#include "sms/state.hpp"

namespace sms {

/// Planar 3-DOF reduction: base x-translation, base yaw, and a single
/// z-axis joint, with the base pinned at y = base_y and everything else
/// frozen.  Comes with closed-form inertia and bias coefficients from an
/// offline symbolic Lagrangian derivation; the numeric pipeline restricted
/// to these coordinates must reproduce them to roundoff.
struct PlanarParams {
  double base_mass = 25.0;
  double base_yaw_inertia = 8.0;  // about the base CoM z axis
  double mount_x = 0.3;           // arm mount, base frame
  double mount_y = 0.2;
  double link_mass = 3.0;
  double link_inertia = 0.05;     // about the link CoM z axis
  double com_x = 0.25;            // joint -> link CoM, link frame
  double com_y = 0.1;
  double base_y = 0.4;            // frozen base y coordinate
};

/// 7-coordinate system (6 base + 1 joint, arm B empty) realizing the
/// planar model inside the full engine.
SystemModel planar_system_model(const PlanarParams& p);

/// Full state with only (x, yaw, joint) and their rates populated.
GeneralizedState planar_state(const PlanarParams& p, double x, double yaw,
                              double joint, double vx, double vyaw, double vjoint);

/// Indices of the in-plane coordinates within the 7-coordinate model.
inline constexpr int kPlanarIdx[3] = {0, 5, 6};

/// Closed-form 3x3 inertia sub-block over (x, yaw, joint).
Mat3 planar_inertia_oracle(const PlanarParams& p, double yaw, double joint);

/// Closed-form bias rows over (x, yaw, joint); independent of vx by
/// translation invariance.
Vec3 planar_bias_oracle(const PlanarParams& p, double yaw, double joint,
                        double vyaw, double vjoint);

}  // namespace sms
