#include "sms/model.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

namespace sms {

double ArmModel::total_mass() const {
  double m = 0.0;
  for (const auto& link : links) m += link.body.mass;
  return m;
}

namespace {

void check_body(const RigidBodyParams& body, const std::string& where,
                std::vector<std::string>& out) {
  if (!(body.mass > 0.0)) {
    out.push_back(where + ": mass must be > 0 (got " + std::to_string(body.mass) + ")");
  }
  if (!body.joint_to_com.allFinite() || !body.com_to_next_joint.allFinite()) {
    out.push_back(where + ": chain offsets have non-finite entries");
  }
  if (!body.inertia.allFinite()) {
    out.push_back(where + ": inertia tensor has non-finite entries");
    return;
  }
  const double scale = std::max(1.0, body.inertia.cwiseAbs().maxCoeff());
  if ((body.inertia - body.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    out.push_back(where + ": inertia tensor is not symmetric");
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(body.inertia);
  const Vec3 ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    out.push_back(where + ": inertia tensor is not positive definite");
    return;
  }
  // Triangle inequalities on the principal moments.
  const double e0 = ev(0), e1 = ev(1), e2 = ev(2);  // ascending
  if (e0 + e1 < e2 * (1.0 - 1e-9)) {
    out.push_back(where + ": principal moments violate the triangle inequality");
  }
}

void check_arm(const ArmModel& arm, const std::string& prefix,
               std::vector<std::string>& out) {
  for (size_t i = 0; i < arm.links.size(); ++i) {
    const auto& link = arm.links[i];
    std::ostringstream where;
    where << prefix << " link " << (i + 1);
    if (!link.body.name.empty()) where << " (" << link.body.name << ")";
    check_body(link.body, where.str(), out);
    if (!link.joint.axis.allFinite() ||
        std::abs(link.joint.axis.norm() - 1.0) > 1e-12) {
      out.push_back(where.str() + ": joint axis is not a unit vector");
    }
    if (!(link.joint.limit_min < link.joint.limit_max)) {
      out.push_back(where.str() + ": joint limits must satisfy min < max");
    }
  }
  if (!arm.mount_offset.allFinite() || !arm.tool_offset.allFinite()) {
    out.push_back(prefix + ": mount/tool offsets have non-finite entries");
  }
}

}  // namespace

std::vector<std::string> SystemModel::validate() const {
  std::vector<std::string> violations;
  check_body(base, "base", violations);
  check_arm(arm_a, "arm A", violations);
  check_arm(arm_b, "arm B", violations);
  return violations;
}

void validate_or_throw(const SystemModel& model) {
  const auto violations = model.validate();
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "model '" << model.name << "' failed validation:";
  for (const auto& v : violations) msg << "\n  - " << v;
  ValidationError err(msg.str());
  err.violations = violations;
  throw err;
}

double mass_ratio(const SystemModel& model) {
  return (model.arm_a.total_mass() + model.arm_b.total_mass()) / model.base.mass;
}

}  // namespace sms
