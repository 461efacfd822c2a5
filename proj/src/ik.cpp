#include "sms/ik.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace sms {

namespace {

// Weighted 6-vector residual: [w_p * (p_t - p); w_o * log(R_t * R')].
VecX pose_residual(const SpatialPose& target, const SpatialPose& current,
                   double w_p, double w_o) {
  VecX r(6);
  r.head<3>() = w_p * (target.position - current.position);
  const Mat3 r_err = target.dcm() * current.dcm().transpose();
  r.tail<3>() = w_o * rotation_log(r_err);
  return r;
}

struct LmAttempt {
  VecX theta;
  PoseError residual{0.0, 0.0};
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
};

// One damped-least-squares descent from theta0 with the base held fixed.
LmAttempt lm_descent(const SystemModel& model, const IkRequest& request,
                     const VecX& theta0) {
  const ArmModel& arm = model.arm(request.arm);
  const int n = arm.dof();
  const int off = model.arm_offset(request.arm);

  GeneralizedState state = request.initial_guess;
  state.q_dot.setZero();

  auto clamp_limits = [&](VecX& angles) {
    for (int i = 0; i < n; ++i) {
      const JointParams& jp = arm.links[static_cast<std::size_t>(i)].joint;
      angles[i] = std::clamp(angles[i], jp.limit_min, jp.limit_max);
    }
  };

  const bool anchored = request.posture_weight > 0.0 &&
                        request.posture_anchor.size() == n;
  const double w_n = request.posture_weight;
  // The anchor pulls only along the nullspace of the current linearization,
  // so it can never trade task accuracy for posture.  n_proj is refreshed
  // with each Jacobian and treated as constant within the iteration.
  MatX n_proj = MatX::Zero(n, n);
  auto total_cost = [&](const VecX& pose_res, const VecX& theta) {
    double c = 0.5 * pose_res.squaredNorm();
    if (anchored) {
      const VecX d = n_proj * (theta - request.posture_anchor);
      c += 0.5 * w_n * w_n * d.squaredNorm();
    }
    return c;
  };

  LmAttempt at;
  at.theta = theta0;
  clamp_limits(at.theta);
  state.q.segment(off, n) = at.theta;

  BodyPoses poses = forward_kinematics(model, state);
  VecX residual = pose_residual(request.target, poses.ee(request.arm),
                                request.position_weight, request.orientation_weight);
  at.cost = total_cost(residual, at.theta);
  at.residual = pose_error(request.target, poses.ee(request.arm));

  double lambda = request.initial_damping;
  const double lambda_min = 1e-12;
  const double lambda_max = 1e12;

  for (int iter = 0; iter < request.max_iterations; ++iter) {
    if (at.residual.position < request.position_tolerance &&
        at.residual.rotation < request.orientation_tolerance) {
      at.converged = true;
      break;
    }
    at.iterations = iter + 1;

    // Arm columns of the weighted residual Jacobian (base stays locked, so
    // the six base columns are dropped).
    const MatX j_full = geometric_jacobian(model, state, request.arm);
    MatX j(6, n);
    j.topRows<3>() = request.position_weight * j_full.block(0, 6, 3, n);
    j.bottomRows<3>() = request.orientation_weight * j_full.block(3, 6, 3, n);

    MatX jtj = j.transpose() * j;
    VecX jtr = j.transpose() * residual;
    if (anchored) {
      // N = I - V_r V_r^T from the SVD of j; N is idempotent, so the
      // Gauss-Newton contribution of the residual w_n * N * (theta - anchor)
      // is w_n^2 * N on the left and w_n^2 * N * (anchor - theta) on the right.
      Eigen::JacobiSVD<MatX> svd(j, Eigen::ComputeThinV);
      const VecX& sv = svd.singularValues();
      const double cutoff = sv.size() > 0 ? 1e-8 * sv(0) : 0.0;
      n_proj = MatX::Identity(n, n);
      for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff)
          n_proj -= svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
      }
      jtj += w_n * w_n * n_proj;
      jtr += w_n * w_n * (n_proj * (request.posture_anchor - at.theta));
      // Re-anchor the acceptance reference to the fresh projector.
      at.cost = total_cost(residual, at.theta);
    }

    bool accepted = false;
    while (lambda <= lambda_max) {
      MatX lhs = jtj;
      lhs.diagonal().array() += lambda;
      VecX step = lhs.ldlt().solve(jtr);
      const double step_inf = step.cwiseAbs().maxCoeff();
      if (step_inf > request.max_step) step *= request.max_step / step_inf;

      VecX theta_try = at.theta + step;
      clamp_limits(theta_try);  // next linearization happens at the clamped point

      GeneralizedState trial = state;
      trial.q.segment(off, n) = theta_try;
      BodyPoses trial_poses = forward_kinematics(model, trial);
      const VecX trial_residual =
          pose_residual(request.target, trial_poses.ee(request.arm),
                        request.position_weight, request.orientation_weight);
      const double trial_cost = total_cost(trial_residual, theta_try);

      if (trial_cost < at.cost) {
        at.theta = theta_try;
        state = trial;
        poses = trial_poses;
        residual = trial_residual;
        at.cost = trial_cost;
        lambda = std::max(lambda / 10.0, lambda_min);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }

    at.residual = pose_error(request.target, poses.ee(request.arm));
    if (!accepted) break;  // stalled: damping exhausted without progress
  }

  at.converged = at.residual.position < request.position_tolerance &&
                 at.residual.rotation < request.orientation_tolerance;
  return at;
}

}  // namespace

IkResult solve_ik_lm(const SystemModel& model, const IkRequest& request) {
  const ArmModel& arm = model.arm(request.arm);
  const int n = arm.dof();
  const int off = model.arm_offset(request.arm);

  LmAttempt best = lm_descent(model, request, request.initial_guess.q.segment(off, n));

  if (!best.converged && n > 0) {
    // Fixed seed: restarts are part of the deterministic solve, not sampling.
    std::mt19937 rng(0x51a5u + static_cast<unsigned>(request.arm));
    for (int restart = 0; restart < request.max_restarts && !best.converged; ++restart) {
      VecX theta0(n);
      for (int i = 0; i < n; ++i) {
        const JointParams& jp = arm.links[static_cast<std::size_t>(i)].joint;
        std::uniform_real_distribution<double> u(std::max(jp.limit_min, -1.8),
                                                 std::min(jp.limit_max, 1.8));
        theta0[i] = u(rng);
      }
      const LmAttempt at = lm_descent(model, request, theta0);
      const int total = best.iterations + at.iterations;
      if (at.converged || at.cost < best.cost) best = at;
      best.iterations = total;
    }
  }

  IkResult result;
  result.joint_angles = best.theta;
  result.converged = best.converged;
  result.residual = best.residual;
  result.iterations = best.iterations;
  return result;
}

VecX rate_ik_pseudoinverse(const MatX& jacobian, const VecX& desired_velocity) {
  Eigen::JacobiSVD<MatX> svd(jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return VecX::Zero(jacobian.cols());

  const double cutoff = 1e-8 * sv(0);
  VecX inv_sv = VecX::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() *
         desired_velocity;
}

}  // namespace sms
