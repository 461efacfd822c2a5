#include <doctest.h>

#include <Eigen/Cholesky>
#include <random>

#include "sms/dynamics.hpp"
#include "sms/model_io.hpp"
#include "sms/planar_check.hpp"
#include "sms/sim.hpp"

using namespace sms;

namespace {

SystemModel bundled() {
  return load_system_model(SMS_DATA_DIR "/models/sms_20dof.toml");
}

}  // namespace

TEST_CASE("inertia matrix structure on random states") {
  const SystemModel m = bundled();
  std::mt19937 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const GeneralizedState s = random_state(m, rng);
    const InertiaMatrix im = inertia_matrix(m, s);
    REQUIRE(im.H.rows() == 20);

    const double asym = (im.H - im.H.transpose()).cwiseAbs().maxCoeff();
    CHECK(asym / im.H.cwiseAbs().maxCoeff() < 1e-10);

    Eigen::LLT<MatX> llt(0.5 * (im.H + im.H.transpose()));
    CHECK(llt.info() == Eigen::Success);

    // The two arms share no coordinates, so their cross block is exactly
    // zero, not merely small.
    CHECK(im.cross_block().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("inertia blocks partition consistently") {
  const SystemModel m = bundled();
  std::mt19937 rng(103);
  const GeneralizedState s = random_state(m, rng);
  const InertiaMatrix im = inertia_matrix(m, s);
  CHECK(im.n_a == 7);
  CHECK(im.n_b == 7);
  CHECK((im.base_block() - im.H.topLeftCorner(6, 6)).norm() == 0.0);
  CHECK((im.arm_block(Arm::B) - im.H.block(13, 13, 7, 7)).norm() == 0.0);
  CHECK((im.coupling_block(Arm::A) - im.H.block(0, 6, 6, 7)).norm() == 0.0);
}

TEST_CASE("kinetic energy equals the quadratic form") {
  const SystemModel m = bundled();
  std::mt19937 rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    const GeneralizedState s = random_state(m, rng);
    const double direct = kinetic_energy(m, s);
    const InertiaMatrix im = inertia_matrix(m, s);
    const double quad = 0.5 * s.q_dot.dot(im.H * s.q_dot);
    CHECK(std::abs(direct - quad) / std::max(direct, 1.0) < 1e-10);
  }
}

TEST_CASE("bias forces are inverse dynamics at zero acceleration") {
  const SystemModel m = bundled();
  std::mt19937 rng(109);
  const GeneralizedState s = random_state(m, rng);
  const VecX bias = bias_forces(m, s);
  const VecX id0 = inverse_dynamics(m, s, VecX::Zero(m.dof()));
  CHECK((bias - id0).norm() == 0.0);

  // Bias vanishes with the rates.
  GeneralizedState still = s;
  still.q_dot.setZero();
  CHECK(bias_forces(m, still).norm() < 1e-12);
}

TEST_CASE("forward and inverse dynamics are inverses") {
  // forward_dynamics only accepts free-floating force vectors, so the round
  // trip runs through the accelerations internal torques actually produce.
  const SystemModel m = bundled();
  std::mt19937 rng(113);
  for (int trial = 0; trial < 5; ++trial) {
    const GeneralizedState s = random_state(m, rng);
    const VecX tau = VecX::Random(m.dof() - 6);
    const GeneralizedForces f = GeneralizedForces::internal(m, tau);
    const VecX qdd = forward_dynamics(m, s, f);
    const VecX back = inverse_dynamics(m, s, qdd);
    CHECK((back - f.Q).cwiseAbs().maxCoeff() <
          1e-8 * std::max(1.0, f.Q.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("inverse dynamics equals H qdd + bias") {
  const SystemModel m = bundled();
  std::mt19937 rng(127);
  const GeneralizedState s = random_state(m, rng);
  const VecX qdd = VecX::Random(m.dof());
  const VecX lhs = inverse_dynamics(m, s, qdd);
  const VecX rhs = inertia_matrix(m, s).H * qdd + bias_forces(m, s);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <
        1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
}

TEST_CASE("internal forces never touch the base rows") {
  const SystemModel m = bundled();
  VecX tau = VecX::Random(14);
  const GeneralizedForces f = GeneralizedForces::internal(m, tau);
  CHECK(f.free_floating());
  CHECK((f.Q.segment(6, 7) - tau.head(7)).norm() == 0.0);
  CHECK((f.tau(m, Arm::B) - tau.tail(7)).norm() == 0.0);
  CHECK_FALSE(GeneralizedForces{VecX::Ones(20)}.free_floating());
}

TEST_CASE("momenta match simple closed forms") {
  const SystemModel m = bundled();

  SUBCASE("pure base translation") {
    GeneralizedState s = GeneralizedState::zero(m);
    const Vec3 v(0.2, -0.1, 0.3);
    s.q_dot.segment<3>(0) = v;
    const Momenta mom = momenta(m, s);
    const double total = m.base.mass + m.arm_a.total_mass() + m.arm_b.total_mass();
    CHECK((mom.linear - total * v).norm() < 1e-12);
    // Uniform translation carries no angular momentum about the CoM.
    CHECK(mom.angular.norm() < 1e-12);
  }

  SUBCASE("momenta are H-weighted rates") {
    // The top six rows of H q_dot are the system wrench-momentum in the
    // Euler-rate parameterization: compare the linear part directly.
    std::mt19937 rng(131);
    const GeneralizedState s = random_state(m, rng);
    const Momenta mom = momenta(m, s);
    const VecX hq = inertia_matrix(m, s).H * s.q_dot;
    CHECK((mom.linear - hq.head<3>()).norm() <
          1e-10 * std::max(1.0, hq.head<3>().norm()));
  }
}

TEST_CASE("planar model reproduces the symbolic oracle") {
  const PlanarParams p;
  const SystemModel m = planar_system_model(p);
  REQUIRE(m.validate().empty());

  std::mt19937 rng(137);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);

  double worst_h = 0.0, worst_c = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double yaw = angle(rng), joint = angle(rng);
    const double vyaw = rate(rng), vjoint = rate(rng);
    const GeneralizedState s = planar_state(p, 0.3, yaw, joint, 0.7, vyaw, vjoint);

    const InertiaMatrix im = inertia_matrix(m, s);
    const Mat3 oracle_h = planar_inertia_oracle(p, yaw, joint);
    Mat3 num_h;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) num_h(r, c) = im.H(kPlanarIdx[r], kPlanarIdx[c]);
    worst_h = std::max(worst_h,
                       (num_h - oracle_h).cwiseAbs().maxCoeff() /
                           oracle_h.cwiseAbs().maxCoeff());

    const VecX bias = bias_forces(m, s);
    const Vec3 oracle_c = planar_bias_oracle(p, yaw, joint, vyaw, vjoint);
    Vec3 num_c;
    for (int r = 0; r < 3; ++r) num_c(r) = bias(kPlanarIdx[r]);
    worst_c = std::max(worst_c, (num_c - oracle_c).cwiseAbs().maxCoeff() /
                                    std::max(1.0, oracle_c.cwiseAbs().maxCoeff()));
  }
  CHECK(worst_h < 1e-8);
  CHECK(worst_c < 1e-8);
}

TEST_CASE("planar bias is independent of the x velocity") {
  const PlanarParams p;
  const SystemModel m = planar_system_model(p);
  const GeneralizedState a = planar_state(p, 0.1, 0.9, -0.7, 0.0, 0.4, -0.6);
  const GeneralizedState b = planar_state(p, 0.1, 0.9, -0.7, 5.0, 0.4, -0.6);
  CHECK((bias_forces(m, a) - bias_forces(m, b)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("short passive coast conserves momentum and energy") {
  const SystemModel m = bundled();
  GeneralizedState s = GeneralizedState::zero(m);
  s.q.segment(6, 7) << 0.3, -0.5, 0.2, 1.0, -0.3, 0.4, 0.1;
  s.q_dot.segment(6, 7).setConstant(0.25);
  s.q_dot.segment(13, 7).setConstant(-0.2);
  s.q_dot.segment<3>(3) = Vec3(0.02, -0.03, 0.01);
  // Cancel the linear momentum so the CoM stays put.
  const double total = m.base.mass + m.arm_a.total_mass() + m.arm_b.total_mass();
  GeneralizedState probe = s;
  probe.q_dot.segment<3>(0).setZero();
  s.q_dot.segment<3>(0) = -momenta(m, probe).linear / total;

  const Momenta mom0 = momenta(m, s);
  const double ke0 = kinetic_energy(m, s);
  const Vec3 com0 = system_com(m, s);
  CHECK(mom0.linear.norm() < 1e-12);

  // 2000 RK4 steps at 1 ms under zero torque.
  const GeneralizedForces none = GeneralizedForces::zero(m);
  for (int i = 0; i < 2000; ++i) s = rk4_step(m, s, none, 1e-3);

  const Momenta mom1 = momenta(m, s);
  CHECK((mom1.linear - mom0.linear).norm() < 1e-10);
  CHECK((mom1.angular - mom0.angular).norm() < 1e-9 * std::max(1.0, mom0.angular.norm()));
  CHECK(std::abs(kinetic_energy(m, s) - ke0) / ke0 < 1e-8);
  CHECK((system_com(m, s) - com0).norm() < 1e-10);
}
