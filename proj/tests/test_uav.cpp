#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arvaes/lqr.hpp"
#include "arvaes/uav.hpp"

using namespace arvaes;

namespace {

// Augmented closed-loop matrix of one axis (plant + internal model under the
// synthesized state feedback).
Eigen::MatrixXd closed_loop(const LinearModel& plant, const RegulatorGains& g,
                            const Eigen::RowVectorXd& k_x, const Eigen::RowVectorXd& k_eta) {
  const auto n = plant.A.rows();
  const LinearModel d = zoh_discretize(plant, g.dt_ctrl);
  Eigen::MatrixXd a(n + 3, n + 3);
  a.setZero();
  a.topLeftCorner(n, n) = d.A;
  a.bottomRightCorner(3, 3) = g.phi_d;
  a.block(n, 0, 3, 1) = g.g_d;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 3, 1);
  b.topRows(n) = d.B;
  Eigen::MatrixXd k(1, n + 3);
  k << k_x, k_eta;
  return a - b * k;
}

// A stiffer-than-default weight set used for the fast-settling checks; the
// shipped defaults trade step aggressiveness for smooth loiter tracking under
// the 0.5 N m torque ceiling.
LqrWeights stiff_weights() {
  LqrWeights w = LqrWeights::defaults();
  w.q_roll << 100.0, 10.0, 3000.0, 100.0, 100.0, 100.0, 100.0;
  w.r_roll = 1.0;
  w.q_pitch = w.q_roll;
  w.r_pitch = 1.0;
  w.q_vertical << 80.0, 10.0, 100.0, 100.0, 100.0;
  w.r_vertical = 0.05;
  return w;
}

}  // namespace

TEST_CASE("hover is an equilibrium of the rigid-body dynamics") {
  VehicleParams vp;
  QuadState s;
  const QuadDeriv d = dynamics_deriv(s, vp.hover_thrust(), Vec3::Zero(), vp);
  CHECK(d.dp.norm() == 0.0);
  CHECK(d.dv.norm() < 1e-14);
  CHECK(d.dR.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.dw.norm() == 0.0);
}

TEST_CASE("zero thrust gives free fall along +z") {
  VehicleParams vp;
  QuadState s;
  const QuadDeriv d = dynamics_deriv(s, 0.0, Vec3::Zero(), vp);
  CHECK((d.dv - Vec3(0.0, 0.0, vp.gravity)).norm() < 1e-14);
}

TEST_CASE("pure yaw torque excites only the yaw rate") {
  VehicleParams vp;
  QuadState s;
  const double tz = 0.2;
  const QuadDeriv d = dynamics_deriv(s, vp.hover_thrust(), Vec3(0.0, 0.0, tz), vp);
  CHECK((d.dw - Vec3(0.0, 0.0, tz / vp.inertia.z())).norm() < 1e-14);
}

TEST_CASE("hover input leaves the RK4 state unchanged") {
  VehicleParams vp;
  QuadState s;
  s.p = Vec3(3.0, -1.0, -6.0);
  const QuadState next = integrate_rk4(s, vp.hover_thrust(), Vec3::Zero(), vp, 1e-3);
  CHECK((next.p - s.p).norm() < 1e-12);
  CHECK(next.v.norm() < 1e-12);
  CHECK((next.R - s.R).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(next.w_body.norm() < 1e-12);
}

TEST_CASE("RK4 reproduces the analytic yaw double integrator") {
  VehicleParams vp;
  QuadState s;
  const double tz = 0.05;
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    s = integrate_rk4(s, vp.hover_thrust(), Vec3(0.0, 0.0, tz), vp, dt);
  }
  const double t = 1.0;
  const double psi_expected = tz * t * t / (2.0 * vp.inertia.z());
  const Rpy att = rot_to_rpy(s.R);
  CHECK(std::abs(att.yaw - psi_expected) < 1e-8);
  CHECK(std::abs(s.w_body.z() - tz * t / vp.inertia.z()) < 1e-8);
}

TEST_CASE("principal-axis spin conserves the rate magnitude") {
  VehicleParams vp;
  for (int axis = 0; axis < 3; ++axis) {
    QuadState s;
    s.w_body = Vec3::Zero();
    s.w_body(axis) = 2.0;
    for (int i = 0; i < 10000; ++i) {
      s = integrate_rk4(s, vp.hover_thrust(), Vec3::Zero(), vp, 1e-3);
    }
    CHECK(std::abs(s.w_body.norm() - 2.0) < 1e-9);
  }
}

TEST_CASE("attitude stays in SO(3) over one million RK4 steps") {
  VehicleParams vp;
  QuadState s;
  s.w_body = Vec3(0.7, -0.4, 0.9);
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    s = integrate_rk4(s, vp.hover_thrust(), Vec3(0.01, -0.02, 0.015), vp, 1e-3);
    if (i % 10000 == 0) {
      worst = std::max(worst,
                       (s.R.transpose() * s.R - Mat3::Identity()).cwiseAbs().maxCoeff());
    }
  }
  CHECK((s.R.transpose() * s.R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(s.R.determinant() - 1.0) < 1e-9);
  CHECK(worst < 1e-9);
}

TEST_CASE("printed linear models carry the expected structure") {
  VehicleParams vp;
  const LinearizedModels m = linearized_models(vp);
  CHECK(m.roll.A(1, 2) == doctest::Approx(vp.gravity));
  CHECK(m.pitch.A(1, 2) == doctest::Approx(-vp.gravity));
  CHECK(m.vertical.B(1, 0) == doctest::Approx(-1.0 / vp.mass));
  CHECK(m.yaw.B(1, 0) == doctest::Approx(1.0 / vp.inertia.z()));
  for (const LinearModel* lm : {&m.roll, &m.pitch, &m.yaw, &m.vertical}) {
    const Eigen::VectorXcd ev = lm->A.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) CHECK(std::abs(ev(i)) < 1e-12);
  }
}

TEST_CASE("hover linearization matches the nonlinear dynamics to first order") {
  VehicleParams vp;
  const LinearizedModels m = linearized_models(vp);

  // Roll channel: perturb (y, v_y, phi, w_x) and tau_x, compare dv_y and dw_x.
  const auto roll_residual = [&](double eps) {
    QuadState s;
    s.v = Vec3(0.0, 0.3 * eps, 0.0);
    s.R = rpy_to_rot(0.5 * eps, 0.0, 0.0);
    s.w_body = Vec3(0.2 * eps, 0.0, 0.0);
    const Vec3 tau(0.1 * eps, 0.0, 0.0);
    const QuadDeriv d = dynamics_deriv(s, vp.hover_thrust(), tau, vp);
    Eigen::Vector4d x(0.0, s.v.y(), 0.5 * eps, s.w_body.x());
    const Eigen::Vector4d xdot_lin = m.roll.A * x + m.roll.B * (0.1 * eps);
    return std::abs(d.dv.y() - xdot_lin(1)) + std::abs(d.dw.x() - xdot_lin(3));
  };
  const double r1 = roll_residual(1e-2);
  const double r2 = roll_residual(5e-3);
  // This perturbation direction cancels the quadratic term (sin/cos parity),
  // so the residual shrinks at least 4x (here 8x) when eps is halved.
  CHECK(r1 / r2 >= 3.5);

  // Vertical channel: thrust offset maps through -1/M exactly at hover.
  QuadState s;
  const QuadDeriv d = dynamics_deriv(s, vp.hover_thrust() + 0.25, Vec3::Zero(), vp);
  CHECK(d.dv.z() == doctest::Approx(-0.25 / vp.mass).epsilon(1e-12));
}

TEST_CASE("discrete internal model places its poles on the unit circle") {
  const double omega = 0.65;
  const double dt = 1.0 / 250.0;
  Eigen::Matrix3d phi_d;
  Eigen::Vector3d g_d;
  internal_model_discrete(omega, dt, phi_d, g_d);
  const Eigen::VectorXcd ev = phi_d.eigenvalues();
  bool found_dc = false;
  int found_pair = 0;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(std::abs(ev(i)) - 1.0) < 1e-9);
    const double ang = std::arg(ev(i));
    if (std::abs(ang) < 1e-9) found_dc = true;
    // Tustin maps +/- j*omega onto the unit circle at the warped angle
    // 2*atan(omega*dt/2), a cubic-in-omega*dt shift from omega*dt itself.
    if (std::abs(std::abs(ang) - 2.0 * std::atan(omega * dt / 2.0)) < 1e-12) ++found_pair;
  }
  CHECK(found_dc);
  CHECK(found_pair == 2);

  CHECK((internal_model_step(Eigen::Vector3d::Zero(), 0.0, omega, dt)).norm() == 0.0);
  CHECK_THROWS_AS(internal_model_discrete(3.0, 1.0, phi_d, g_d), std::invalid_argument);
}

TEST_CASE("synthesized loops are Schur stable") {
  VehicleParams vp;
  for (const LqrWeights& w : {LqrWeights::defaults(), stiff_weights(),
                              LqrWeights::defaults().detuned(100.0)}) {
    const RegulatorGains g = synthesize_gains(vp, 0.65, 1.0 / 250.0, w);
    const LinearizedModels m = linearized_models(vp);
    CHECK(spectral_radius(closed_loop(m.roll, g, g.k_roll, g.k_eta_roll)) < 1.0);
    CHECK(spectral_radius(closed_loop(m.pitch, g, g.k_pitch, g.k_eta_pitch)) < 1.0);
    CHECK(spectral_radius(closed_loop(m.vertical, g, g.k_vertical, g.k_eta_vertical)) < 1.0);
    const LinearModel yaw_d = zoh_discretize(m.yaw, 1.0 / 250.0);
    CHECK(spectral_radius(yaw_d.A - yaw_d.B * g.k_yaw) < 1.0);
  }
}

TEST_CASE("yaw step response settles") {
  VehicleParams vp;
  const RegulatorGains g = synthesize_gains(vp, 0.65, 1.0 / 250.0);
  QuadState s;
  s.R = rpy_to_rot(0.0, 0.0, 0.1);
  RegulatorState reg;
  ControlOutput u;
  const Vec3 ref(0.0, 0.0, 0.0);
  for (int k = 0; k < 20000; ++k) {
    if (k % 4 == 0) u = control_step(s, ref, reg, g, vp);
    s = integrate_rk4(s, u.thrust, u.tau, vp, 1e-3);
  }
  CHECK(std::abs(rot_to_rpy(s.R).yaw) < 1e-3);
}

TEST_CASE("roll loop nulls a biased sinusoid at the embedded frequency") {
  // Linear discrete closed-loop simulation of the roll axis.
  VehicleParams vp;
  const double omega = 0.65;
  const double dt = 1.0 / 250.0;
  const RegulatorGains g = synthesize_gains(vp, omega, dt);
  const LinearModel d = zoh_discretize(linearized_models(vp).roll, dt);

  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Vector3d eta = Eigen::Vector3d::Zero();
  double worst_tail = 0.0;
  const double amp = 0.8, bias = -0.4;
  for (int k = 0; k < 250 * 400; ++k) {
    const double t = k * dt;
    const double r = amp * std::sin(omega * t) + bias;
    const double e = x(0) - r;
    Eigen::Vector4d xe = x;
    xe(0) = e;
    const double u = -(g.k_roll * xe)(0) - (g.k_eta_roll * eta)(0);
    if (t > 350.0) worst_tail = std::max(worst_tail, std::abs(e));
    eta = g.phi_d * eta + g.g_d * e;
    x = d.A * x + d.B * u;
  }
  CHECK(worst_tail < 1e-3);
}

TEST_CASE("a stiff weight set settles a 1 m offset to millimetres in 20 s") {
  VehicleParams vp;
  const RegulatorGains g = synthesize_gains(vp, 0.65, 1.0 / 250.0, stiff_weights());
  QuadState s;
  s.p = Vec3(1.0, -1.0, -1.0).normalized() + Vec3(0.0, 0.0, -6.0);
  RegulatorState reg;
  ControlOutput u;
  const Vec3 ref(0.0, 0.0, -6.0);
  for (int k = 0; k < 20000; ++k) {
    if (k % 4 == 0) u = control_step(s, ref, reg, g, vp);
    s = integrate_rk4(s, u.thrust, u.tau, vp, 1e-3);
  }
  CHECK((s.p - ref).norm() < 1e-3);
}

TEST_CASE("internal model mechanism: exact frequency nulls, detuned does not") {
  VehicleParams vp;
  const RegulatorGains g = synthesize_gains(vp, 0.65, 1.0 / 250.0);
  const double amp = 0.3;
  double err_at_omega = 0.0, err_detuned = 0.0;
  for (double freq : {0.65, 1.2 * 0.65}) {
    QuadState s;
    s.p = Vec3(1.0, -2.0 + amp, -6.0);
    s.v = Vec3(amp * freq, 0.0, 0.5 * amp * freq * std::cos(0.3));
    RegulatorState reg;
    ControlOutput u;
    double tail = 0.0;
    for (int k = 0; k < 240000; ++k) {
      const double t = k * 1e-3;
      const Vec3 ref(1.0 + amp * std::sin(freq * t), -2.0 + amp * std::cos(freq * t),
                     -6.0 + 0.5 * amp * std::sin(freq * t + 0.3));
      if (k % 4 == 0) u = control_step(s, ref, reg, g, vp);
      s = integrate_rk4(s, u.thrust, u.tau, vp, 1e-3);
      if (t > 210.0) tail = std::max(tail, (s.p - ref).cwiseAbs().maxCoeff());
    }
    if (freq == 0.65) {
      err_at_omega = tail;
    } else {
      err_detuned = tail;
    }
  }
  CHECK(err_at_omega < 1e-2);
  CHECK(err_detuned > 5e-2);
}

TEST_CASE("commands respect the actuator limits") {
  VehicleParams vp;
  const RegulatorGains g = synthesize_gains(vp, 0.65, 1.0 / 250.0, stiff_weights());
  QuadState s;
  s.p = Vec3(40.0, -25.0, -2.0);
  s.v = Vec3(5.0, 5.0, -3.0);
  s.R = rpy_to_rot(0.4, -0.3, 0.8);
  RegulatorState reg;
  const Vec3 ref(0.0, 0.0, -6.0);
  for (int k = 0; k < 500; ++k) {
    const ControlOutput u = control_step(s, ref, reg, g, vp);
    CHECK(u.thrust >= vp.thrust_min);
    CHECK(u.thrust <= vp.thrust_max);
    CHECK(u.tau.cwiseAbs().maxCoeff() <= vp.torque_max);
    s = integrate_rk4(s, u.thrust, u.tau, vp, 1.0 / 250.0);
  }
}
