#include "arvaes/uav.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arvaes {

QuadDeriv dynamics_deriv(const QuadState& s, double thrust, const Vec3& tau,
                         const VehicleParams& params) {
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 j = params.inertia;
  QuadDeriv d;
  d.dp = s.v;
  d.dv = (-thrust * s.R * e3) / params.mass + params.gravity * e3;
  d.dR = s.R * skew(s.w_body);
  const Vec3 jw(j.x() * s.w_body.x(), j.y() * s.w_body.y(), j.z() * s.w_body.z());
  const Vec3 dw = -s.w_body.cross(jw) + tau;
  d.dw = Vec3(dw.x() / j.x(), dw.y() / j.y(), dw.z() / j.z());
  return d;
}

namespace {

QuadState add_scaled(const QuadState& s, const QuadDeriv& d, double h) {
  QuadState out;
  out.p = s.p + h * d.dp;
  out.v = s.v + h * d.dv;
  out.R = s.R + h * d.dR;
  out.w_body = s.w_body + h * d.dw;
  return out;
}

}  // namespace

QuadState integrate_rk4(const QuadState& s, double thrust, const Vec3& tau,
                        const VehicleParams& params, double dt) {
  const QuadDeriv k1 = dynamics_deriv(s, thrust, tau, params);
  const QuadDeriv k2 = dynamics_deriv(add_scaled(s, k1, 0.5 * dt), thrust, tau, params);
  const QuadDeriv k3 = dynamics_deriv(add_scaled(s, k2, 0.5 * dt), thrust, tau, params);
  const QuadDeriv k4 = dynamics_deriv(add_scaled(s, k3, dt), thrust, tau, params);

  QuadState out;
  out.p = s.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.v = s.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  out.R = s.R + dt / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
  out.w_body = s.w_body + dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  out.R = orthonormalize(out.R);
  return out;
}

LinearizedModels linearized_models(const VehicleParams& params) {
  const double g = params.gravity;
  LinearizedModels m;

  m.roll.A = Eigen::MatrixXd::Zero(4, 4);
  m.roll.A(0, 1) = 1.0;
  m.roll.A(1, 2) = g;
  m.roll.A(2, 3) = 1.0;
  m.roll.B = Eigen::MatrixXd::Zero(4, 1);
  m.roll.B(3, 0) = 1.0 / params.inertia.x();

  m.pitch.A = Eigen::MatrixXd::Zero(4, 4);
  m.pitch.A(0, 1) = 1.0;
  m.pitch.A(1, 2) = -g;
  m.pitch.A(2, 3) = 1.0;
  m.pitch.B = Eigen::MatrixXd::Zero(4, 1);
  m.pitch.B(3, 0) = 1.0 / params.inertia.y();

  m.yaw.A = Eigen::MatrixXd::Zero(2, 2);
  m.yaw.A(0, 1) = 1.0;
  m.yaw.B = Eigen::MatrixXd::Zero(2, 1);
  m.yaw.B(1, 0) = 1.0 / params.inertia.z();

  m.vertical.A = Eigen::MatrixXd::Zero(2, 2);
  m.vertical.A(0, 1) = 1.0;
  m.vertical.B = Eigen::MatrixXd::Zero(2, 1);
  m.vertical.B(1, 0) = -1.0 / params.mass;

  return m;
}

void internal_model_discrete(double omega, double dt, Eigen::Matrix3d& phi_d,
                             Eigen::Vector3d& g_d) {
  if (dt * omega >= 2.0) {
    throw std::invalid_argument("internal_model_discrete: dt*omega >= 2 breaks Tustin");
  }
  Eigen::Matrix3d phi = Eigen::Matrix3d::Zero();
  phi(0, 1) = 1.0;
  phi(1, 2) = 1.0;
  phi(2, 1) = -omega * omega;
  Eigen::Vector3d g(0.0, 0.0, 1.0);
  const LinearModel d = tustin_discretize({phi, g}, dt);
  phi_d = d.A;
  g_d = d.B;
}

Eigen::Vector3d internal_model_step(const Eigen::Vector3d& eta, double e, double omega,
                                    double dt) {
  Eigen::Matrix3d phi_d;
  Eigen::Vector3d g_d;
  internal_model_discrete(omega, dt, phi_d, g_d);
  return phi_d * eta + g_d * e;
}

LqrWeights LqrWeights::defaults() {
  LqrWeights w;
  w.q_roll.resize(7);
  w.q_roll << 0.1, 0.05, 300.0, 10.0, 0.01, 0.01, 0.01;
  w.r_roll = 1.0;
  w.q_pitch = w.q_roll;
  w.r_pitch = 1.0;
  w.q_yaw.resize(2);
  w.q_yaw << 20.0, 2.0;
  w.r_yaw = 10.0;
  w.q_vertical.resize(5);
  w.q_vertical << 80.0, 10.0, 0.01, 0.01, 0.01;
  w.r_vertical = 0.05;
  return w;
}

LqrWeights LqrWeights::detuned(double factor) const {
  LqrWeights w = *this;
  w.q_roll /= factor;
  w.q_pitch /= factor;
  w.q_yaw /= factor;
  w.q_vertical /= factor;
  return w;
}

namespace {

// Augments a ZOH plant with the discrete internal model fed by the first
// state (the position error) and returns the LQR gain split into the plant
// and internal-model parts.
void axis_gains(const LinearModel& plant, double dt, const Eigen::Matrix3d& phi_d,
                const Eigen::Vector3d& g_d, const Eigen::VectorXd& q, double r,
                Eigen::RowVectorXd& k_x, Eigen::RowVectorXd& k_eta) {
  const LinearModel dplant = zoh_discretize(plant, dt);
  const auto n = dplant.A.rows();
  Eigen::MatrixXd a_aug = Eigen::MatrixXd::Zero(n + 3, n + 3);
  a_aug.topLeftCorner(n, n) = dplant.A;
  a_aug.bottomRightCorner(3, 3) = phi_d;
  a_aug.block(n, 0, 3, 1) = g_d;
  Eigen::MatrixXd b_aug = Eigen::MatrixXd::Zero(n + 3, 1);
  b_aug.topRows(n) = dplant.B;

  const Eigen::MatrixXd qm = q.asDiagonal();
  const Eigen::MatrixXd rm = Eigen::MatrixXd::Constant(1, 1, r);
  const Eigen::MatrixXd k = dlqr_gain(a_aug, b_aug, qm, rm);
  k_x = k.leftCols(n);
  k_eta = k.rightCols(3);
}

}  // namespace

RegulatorGains synthesize_gains(const VehicleParams& params, double omega, double dt_ctrl,
                                const LqrWeights& weights) {
  const LinearizedModels models = linearized_models(params);
  RegulatorGains gains;
  gains.dt_ctrl = dt_ctrl;
  internal_model_discrete(omega, dt_ctrl, gains.phi_d, gains.g_d);

  axis_gains(models.roll, dt_ctrl, gains.phi_d, gains.g_d, weights.q_roll, weights.r_roll,
             gains.k_roll, gains.k_eta_roll);
  axis_gains(models.pitch, dt_ctrl, gains.phi_d, gains.g_d, weights.q_pitch, weights.r_pitch,
             gains.k_pitch, gains.k_eta_pitch);

  const LinearModel yaw_d = zoh_discretize(models.yaw, dt_ctrl);
  gains.k_yaw =
      dlqr_gain(yaw_d.A, yaw_d.B, Eigen::MatrixXd(weights.q_yaw.asDiagonal()),
                Eigen::MatrixXd::Constant(1, 1, weights.r_yaw));

  axis_gains(models.vertical, dt_ctrl, gains.phi_d, gains.g_d, weights.q_vertical,
             weights.r_vertical, gains.k_vertical, gains.k_eta_vertical);
  return gains;
}

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

ControlOutput control_step(const QuadState& s, const Vec3& ref_inertial, RegulatorState& reg,
                           const RegulatorGains& gains, const VehicleParams& params) {
  const Rpy att = rot_to_rpy(s.R);
  const Vec3 e = s.p - ref_inertial;

  // Body rates stand in for the Euler-angle rates; exact at zero roll/pitch.
  Eigen::Vector4d x_roll(e.y(), s.v.y(), att.roll, s.w_body.x());
  Eigen::Vector4d x_pitch(e.x(), s.v.x(), att.pitch, s.w_body.y());
  Eigen::Vector2d x_yaw(att.yaw, s.w_body.z());
  Eigen::Vector2d x_vert(e.z(), s.v.z());

  const double tau_x = -(gains.k_roll * x_roll)(0) - (gains.k_eta_roll * reg.eta_roll)(0);
  const double tau_y = -(gains.k_pitch * x_pitch)(0) - (gains.k_eta_pitch * reg.eta_pitch)(0);
  const double tau_z = -(gains.k_yaw * x_yaw)(0);
  const double delta_t =
      -(gains.k_vertical * x_vert)(0) - (gains.k_eta_vertical * reg.eta_vertical)(0);

  ControlOutput out;
  out.thrust = clamp(params.hover_thrust() + delta_t, params.thrust_min, params.thrust_max);
  out.tau = Vec3(clamp(tau_x, -params.torque_max, params.torque_max),
                 clamp(tau_y, -params.torque_max, params.torque_max),
                 clamp(tau_z, -params.torque_max, params.torque_max));

  // Conditional integration: hold an axis's internal-model state while its
  // actuator is saturated so it cannot wind up during large transients.
  if (out.tau.x() == tau_x) reg.eta_roll = gains.phi_d * reg.eta_roll + gains.g_d * e.y();
  if (out.tau.y() == tau_y) reg.eta_pitch = gains.phi_d * reg.eta_pitch + gains.g_d * e.x();
  if (out.thrust == params.hover_thrust() + delta_t)
    reg.eta_vertical = gains.phi_d * reg.eta_vertical + gains.g_d * e.z();
  return out;
}

}  // namespace arvaes
