#pragma once

#include "arvaes/geometry.hpp"
#include "arvaes/lqr.hpp"

namespace arvaes {

struct VehicleParams {
  double mass = 1.5;                      // kg
  Vec3 inertia = {0.029, 0.029, 0.055};   // diagonal of J, kg m^2
  double gravity = 9.81;                  // m/s^2
  double thrust_min = 0.0;                // N
  double thrust_max = 2.0 * 1.5 * 9.81;   // N
  double torque_max = 0.5;                // N m, per axis

  double hover_thrust() const { return mass * gravity; }
};

/// Rigid-body state, NED inertial frame (+z down, thrust along -z body).
struct QuadState {
  Vec3 p = Vec3::Zero();          // inertial position
  Vec3 v = Vec3::Zero();          // inertial velocity
  Mat3 R = Mat3::Identity();      // body -> inertial
  Vec3 w_body = Vec3::Zero();     // body angular rates
};

struct QuadDeriv {
  Vec3 dp, dv;
  Mat3 dR;
  Vec3 dw;
};

QuadDeriv dynamics_deriv(const QuadState& s, double thrust, const Vec3& tau,
                         const VehicleParams& params);

/// Classical RK4 step followed by re-orthonormalization of the attitude.
QuadState integrate_rk4(const QuadState& s, double thrust, const Vec3& tau,
                        const VehicleParams& params, double dt);

/// The four decoupled continuous models around hover:
/// roll  x = [e_y, v_y, phi, dphi],   u = tau_x
/// pitch x = [e_x, v_x, theta, dtheta], u = tau_y
/// yaw   x = [psi, dpsi],             u = tau_z
/// vertical x = [e_z, v_z],           u = T - T_hover
struct LinearizedModels {
  LinearModel roll, pitch, yaw, vertical;
};

LinearizedModels linearized_models(const VehicleParams& params);

/// Tustin-discretized (Phi, G) pair of the bias + sinusoid exosystem model.
void internal_model_discrete(double omega, double dt, Eigen::Matrix3d& phi_d,
                             Eigen::Vector3d& g_d);

Eigen::Vector3d internal_model_step(const Eigen::Vector3d& eta, double e, double omega,
                                    double dt);

/// Diagonal LQR weights, one entry per augmented state, plus the scalar input
/// weight. Roll/pitch/vertical are augmented with the three internal-model
/// states.
struct LqrWeights {
  Eigen::VectorXd q_roll;      // 7
  double r_roll = 1.0;
  Eigen::VectorXd q_pitch;     // 7
  double r_pitch = 1.0;
  Eigen::VectorXd q_yaw;       // 2
  double r_yaw = 1.0;
  Eigen::VectorXd q_vertical;  // 5
  double r_vertical = 1.0;

  static LqrWeights defaults();
  LqrWeights detuned(double factor) const;  // scales every Q down by factor
};

struct RegulatorGains {
  Eigen::RowVectorXd k_roll;          // 1x4
  Eigen::RowVectorXd k_eta_roll;      // 1x3
  Eigen::RowVectorXd k_pitch;         // 1x4
  Eigen::RowVectorXd k_eta_pitch;     // 1x3
  Eigen::RowVectorXd k_yaw;           // 1x2
  Eigen::RowVectorXd k_vertical;      // 1x2
  Eigen::RowVectorXd k_eta_vertical;  // 1x3
  Eigen::Matrix3d phi_d;
  Eigen::Vector3d g_d;
  double dt_ctrl = 1.0 / 250.0;
};

/// ZOH-discretizes the four plants at dt_ctrl, augments roll/pitch/vertical
/// with the Tustin-discretized internal model, and solves the discrete LQR
/// problem per axis. All closed loops come out with spectral radius < 1.
RegulatorGains synthesize_gains(const VehicleParams& params, double omega, double dt_ctrl,
                                const LqrWeights& weights = LqrWeights::defaults());

struct RegulatorState {
  Eigen::Vector3d eta_roll = Eigen::Vector3d::Zero();
  Eigen::Vector3d eta_pitch = Eigen::Vector3d::Zero();
  Eigen::Vector3d eta_vertical = Eigen::Vector3d::Zero();
};

struct ControlOutput {
  double thrust = 0.0;
  Vec3 tau = Vec3::Zero();
};

/// One 250 Hz regulator step: computes saturated (T, tau) toward the inertial
/// position reference (yaw reference is zero) and advances the internal-model
/// states. Propagates the gimbal-lock error from rot_to_rpy.
ControlOutput control_step(const QuadState& s, const Vec3& ref_inertial, RegulatorState& reg,
                           const RegulatorGains& gains, const VehicleParams& params);

}  // namespace arvaes
