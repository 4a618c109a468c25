#pragma once

#include <Eigen/Dense>

namespace arvaes {

struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

/// Zero-order-hold discretization. Exact for nilpotent A (the truncated
/// exponential series terminates); otherwise summed to machine precision.
LinearModel zoh_discretize(const LinearModel& model, double dt);

/// Tustin (bilinear) discretization of (A, B) with the input held over the
/// step.
LinearModel tustin_discretize(const LinearModel& model, double dt);

/// Solves A'PA - P - A'PB (R + B'PB)^-1 B'PA + Q = 0 by the structure
/// preserving doubling algorithm. Throws std::runtime_error if the iteration
/// does not converge to the requested tolerance.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double tol = 1e-10, int max_iter = 100);

/// Discrete LQR gain K with u = -K x.
Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& A);

}  // namespace arvaes
