#include "arvaes/lqr.hpp"

#include <stdexcept>

namespace arvaes {

LinearModel zoh_discretize(const LinearModel& model, double dt) {
  const auto n = model.A.rows();
  Eigen::MatrixXd ad = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n) * dt;  // integral of exp(A s)
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (model.A * term) * (dt / k);
    ad += term;
    psi += term * (dt / (k + 1));
    if (term.cwiseAbs().maxCoeff() < 1e-300) break;
  }
  return {ad, psi * model.B};
}

LinearModel tustin_discretize(const LinearModel& model, double dt) {
  const auto n = model.A.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd inv = (eye - 0.5 * dt * model.A).inverse();
  return {inv * (eye + 0.5 * dt * model.A), inv * model.B * dt};
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double tol, int max_iter) {
  const auto n = A.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd ak = A;
  Eigen::MatrixXd gk = B * R.ldlt().solve(B.transpose());
  Eigen::MatrixXd hk = Q;

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd w = eye + gk * hk;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
    const Eigen::MatrixXd wia = lu.solve(ak);
    const Eigen::MatrixXd wig = lu.solve(gk);

    const Eigen::MatrixXd a_next = ak * wia;
    const Eigen::MatrixXd g_next = gk + ak * wig * ak.transpose();
    const Eigen::MatrixXd h_next = hk + wia.transpose() * hk * ak;

    const double delta = (h_next - hk).cwiseAbs().maxCoeff();
    ak = a_next;
    gk = 0.5 * (g_next + g_next.transpose());
    hk = 0.5 * (h_next + h_next.transpose());
    if (delta < tol) return hk;
  }
  throw std::runtime_error("solve_dare: doubling iteration did not converge");
}

Eigen::MatrixXd dlqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd P = solve_dare(A, B, Q, R);
  return (R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
}

double spectral_radius(const Eigen::MatrixXd& A) {
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace arvaes
