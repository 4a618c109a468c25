#include "arvaes/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace arvaes {

Mat3 rpy_to_rot(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);

  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return rz * ry * rx;
}

Rpy rot_to_rpy(const Mat3& R) {
  // R(2,0) = -sin(pitch) for the Rz*Ry*Rx composition.
  if (std::abs(R(2, 0)) > 1.0 - 1e-9) {
    throw std::domain_error("rot_to_rpy: pitch at gimbal lock");
  }
  Rpy a;
  a.pitch = -std::asin(R(2, 0));
  a.roll = std::atan2(R(2, 1), R(2, 2));
  a.yaw = std::atan2(R(1, 0), R(0, 0));
  return a;
}

bool is_rotation(const Mat3& R, double tol) {
  const Mat3 err = R.transpose() * R - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() < tol && std::abs(R.determinant() - 1.0) < tol;
}

Mat3 orthonormalize(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 Q = svd.matrixU() * svd.matrixV().transpose();
  if (Q.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    Q = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Q;
}

Mat3 skew(const Vec3& x) {
  Mat3 s;
  s << 0, -x.z(), x.y(), x.z(), 0, -x.x(), -x.y(), x.x(), 0;
  return s;
}

}  // namespace arvaes
