#pragma once

#include <Eigen/Dense>

namespace arvaes {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Roll-pitch-yaw triple, radians. Extrinsic x-y-z convention:
/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct Rpy {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

Mat3 rpy_to_rot(double roll, double pitch, double yaw);
inline Mat3 rpy_to_rot(const Rpy& a) { return rpy_to_rot(a.roll, a.pitch, a.yaw); }

/// Inverse of rpy_to_rot. Throws std::domain_error within 1e-9 of the
/// pitch = +-pi/2 singularity.
Rpy rot_to_rpy(const Mat3& R);

bool is_rotation(const Mat3& R, double tol = 1e-9);

/// Nearest rotation matrix in the Frobenius sense (polar projection).
Mat3 orthonormalize(const Mat3& R);

/// S(x) y = x cross y.
Mat3 skew(const Vec3& x);

/// Rigid map between a local frame and its parent frame.
struct HomTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();

  Vec3 to_parent(const Vec3& p_local) const { return rotation * p_local + origin; }
  Vec3 to_local(const Vec3& p_parent) const {
    return rotation.transpose() * (p_parent - origin);
  }
};

inline Vec3 plane_to_inertial(const HomTransform& H, const Vec3& p_plane) {
  return H.to_parent(p_plane);
}
inline Vec3 inertial_to_plane(const HomTransform& H, const Vec3& p_inertial) {
  return H.to_local(p_inertial);
}

}  // namespace arvaes
