#pragma once

#include <cstdint>

#include "arvaes/geometry.hpp"

namespace arvaes {

/// Hard guard around the dipole singularity. The receiver never reaches the
/// transmitter (it stays above the search plane while the transmitter is at
/// or below it), so crossing this radius indicates a configuration mistake.
inline constexpr double kFieldSingularityRadius = 1e-3;  // m

/// Static transmitter pose expressed in the search plane frame.
struct TransmitterConfig {
  Vec3 position_plane = Vec3::Zero();        // [t_x, t_y, d_t], d_t >= 0
  Mat3 orientation_plane = Mat3::Identity();  // ^pR_t
};

/// Rank-one projector u u^T, with u the transmitter dipole axis expressed in
/// the plane frame. Eigenvalues {0, 0, 1}.
struct DipoleAlignment {
  Mat3 M = Mat3::Identity().col(0) * Mat3::Identity().row(0);
};

/// Quasi-constant electromagnetic interference: a fixed bias plus one slow
/// sinusoidal drift, with ||w(t)|| <= bound for all t. Direction vectors are
/// drawn deterministically from the seed.
struct EmiModel {
  double bound = 0.0;  // w_bar, field units
  Vec3 base_vector = Vec3::Zero();
  double drift_frequency = 0.01;  // Hz
  double drift_amplitude = 0.0;
  Vec3 drift_direction = Vec3::UnitX();
  std::uint64_t seed = 0;

  static EmiModel from_seed(double w_bar, double drift_frequency, std::uint64_t seed);

  Vec3 sample(double t) const;
};

/// Symmetric traceless matrix of the dipole field closed form.
/// Throws std::domain_error at p = 0.
Mat3 a_matrix(const Vec3& p);

/// Dipole field at relative position p, axis given by the first column of
/// R_pt. Throws std::domain_error inside the singularity guard.
Vec3 dipole_field(const Vec3& p, const Mat3& R_pt);

DipoleAlignment m_matrix(const Mat3& R_pt);

/// Closed-form field intensity ||h||. Throws inside the singularity guard.
double field_intensity(const Vec3& p, const DipoleAlignment& align);

/// Noisy receiver measurement: dipole field plus EMI sampled at time t.
Vec3 measure(const Vec3& p_rel, const Mat3& R_pt, const EmiModel& emi, double t);

/// Conditioned measurement: intensity^(-1/3). Throws std::domain_error for
/// nonpositive intensity.
double condition(double intensity);

/// Noiseless conditioned intensity; continuous with value 0 at p = 0.
double nominal_conditioned(const Vec3& p, const DipoleAlignment& align);

/// Analytic gradient of nominal_conditioned with respect to p. Undefined at
/// p = 0 (throws).
Vec3 nominal_conditioned_gradient(const Vec3& p, const DipoleAlignment& align);

/// Worst-case noise-to-signal ratio of the conditioned measurement over all
/// EMI realizations with norm bounded by w_bar. Value in [0, 1].
double nsr(const Vec3& p, const DipoleAlignment& align, double w_bar);

}  // namespace arvaes
