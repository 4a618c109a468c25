#include "arvaes/arva.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace arvaes {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

void check_singularity(const Vec3& p) {
  if (p.norm() <= kFieldSingularityRadius) {
    throw std::domain_error("arva: position inside field singularity guard");
  }
}

}  // namespace

EmiModel EmiModel::from_seed(double w_bar, double drift_frequency, std::uint64_t seed) {
  if (w_bar < 0.0) throw std::invalid_argument("EmiModel: negative bound");
  EmiModel emi;
  emi.bound = w_bar;
  emi.drift_frequency = drift_frequency;
  emi.seed = seed;
  if (w_bar > 0.0) {
    std::mt19937_64 rng(seed);
    emi.base_vector = 0.7 * w_bar * random_unit(rng);
    emi.drift_amplitude = 0.3 * w_bar;
    emi.drift_direction = random_unit(rng);
  }
  return emi;
}

Vec3 EmiModel::sample(double t) const {
  return base_vector +
         drift_amplitude * std::sin(2.0 * std::numbers::pi * drift_frequency * t) *
             drift_direction;
}

Mat3 a_matrix(const Vec3& p) {
  if (p.squaredNorm() == 0.0) {
    throw std::domain_error("a_matrix: undefined at p = 0");
  }
  return 3.0 * p * p.transpose() - p.squaredNorm() * Mat3::Identity();
}

Vec3 dipole_field(const Vec3& p, const Mat3& R_pt) {
  check_singularity(p);
  const double n = p.norm();
  const Vec3 axis = R_pt.col(0);
  return a_matrix(p) * axis / (kFourPi * n * n * n * n * n);
}

DipoleAlignment m_matrix(const Mat3& R_pt) {
  const Vec3 u = R_pt.col(0);
  return DipoleAlignment{u * u.transpose()};
}

double field_intensity(const Vec3& p, const DipoleAlignment& align) {
  check_singularity(p);
  const double n2 = p.squaredNorm();
  const double n = std::sqrt(n2);
  const double s = p.dot(align.M * p) / n2;
  return std::sqrt(1.0 + 3.0 * s) / (kFourPi * n2 * n);
}

Vec3 measure(const Vec3& p_rel, const Mat3& R_pt, const EmiModel& emi, double t) {
  return dipole_field(p_rel, R_pt) + emi.sample(t);
}

double condition(double intensity) {
  if (intensity <= 0.0) {
    throw std::domain_error("condition: nonpositive intensity");
  }
  return std::pow(intensity, -1.0 / 3.0);
}

double nominal_conditioned(const Vec3& p, const DipoleAlignment& align) {
  const double n2 = p.squaredNorm();
  if (n2 == 0.0) return 0.0;
  const double s = p.dot(align.M * p) / n2;
  return std::cbrt(kFourPi) * std::sqrt(n2) / std::pow(1.0 + 3.0 * s, 1.0 / 6.0);
}

Vec3 nominal_conditioned_gradient(const Vec3& p, const DipoleAlignment& align) {
  const double n2 = p.squaredNorm();
  if (n2 == 0.0) {
    throw std::domain_error("nominal_conditioned_gradient: undefined at p = 0");
  }
  const double n = std::sqrt(n2);
  const double s = p.dot(align.M * p) / n2;
  const double f = 1.0 + 3.0 * s;
  const Vec3 grad_s = 2.0 * (align.M * p - s * p) / n2;
  const double c = std::cbrt(kFourPi);
  return c * std::pow(f, -1.0 / 6.0) * p / n -
         c * n / 6.0 * std::pow(f, -7.0 / 6.0) * 3.0 * grad_s;
}

double nsr(const Vec3& p, const DipoleAlignment& align, double w_bar) {
  if (w_bar < 0.0) throw std::invalid_argument("nsr: negative bound");
  if (w_bar == 0.0) return 0.0;
  const double intensity = field_intensity(p, align);
  if (intensity <= w_bar) return 1.0;
  // sup of the conditioned output is reached with the noise aligned against
  // the field: worst-case intensity is ||h|| - w_bar.
  return 1.0 - std::cbrt((intensity - w_bar) / intensity);
}

}  // namespace arvaes
