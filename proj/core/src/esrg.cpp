#include "arvaes/esrg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace arvaes {

double steady_speed(const EsParams& params) {
  return std::sqrt(params.alpha_max * params.omega);
}

double alpha_filter_step(double alpha, const EsParams& params) {
  const double a = params.dt_es / (2.0 * params.lambda);
  return ((1.0 - a) * alpha + 2.0 * a * params.alpha_max) / (1.0 + a);
}

EsState es_step(const EsState& state, double y_t, const EsParams& params) {
  const double speed = std::sqrt(state.alpha * params.omega);
  const double phase = params.omega * state.t + params.kappa * y_t;
  EsState next = state;
  next.x_ref += speed * std::cos(phase) * params.dt_es;
  next.y_ref += speed * std::sin(phase) * params.dt_es;
  next.alpha = alpha_filter_step(state.alpha, params);
  next.t += params.dt_es;
  return next;
}

Eigen::Vector2d average_step(const Eigen::Vector2d& pos, const Eigen::Vector2d& map_gradient,
                             double kappa, double alpha, double dt) {
  return pos - 0.5 * kappa * alpha * map_gradient * dt;
}

CentreEstimate centre_estimate(const std::vector<PlanarSample>& history, double omega, double t) {
  CentreEstimator est(omega);
  for (const auto& s : history) {
    if (s.t <= t) est.push(s.t, s.x, s.y);
  }
  return est.estimate(t);
}

CentreEstimator::CentreEstimator(double omega) {
  if (omega <= 0.0) throw std::invalid_argument("CentreEstimator: omega must be positive");
  window_ = 2.0 * std::numbers::pi / omega;
}

void CentreEstimator::push(double t, double x, double y) {
  if (!samples_.empty() && t < samples_.back().t) {
    throw std::invalid_argument("CentreEstimator: samples must be time-ordered");
  }
  samples_.push_back({t, x, y});
  const double cutoff = t - window_;
  while (samples_.size() > 1 && samples_[1].t <= cutoff + 1e-12 &&
         samples_.front().t < cutoff - 1e-12) {
    samples_.pop_front();
  }
}

bool CentreEstimator::ready(double t) const {
  return !samples_.empty() && samples_.front().t <= t - window_ + 1e-9;
}

CentreEstimate CentreEstimator::estimate(double t) const {
  if (!ready(t)) {
    throw std::runtime_error("CentreEstimator: less than one loiter period of history");
  }
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  const double cutoff = t - window_;
  for (const auto& s : samples_) {
    if (s.t >= cutoff - 1e-12 && s.t <= t + 1e-12) {
      sx += s.x;
      sy += s.y;
      ++n;
    }
  }
  return CentreEstimate{sx / static_cast<double>(n), sy / static_cast<double>(n), window_};
}

}  // namespace arvaes
