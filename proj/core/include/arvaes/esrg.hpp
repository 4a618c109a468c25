#pragma once

#include <deque>
#include <vector>

#include <Eigen/Dense>

namespace arvaes {

struct EsParams {
  double alpha_max = 20.0;  // m^2/s
  double kappa = 0.07;
  double omega = 0.65;  // rad/s
  double lambda = 5.0;  // s, gain filter time constant
  double dt_es = 0.1;   // s
};

/// Reference position on the search plane plus the filtered gain.
struct EsState {
  double x_ref = 0.0;
  double y_ref = 0.0;
  double alpha = 0.0;
  double t = 0.0;
};

/// Constant reference speed once the gain has settled: sqrt(alpha_max*omega).
double steady_speed(const EsParams& params);

/// Tustin update of the first-order lag driving alpha toward alpha_max.
double alpha_filter_step(double alpha, const EsParams& params);

/// One forward-Euler step of the bounded-update-rate seeker. The measured
/// output enters only through the phase, so the planar displacement norm is
/// exactly sqrt(alpha*omega)*dt_es.
EsState es_step(const EsState& state, double y_t, const EsParams& params);

/// Forward-Euler step of the average gradient-flow system (validation oracle,
/// not part of the control path).
Eigen::Vector2d average_step(const Eigen::Vector2d& pos, const Eigen::Vector2d& map_gradient,
                             double kappa, double alpha, double dt);

struct CentreEstimate {
  double cx = 0.0;
  double cy = 0.0;
  double window = 0.0;  // s, one loiter period
};

struct PlanarSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Mean of the reference samples over the trailing loiter period 2*pi/omega.
/// Throws std::runtime_error until one full window of history is available.
CentreEstimate centre_estimate(const std::vector<PlanarSample>& history, double omega, double t);

/// Streaming version of centre_estimate over a sliding window.
class CentreEstimator {
 public:
  explicit CentreEstimator(double omega);

  void push(double t, double x, double y);
  bool ready(double t) const;
  CentreEstimate estimate(double t) const;  // throws if !ready(t)
  double window() const { return window_; }

 private:
  double window_;
  std::deque<PlanarSample> samples_;
};

}  // namespace arvaes
