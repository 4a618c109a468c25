#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arvaes/scenario.hpp"

namespace arvaes {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogRecord {
  double t = 0.0;
  Vec3 p = Vec3::Zero();      // drone, inertial
  Vec3 v = Vec3::Zero();      // drone, inertial
  Vec3 ref_i = Vec3::Zero();  // reference, inertial
  Eigen::Vector2d ref_p = Eigen::Vector2d::Zero();  // reference, plane frame
  double hm_norm = 0.0;
  double yt_raw = 0.0;
  double yt_filt = 0.0;
  double alpha = 0.0;
  double cx = 0.0, cy = 0.0;      // NaN before one full loiter window
  double dist_centre_opt = 0.0;   // NaN before one full loiter window
};

struct RunLog {
  std::vector<LogRecord> records;
};

struct Metrics {
  std::optional<double> t_enter_5m_box;
  std::optional<double> t_enter_1m_box;
  double steady_radius = 0.0;
  double max_ref_speed = 0.0;
  double max_tracking_error = 0.0;
};

struct RunResult {
  RunLog log;
  Metrics metrics;
  Eigen::Vector2d optimum;  // p* on the plane
};

/// Minimizer of the conditioned map restricted to the plane z = 0: coarse
/// 1 m grid over a 200x200 m window centred on the transmitter projection,
/// then compass-search refinement to 1e-4 m. Returns plane coordinates with
/// z = 0.
Vec3 planar_optimum(const TransmitterConfig& transmitter);

struct WorstCaseResult {
  Mat3 orientation;  // ^pR_t maximizing the p* offset
  Vec3 axis;         // dipole axis in the plane frame
  double offset = 0.0;
  Eigen::Vector2d optimum;
};

/// Transmitter orientation maximizing ||p* - p_proj|| for a transmitter
/// buried at depth d_t. Fibonacci sphere grid over the dipole axis plus
/// local refinement.
WorstCaseResult worst_case_orientation(double d_t, int sphere_points = 2048);

/// Executes the full multirate loop. Deterministic in the scenario (including
/// its seed). Throws ScenarioError for invalid scenarios, DivergenceError if
/// the state leaves the sane envelope.
RunResult run(const Scenario& scenario);

/// Integrates the average gradient-flow system on the noiseless conditioned
/// map from the same initial plane position, as a cross-validation trace.
/// Records reference columns only; drone columns stay zero.
RunLog oracle(const Scenario& scenario);

struct SweepEntry {
  nlohmann::json overrides;
  std::optional<Metrics> metrics;
  std::string error;  // nonempty when the run failed
};

std::vector<SweepEntry> sweep(const Scenario& base, const std::vector<nlohmann::json>& overrides);

/// Recomputes Metrics from a log (the same routine run() uses).
Metrics compute_metrics(const RunLog& log, const Scenario& scenario);

void write_csv(const RunLog& log, std::ostream& out);
RunLog read_csv(std::istream& in);

nlohmann::json metrics_to_json(const Metrics& m);

}  // namespace arvaes
