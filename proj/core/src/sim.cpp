#include "arvaes/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace arvaes {

namespace {

double conditioned_on_plane(double x, double y, const TransmitterConfig& tx,
                            const DipoleAlignment& align) {
  const Vec3 p = Vec3(x, y, 0.0) - tx.position_plane;
  return nominal_conditioned(p, align);
}

// Compass (pattern) search on the planar conditioned map.
Eigen::Vector2d compass_refine(Eigen::Vector2d q, double step, double step_min,
                               const TransmitterConfig& tx, const DipoleAlignment& align) {
  double best = conditioned_on_plane(q.x(), q.y(), tx, align);
  while (step > step_min) {
    bool improved = false;
    const Eigen::Vector2d dirs[4] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
    for (const auto& d : dirs) {
      const Eigen::Vector2d cand = q + d;
      const double v = conditioned_on_plane(cand.x(), cand.y(), tx, align);
      if (v < best) {
        best = v;
        q = cand;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return q;
}

Mat3 rotation_with_x_axis(const Vec3& u) {
  const Vec3 x = u.normalized();
  Vec3 helper = std::abs(x.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitY();
  const Vec3 y = helper.cross(x).normalized();
  const Vec3 z = x.cross(y);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

double offset_for_axis(const Vec3& u, double d_t, Eigen::Vector2d& opt_out) {
  TransmitterConfig tx;
  tx.position_plane = Vec3(0.0, 0.0, d_t);
  tx.orientation_plane = rotation_with_x_axis(u);
  const DipoleAlignment align = m_matrix(tx.orientation_plane);
  // The planar map has a unique minimum, so a compass search from the
  // projection suffices here.
  const Eigen::Vector2d q =
      compass_refine(Eigen::Vector2d::Zero(), std::max(d_t / 4.0, 1e-3), 1e-5, tx, align);
  opt_out = q;
  return q.norm();
}

}  // namespace

Vec3 planar_optimum(const TransmitterConfig& transmitter) {
  if (transmitter.position_plane.z() < -1e-9) {
    throw std::invalid_argument("planar_optimum: transmitter above the search plane");
  }
  const DipoleAlignment align = m_matrix(transmitter.orientation_plane);
  const double cx = transmitter.position_plane.x();
  const double cy = transmitter.position_plane.y();

  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d q(cx, cy);
  // Coarse 1 m grid over a 200x200 m window; lexicographic tie-break.
  for (int i = -100; i <= 100; ++i) {
    for (int j = -100; j <= 100; ++j) {
      const double x = cx + i, y = cy + j;
      const double v = conditioned_on_plane(x, y, transmitter, align);
      if (v < best - 1e-15) {
        best = v;
        q = Eigen::Vector2d(x, y);
      }
    }
  }
  q = compass_refine(q, 0.5, 1e-4 / 4.0, transmitter, align);
  return Vec3(q.x(), q.y(), 0.0);
}

WorstCaseResult worst_case_orientation(double d_t, int sphere_points) {
  if (d_t <= 0.0) throw std::invalid_argument("worst_case_orientation: d_t must be positive");

  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  WorstCaseResult best;
  best.offset = -1.0;

  // Dipole axes on a Fibonacci hemisphere (u and -u give the same field).
  for (int i = 0; i < sphere_points; ++i) {
    const double z = (i + 0.5) / sphere_points;  // hemisphere
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Vec3 u(r * std::cos(phi), r * std::sin(phi), z);
    Eigen::Vector2d opt;
    const double off = offset_for_axis(u, d_t, opt);
    if (off > best.offset) {
      best.offset = off;
      best.axis = u;
      best.optimum = opt;
    }
  }

  // Local refinement of the axis direction.
  double step = 0.05;
  while (step > 1e-5) {
    bool improved = false;
    const Vec3 t1 = best.axis.cross(std::abs(best.axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX())
                        .normalized();
    const Vec3 t2 = best.axis.cross(t1);
    const Vec3 cands[4] = {(best.axis + step * t1).normalized(),
                           (best.axis - step * t1).normalized(),
                           (best.axis + step * t2).normalized(),
                           (best.axis - step * t2).normalized()};
    for (const auto& u : cands) {
      Eigen::Vector2d opt;
      const double off = offset_for_axis(u, d_t, opt);
      if (off > best.offset) {
        best.offset = off;
        best.axis = u;
        best.optimum = opt;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }

  best.orientation = rotation_with_x_axis(best.axis);
  return best;
}

namespace {

struct BoxTimes {
  std::optional<double> t5, t1;
};

// First time the centre enters the axis-aligned box and stays inside for a
// full loiter window.
std::optional<double> first_stable_entry(const std::vector<LogRecord>& rows,
                                         const Eigen::Vector2d& opt, double half,
                                         double window) {
  const auto inside = [&](const LogRecord& r) {
    return std::isfinite(r.cx) && std::abs(r.cx - opt.x()) <= half &&
           std::abs(r.cy - opt.y()) <= half;
  };
  std::size_t j = 0;
  std::size_t bad = 0;  // count of outside rows in [i, j)
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (j < i) {
      j = i;
      bad = 0;
    }
    while (j < rows.size() && rows[j].t <= rows[i].t + window + 1e-9) {
      if (!inside(rows[j])) ++bad;
      ++j;
    }
    if (rows[i].t + window > rows.back().t + 1e-9) return std::nullopt;
    if (bad == 0) return rows[i].t;
    if (!inside(rows[i])) --bad;
  }
  return std::nullopt;
}

}  // namespace

Metrics compute_metrics(const RunLog& log, const Scenario& scenario) {
  Metrics m;
  const auto& rows = log.records;
  if (rows.empty()) return m;

  const double window = 2.0 * std::numbers::pi / scenario.es.omega;
  const Vec3 opt3 = planar_optimum(scenario.transmitter());
  const Eigen::Vector2d opt(opt3.x(), opt3.y());

  m.t_enter_5m_box = first_stable_entry(rows, opt, 2.5, window);
  m.t_enter_1m_box = first_stable_entry(rows, opt, 0.5, window);

  // Loiter radius over the trailing window, relative to the final centre.
  Eigen::Vector2d centre = Eigen::Vector2d::Zero();
  std::size_t n = 0;
  const double t_tail = rows.back().t - window;
  for (const auto& r : rows) {
    if (r.t >= t_tail) {
      centre += r.ref_p;
      ++n;
    }
  }
  if (n > 0) {
    centre /= static_cast<double>(n);
    double acc = 0.0;
    for (const auto& r : rows) {
      if (r.t >= t_tail) acc += (r.ref_p - centre).norm();
    }
    m.steady_radius = acc / static_cast<double>(n);
  }

  double t_prev = rows.front().t;
  Eigen::Vector2d ref_prev = rows.front().ref_p;
  for (const auto& r : rows) {
    if ((r.ref_p - ref_prev).norm() > 0.0) {
      m.max_ref_speed = std::max(m.max_ref_speed, (r.ref_p - ref_prev).norm() / (r.t - t_prev));
      ref_prev = r.ref_p;
      t_prev = r.t;
    }
    m.max_tracking_error = std::max(m.max_tracking_error, (r.p - r.ref_i).norm());
  }
  return m;
}

RunResult run(const Scenario& scenario) {
  scenario.validate();

  const TransmitterConfig tx = scenario.transmitter();
  const HomTransform plane = scenario.plane_transform();
  const Vec3 opt3 = planar_optimum(tx);
  const Eigen::Vector2d opt(opt3.x(), opt3.y());

  const double dt_phys = 1.0 / scenario.rates.physics_hz;
  const auto per = [&](double hz) {
    return static_cast<std::int64_t>(std::llround(scenario.rates.physics_hz / hz));
  };
  const std::int64_t phys_per_ctrl = per(scenario.rates.ctrl_hz);
  const std::int64_t phys_per_es = per(scenario.rates.es_hz);
  const std::int64_t phys_per_arva = per(scenario.rates.arva_hz);
  const std::int64_t n_steps =
      static_cast<std::int64_t>(std::llround(scenario.duration * scenario.rates.physics_hz));

  const RegulatorGains gains =
      synthesize_gains(scenario.vehicle, scenario.es.omega, 1.0 / scenario.rates.ctrl_hz,
                       scenario.lqr);

  QuadState quad;
  quad.p = scenario.drone_start;
  RegulatorState reg;

  const Vec3 start_plane = plane.to_local(scenario.drone_start);
  EsState es;
  es.x_ref = start_plane.x();
  es.y_ref = start_plane.y();

  CentreEstimator centres(scenario.es.omega);
  centres.push(0.0, es.x_ref, es.y_ref);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double hm_norm = 0.0, yt_raw = 0.0, yt_filt = 0.0;
  double cx = nan, cy = nan, dist_centre = nan;
  Vec3 ref_i = plane.to_parent(Vec3(es.x_ref, es.y_ref, 0.0));
  ControlOutput u;
  const double filt_gain =
      1.0 - std::exp(-1.0 / (scenario.rates.ctrl_hz * scenario.y_filter_tau));

  RunResult result;
  result.optimum = opt;
  result.log.records.reserve(static_cast<std::size_t>(n_steps / phys_per_ctrl) + 1);

  for (std::int64_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt_phys;

    if (k % phys_per_arva == 0) {
      const Vec3 p_rel = plane.to_local(quad.p) - tx.position_plane;
      hm_norm = measure(p_rel, tx.orientation_plane, scenario.emi, t).norm();
      yt_raw = condition(hm_norm);
      if (k == 0) yt_filt = yt_raw;
    }
    if (k % phys_per_ctrl == 0 && k > 0) {
      yt_filt += filt_gain * (yt_raw - yt_filt);
    }
    if (k % phys_per_es == 0) {
      es = es_step(es, yt_filt, scenario.es);
      centres.push(es.t, es.x_ref, es.y_ref);
      ref_i = plane.to_parent(Vec3(es.x_ref, es.y_ref, 0.0));
      if (centres.ready(es.t)) {
        const CentreEstimate c = centres.estimate(es.t);
        cx = c.cx;
        cy = c.cy;
        dist_centre = (Eigen::Vector2d(cx, cy) - opt).norm();
      }
    }
    if (k % phys_per_ctrl == 0) {
      if (!quad.p.allFinite() || !quad.v.allFinite() || quad.p.norm() > 1e6 ||
          quad.v.norm() > 1e6) {
        throw DivergenceError("state diverged at t = " + std::to_string(t));
      }
      u = control_step(quad, ref_i, reg, gains, scenario.vehicle);

      LogRecord rec;
      rec.t = t;
      rec.p = quad.p;
      rec.v = quad.v;
      rec.ref_i = ref_i;
      rec.ref_p = Eigen::Vector2d(es.x_ref, es.y_ref);
      rec.hm_norm = hm_norm;
      rec.yt_raw = yt_raw;
      rec.yt_filt = yt_filt;
      rec.alpha = es.alpha;
      rec.cx = cx;
      rec.cy = cy;
      rec.dist_centre_opt = dist_centre;
      result.log.records.push_back(rec);
    }

    quad = integrate_rk4(quad, u.thrust, u.tau, scenario.vehicle, dt_phys);
  }

  result.metrics = compute_metrics(result.log, scenario);
  return result;
}

RunLog oracle(const Scenario& scenario) {
  scenario.validate();
  const TransmitterConfig tx = scenario.transmitter();
  const DipoleAlignment align = m_matrix(tx.orientation_plane);
  const HomTransform plane = scenario.plane_transform();
  const Vec3 opt3 = planar_optimum(tx);
  const Eigen::Vector2d opt(opt3.x(), opt3.y());

  const Vec3 start_plane = plane.to_local(scenario.drone_start);
  Eigen::Vector2d pos(start_plane.x(), start_plane.y());
  double alpha = 0.0;
  const double dt = scenario.es.dt_es;
  const std::int64_t n = static_cast<std::int64_t>(std::llround(scenario.duration / dt));

  RunLog log;
  log.records.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    LogRecord rec;
    rec.t = t;
    rec.ref_p = pos;
    rec.ref_i = plane.to_parent(Vec3(pos.x(), pos.y(), 0.0));
    rec.alpha = alpha;
    const Vec3 p_rel = Vec3(pos.x(), pos.y(), 0.0) - tx.position_plane;
    rec.yt_raw = nominal_conditioned(p_rel, align);
    rec.yt_filt = rec.yt_raw;
    rec.cx = pos.x();
    rec.cy = pos.y();
    rec.dist_centre_opt = (pos - opt).norm();
    log.records.push_back(rec);

    const Vec3 g3 = nominal_conditioned_gradient(p_rel, align);
    pos = average_step(pos, Eigen::Vector2d(g3.x(), g3.y()), scenario.es.kappa, alpha, dt);
    alpha = alpha_filter_step(alpha, scenario.es);
  }
  return log;
}

std::vector<SweepEntry> sweep(const Scenario& base, const std::vector<nlohmann::json>& overrides) {
  std::vector<SweepEntry> out;
  out.reserve(overrides.size());
  const nlohmann::json base_json = base.to_json();
  for (const auto& patch : overrides) {
    SweepEntry entry;
    entry.overrides = patch;
    try {
      nlohmann::json j = base_json;
      j.merge_patch(patch);
      const Scenario s = Scenario::from_json(j);
      entry.metrics = run(s).metrics;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

void append_g9(std::string& line, double v, bool first) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), first ? "%.9g" : ",%.9g", v);
  line += buf;
}

}  // namespace

void write_csv(const RunLog& log, std::ostream& out) {
  out << "t,px,py,pz,vx,vy,vz,ref_xi,ref_yi,ref_zi,ref_xp,ref_yp,hm_norm,yt_raw,yt_filt,"
         "alpha,cx,cy,dist_centre_opt\n";
  std::string line;
  for (const auto& r : log.records) {
    line.clear();
    const double cols[19] = {r.t,        r.p.x(),     r.p.y(),   r.p.z(),   r.v.x(),
                             r.v.y(),    r.v.z(),     r.ref_i.x(), r.ref_i.y(), r.ref_i.z(),
                             r.ref_p.x(), r.ref_p.y(), r.hm_norm, r.yt_raw,  r.yt_filt,
                             r.alpha,    r.cx,        r.cy,      r.dist_centre_opt};
    for (int i = 0; i < 19; ++i) append_g9(line, cols[i], i == 0);
    line += '\n';
    out << line;
  }
}

RunLog read_csv(std::istream& in) {
  RunLog log;
  std::string line;
  if (!std::getline(in, line)) return log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double c[19];
    const char* s = line.c_str();
    char* end = nullptr;
    for (int i = 0; i < 19; ++i) {
      c[i] = std::strtod(s, &end);
      if (end == s) throw std::runtime_error("read_csv: malformed row: " + line);
      s = (*end == ',') ? end + 1 : end;
    }
    LogRecord r;
    r.t = c[0];
    r.p = Vec3(c[1], c[2], c[3]);
    r.v = Vec3(c[4], c[5], c[6]);
    r.ref_i = Vec3(c[7], c[8], c[9]);
    r.ref_p = Eigen::Vector2d(c[10], c[11]);
    r.hm_norm = c[12];
    r.yt_raw = c[13];
    r.yt_filt = c[14];
    r.alpha = c[15];
    r.cx = c[16];
    r.cy = c[17];
    r.dist_centre_opt = c[18];
    log.records.push_back(r);
  }
  return log;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["t_enter_5m_box"] = m.t_enter_5m_box ? nlohmann::json(*m.t_enter_5m_box)
                                         : nlohmann::json(nullptr);
  j["t_enter_1m_box"] = m.t_enter_1m_box ? nlohmann::json(*m.t_enter_1m_box)
                                         : nlohmann::json(nullptr);
  j["steady_radius"] = m.steady_radius;
  j["max_ref_speed"] = m.max_ref_speed;
  j["max_tracking_error"] = m.max_tracking_error;
  return j;
}

}  // namespace arvaes
