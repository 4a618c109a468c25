#include "arvaes/scenario.hpp"

#include <cmath>
#include <fstream>

namespace arvaes {

namespace {

bool integer_ratio(double hi, double lo) {
  const double r = hi / lo;
  return std::abs(r - std::round(r)) < 1e-9 && r >= 1.0 - 1e-9;
}

Vec3 vec3_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError("expected 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

nlohmann::json vec3_to(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Rpy rpy_from(const nlohmann::json& j) {
  const Vec3 v = vec3_from(j);
  return Rpy{v.x(), v.y(), v.z()};
}

Eigen::VectorXd vector_from(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

nlohmann::json vector_to(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

}  // namespace

Scenario Scenario::defaults() {
  Scenario s;
  s.emi = EmiModel::from_seed(1e-7, 0.01, s.seed);
  s.es.dt_es = 1.0 / s.rates.es_hz;
  return s;
}

HomTransform Scenario::plane_transform() const {
  return HomTransform{rpy_to_rot(plane_rpy), plane_origin};
}

TransmitterConfig Scenario::transmitter() const {
  const Mat3 r_ip = rpy_to_rot(plane_rpy);
  const Mat3 r_it = rpy_to_rot(transmitter_rpy);
  TransmitterConfig cfg;
  cfg.orientation_plane = r_ip.transpose() * r_it;
  cfg.position_plane = r_ip.transpose() * (victim_position_inertial - plane_origin);
  return cfg;
}

void Scenario::validate() const {
  if (rates.physics_hz <= 0 || rates.ctrl_hz <= 0 || rates.es_hz <= 0 || rates.arva_hz <= 0)
    throw ScenarioError("rates must be positive");
  if (!integer_ratio(rates.physics_hz, rates.ctrl_hz) ||
      !integer_ratio(rates.ctrl_hz, rates.es_hz) || !integer_ratio(rates.es_hz, rates.arva_hz))
    throw ScenarioError("rates must be integer multiples down the chain");
  if (std::abs(es.dt_es - 1.0 / rates.es_hz) > 1e-9)
    throw ScenarioError("es.dt_es inconsistent with rates.es_hz");
  if (es.alpha_max <= 0 || es.kappa <= 0 || es.omega <= 0 || es.lambda <= 0)
    throw ScenarioError("ES parameters must be positive");
  if (duration <= 0) throw ScenarioError("duration must be positive");
  if (y_filter_tau <= 0) throw ScenarioError("y_filter_tau must be positive");
  if (vehicle.mass <= 0 || vehicle.inertia.minCoeff() <= 0)
    throw ScenarioError("vehicle mass and inertia must be positive");
  if (vehicle.thrust_min < 0 || vehicle.thrust_max <= vehicle.thrust_min)
    throw ScenarioError("invalid thrust limits");
  if (emi.bound < 0) throw ScenarioError("EMI bound must be nonnegative");
  if (transmitter().position_plane.z() < -1e-9)
    throw ScenarioError("transmitter must be at or below the search plane");
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario s = defaults();
  if (j.contains("victim_position_inertial"))
    s.victim_position_inertial = vec3_from(j.at("victim_position_inertial"));
  if (j.contains("transmitter_rpy_inertial"))
    s.transmitter_rpy = rpy_from(j.at("transmitter_rpy_inertial"));
  if (j.contains("plane_origin_inertial"))
    s.plane_origin = vec3_from(j.at("plane_origin_inertial"));
  if (j.contains("plane_rpy_inertial")) s.plane_rpy = rpy_from(j.at("plane_rpy_inertial"));
  if (j.contains("drone_start_inertial"))
    s.drone_start = vec3_from(j.at("drone_start_inertial"));
  s.seed = j.value("seed", s.seed);
  if (j.contains("emi")) {
    const auto& e = j.at("emi");
    s.emi = EmiModel::from_seed(e.value("w_bar", 1e-7), e.value("drift_frequency", 0.01),
                                e.value("seed", s.seed));
  } else {
    s.emi = EmiModel::from_seed(s.emi.bound, s.emi.drift_frequency, s.seed);
  }
  if (j.contains("rates")) {
    const auto& r = j.at("rates");
    s.rates.physics_hz = r.value("physics_hz", s.rates.physics_hz);
    s.rates.ctrl_hz = r.value("ctrl_hz", s.rates.ctrl_hz);
    s.rates.es_hz = r.value("es_hz", s.rates.es_hz);
    s.rates.arva_hz = r.value("arva_hz", s.rates.arva_hz);
  }
  if (j.contains("es")) {
    const auto& e = j.at("es");
    s.es.alpha_max = e.value("alpha_max", s.es.alpha_max);
    s.es.kappa = e.value("kappa", s.es.kappa);
    s.es.omega = e.value("omega", s.es.omega);
    s.es.lambda = e.value("lambda", s.es.lambda);
  }
  s.es.dt_es = 1.0 / s.rates.es_hz;
  if (j.contains("vehicle")) {
    const auto& v = j.at("vehicle");
    s.vehicle.mass = v.value("mass", s.vehicle.mass);
    if (v.contains("inertia")) s.vehicle.inertia = vec3_from(v.at("inertia"));
    s.vehicle.gravity = v.value("gravity", s.vehicle.gravity);
    s.vehicle.thrust_min = v.value("thrust_min", s.vehicle.thrust_min);
    s.vehicle.thrust_max = v.value("thrust_max", 2.0 * s.vehicle.mass * s.vehicle.gravity);
    s.vehicle.torque_max = v.value("torque_max", s.vehicle.torque_max);
  }
  if (j.contains("lqr")) {
    const auto& l = j.at("lqr");
    if (l.contains("q_roll")) s.lqr.q_roll = vector_from(l.at("q_roll"));
    s.lqr.r_roll = l.value("r_roll", s.lqr.r_roll);
    if (l.contains("q_pitch")) s.lqr.q_pitch = vector_from(l.at("q_pitch"));
    s.lqr.r_pitch = l.value("r_pitch", s.lqr.r_pitch);
    if (l.contains("q_yaw")) s.lqr.q_yaw = vector_from(l.at("q_yaw"));
    s.lqr.r_yaw = l.value("r_yaw", s.lqr.r_yaw);
    if (l.contains("q_vertical")) s.lqr.q_vertical = vector_from(l.at("q_vertical"));
    s.lqr.r_vertical = l.value("r_vertical", s.lqr.r_vertical);
  }
  s.duration = j.value("duration", s.duration);
  s.y_filter_tau = j.value("y_filter_tau", s.y_filter_tau);
  return s;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["victim_position_inertial"] = vec3_to(victim_position_inertial);
  j["transmitter_rpy_inertial"] = {transmitter_rpy.roll, transmitter_rpy.pitch,
                                   transmitter_rpy.yaw};
  j["plane_origin_inertial"] = vec3_to(plane_origin);
  j["plane_rpy_inertial"] = {plane_rpy.roll, plane_rpy.pitch, plane_rpy.yaw};
  j["drone_start_inertial"] = vec3_to(drone_start);
  j["seed"] = seed;
  j["emi"] = {{"w_bar", emi.bound},
              {"drift_frequency", emi.drift_frequency},
              {"seed", emi.seed}};
  j["rates"] = {{"physics_hz", rates.physics_hz},
                {"ctrl_hz", rates.ctrl_hz},
                {"es_hz", rates.es_hz},
                {"arva_hz", rates.arva_hz}};
  j["es"] = {{"alpha_max", es.alpha_max},
             {"kappa", es.kappa},
             {"omega", es.omega},
             {"lambda", es.lambda}};
  j["vehicle"] = {{"mass", vehicle.mass},
                  {"inertia", vec3_to(vehicle.inertia)},
                  {"gravity", vehicle.gravity},
                  {"thrust_min", vehicle.thrust_min},
                  {"thrust_max", vehicle.thrust_max},
                  {"torque_max", vehicle.torque_max}};
  j["lqr"] = {{"q_roll", vector_to(lqr.q_roll)},     {"r_roll", lqr.r_roll},
              {"q_pitch", vector_to(lqr.q_pitch)},   {"r_pitch", lqr.r_pitch},
              {"q_yaw", vector_to(lqr.q_yaw)},       {"r_yaw", lqr.r_yaw},
              {"q_vertical", vector_to(lqr.q_vertical)}, {"r_vertical", lqr.r_vertical}};
  j["duration"] = duration;
  j["y_filter_tau"] = y_filter_tau;
  return j;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  return from_json(j);
}

void Scenario::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path.string());
  out << to_json().dump(2) << "\n";
}

}  // namespace arvaes
