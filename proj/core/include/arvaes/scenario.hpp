#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "arvaes/arva.hpp"
#include "arvaes/esrg.hpp"
#include "arvaes/geometry.hpp"
#include "arvaes/uav.hpp"

namespace arvaes {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rates {
  double physics_hz = 1000.0;
  double ctrl_hz = 250.0;
  double es_hz = 10.0;
  double arva_hz = 1.0;
};

/// Full experiment description. The transmitter pose is given in inertial
/// coordinates; the plane-frame quantities consumed by the field model are
/// derived through the plane transform.
struct Scenario {
  Vec3 victim_position_inertial = {24.0866, 34.0866, -16.8773};
  Rpy transmitter_rpy = {0.0, 0.1745, 2.7052};  // transmitter to inertial
  Vec3 plane_origin = {0.0, 0.0, -6.1268};      // ^iO_p
  Rpy plane_rpy = {0.0, 0.6162, 0.7854};        // plane to inertial
  Vec3 drone_start = {0.0, 0.0, -6.0};          // inertial, at rest
  EmiModel emi;
  EsParams es;
  VehicleParams vehicle;
  LqrWeights lqr = LqrWeights::defaults();
  Rates rates;
  double duration = 300.0;  // s
  std::uint64_t seed = 1;
  double y_filter_tau = 0.5;  // s, low-pass on the conditioned measurement

  /// Bundled baseline scenario (noise on with the default EMI bound).
  static Scenario defaults();

  HomTransform plane_transform() const;
  TransmitterConfig transmitter() const;

  /// Throws ScenarioError on inconsistent rates or invalid parameters.
  void validate() const;

  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static Scenario load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

}  // namespace arvaes
