// Command-line front end: runs simulations, the average-system oracle,
// ground-truth optimum queries, parameter sweeps, and metric recomputation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "arvaes/sim.hpp"

namespace fs = std::filesystem;
using namespace arvaes;

namespace {

constexpr int kExitInvalidScenario = 2;
constexpr int kExitDivergence = 3;

Scenario load_or_default(const std::string& path) {
  if (path.empty()) return Scenario::defaults();
  return Scenario::load(path);
}

void write_run_outputs(const RunResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "run.csv");
    write_csv(result.log, csv);
  }
  nlohmann::json j = metrics_to_json(result.metrics);
  j["optimum"] = {result.optimum.x(), result.optimum.y()};
  std::ofstream mj(out_dir / "metrics.json");
  mj << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARVA extremum-seeking search simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", log_path, overrides_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  double dt_depth = 15.0;

  auto* sim = app.add_subcommand("simulate", "Run the full multirate simulation");
  sim->add_option("--scenario", scenario_path, "Scenario JSON file (default: built-in)");
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--duration", duration, "Override the duration [s]");

  auto* orc = app.add_subcommand("oracle", "Integrate the average gradient-flow system");
  orc->add_option("--scenario", scenario_path, "Scenario JSON file (default: built-in)");
  orc->add_option("--out", out_dir, "Output directory");

  auto* opt = app.add_subcommand("optimum", "Print the planar optimum and projection offset");
  opt->add_option("--scenario", scenario_path, "Scenario JSON file (default: built-in)");

  auto* wc = app.add_subcommand("worst-case", "Worst-case transmitter orientation for a depth");
  wc->add_option("--dt", dt_depth, "Transmitter depth below the search plane [m]")->required();

  auto* sw = app.add_subcommand("sweep", "Run a batch of scenario overrides");
  sw->add_option("--scenario", scenario_path, "Base scenario JSON file (default: built-in)");
  sw->add_option("--overrides", overrides_path, "JSON array of override patches")->required();
  sw->add_option("--out", out_dir, "Output directory");

  auto* met = app.add_subcommand("metrics", "Recompute metrics from a run log");
  met->add_option("--log", log_path, "CSV log file")->required();
  met->add_option("--scenario", scenario_path, "Scenario JSON file (default: built-in)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      Scenario s = load_or_default(scenario_path);
      if (seed) {
        s.seed = *seed;
        s.emi = EmiModel::from_seed(s.emi.bound, s.emi.drift_frequency, *seed);
      }
      if (duration) s.duration = *duration;
      write_run_outputs(run(s), out_dir);
      std::cout << "wrote " << (fs::path(out_dir) / "run.csv").string() << "\n";
    } else if (orc->parsed()) {
      const Scenario s = load_or_default(scenario_path);
      const RunLog log = oracle(s);
      fs::create_directories(out_dir);
      std::ofstream csv(fs::path(out_dir) / "oracle.csv");
      write_csv(log, csv);
      std::cout << "wrote " << (fs::path(out_dir) / "oracle.csv").string() << "\n";
    } else if (opt->parsed()) {
      const Scenario s = load_or_default(scenario_path);
      const TransmitterConfig tx = s.transmitter();
      const Vec3 p_star = planar_optimum(tx);
      const Eigen::Vector2d proj(tx.position_plane.x(), tx.position_plane.y());
      const double offset = (Eigen::Vector2d(p_star.x(), p_star.y()) - proj).norm();
      std::cout << "p_star_plane: [" << p_star.x() << ", " << p_star.y() << "]\n"
                << "p_proj_plane: [" << proj.x() << ", " << proj.y() << "]\n"
                << "offset_m: " << offset << "\n";
    } else if (wc->parsed()) {
      const WorstCaseResult r = worst_case_orientation(dt_depth);
      std::cout << "axis_plane: [" << r.axis.x() << ", " << r.axis.y() << ", " << r.axis.z()
                << "]\noffset_m: " << r.offset << "\noptimum_plane: [" << r.optimum.x() << ", "
                << r.optimum.y() << "]\n";
    } else if (sw->parsed()) {
      const Scenario base = load_or_default(scenario_path);
      std::ifstream in(overrides_path);
      if (!in) throw ScenarioError("cannot open overrides file: " + overrides_path);
      nlohmann::json patches;
      in >> patches;
      if (!patches.is_array()) throw ScenarioError("overrides file must hold a JSON array");
      const auto entries = sweep(base, std::vector<nlohmann::json>(patches.begin(), patches.end()));
      nlohmann::json out = nlohmann::json::array();
      for (const auto& e : entries) {
        nlohmann::json row;
        row["overrides"] = e.overrides;
        if (e.metrics) {
          row["metrics"] = metrics_to_json(*e.metrics);
        } else {
          row["error"] = e.error;
        }
        out.push_back(row);
      }
      fs::create_directories(out_dir);
      std::ofstream os(fs::path(out_dir) / "sweep.json");
      os << out.dump(2) << "\n";
      std::cout << "wrote " << (fs::path(out_dir) / "sweep.json").string() << "\n";
    } else if (met->parsed()) {
      const Scenario s = load_or_default(scenario_path);
      std::ifstream in(log_path);
      if (!in) throw std::runtime_error("cannot open log file: " + log_path);
      const RunLog log = read_csv(in);
      std::cout << metrics_to_json(compute_metrics(log, s)).dump(2) << "\n";
    }
  } catch (const ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return kExitInvalidScenario;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
