#pragma once

#include <cstdint>
#include <string>

#include "multilift/controller.hpp"
#include "multilift/dynamics.hpp"
#include "multilift/estimator.hpp"
#include "multilift/network.hpp"
#include "multilift/sensor.hpp"
#include "multilift/trajectory.hpp"

namespace multilift {

enum class SimMode { kIsolatedEstimator, kEstimatorInLoop };

// How agents obtain their initial belief at the first tick: from their own
// first measurement, or all from agent 0's (identical initialization).
enum class InitMode { kOwnMeasurement, kShared };

struct SimConfig {
  TrajectoryConfig trajectory;
  CameraConfig camera;
  FormationConfig formation;
  NoiseConfig noise;
  DisturbanceModel disturbance;
  LossSchedule loss;
  ControllerGains gains;
  SimMode mode = SimMode::kIsolatedEstimator;
  InitMode init_mode = InitMode::kOwnMeasurement;
  int num_agents = 4;
  double estimator_dt = 0.05;   // 20 Hz
  int physics_substeps = 12;    // 240 Hz physics by default
  bool strict_250hz = false;    // alternate 12/13 substeps for exact 250 Hz
  double duration = 60.0;       // [s]
  std::uint64_t master_seed = 1;
  int runs = 50;
  int driver_agent = 0;         // whose estimate drives truth in-loop mode
  int bus_latency_ticks = 0;

  void validate() const;  // throws ConfigError
};

// JSON serialization (the config file format).
std::string config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const std::string& text);
SimConfig load_config_file(const std::string& path);

// Presets reproducing the evaluation scenarios; throws ConfigError for an
// unknown name. Names: pirouette, pirouette-commloss, lissajous,
// lissajous-commloss.
SimConfig make_scenario(const std::string& name);

}  // namespace multilift
