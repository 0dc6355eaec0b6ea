#pragma once

#include <optional>
#include <string>
#include <vector>

#include "multilift/config.hpp"

namespace multilift {

struct AgentTick {
  Vec13 estimate = Vec13::Zero();
  Mat13 covariance = Mat13::Identity();
  bool meas_valid = false;
};

struct TickRecord {
  double t = 0.0;
  PayloadState truth;
  std::vector<AgentTick> agents;
  bool comms_active = true;
  ControlInput input;  // input applied over the following interval
};

struct EpisodeLog {
  std::vector<TickRecord> ticks;
  bool diverged = false;
  double diverged_at = 0.0;
  int rejected_contributions = 0;
};

// One lockstep episode. Deterministic: identical (cfg, run_index) produce
// bit-identical logs. A diverged filter terminates the episode with a
// flagged partial log.
EpisodeLog run_episode(const SimConfig& cfg, int run_index);

// Per-tick record reduced to what the metrics need (agent 0's estimate,
// matching the paper's single-rotorcraft reporting).
struct ReducedTick {
  double t = 0.0;
  // Group order: position, orientation, velocity, angular rates.
  double err[4] = {0, 0, 0, 0};        // 2-norm errors vs truth
  double cov_trace[4] = {0, 0, 0, 0};  // trace of the covariance block
  double nees_pos = 0.0;               // position-block NEES
  Vec3 truth_pos = Vec3::Zero();
  Quat truth_att;
  Vec3 est_pos = Vec3::Zero();
  Quat est_att;
  Vec3 sigma_pos = Vec3::Zero();  // per-axis 1-sigma of the estimate
  bool comms_active = true;
};

struct RunReduced {
  std::vector<ReducedTick> ticks;
  bool diverged = false;
};

// 2-norm orientation error: 2*||vec(q_est x q_true^-1)|| sign-aligned.
double orientation_error(const Quat& q_est, const Quat& q_true);

RunReduced reduce_episode(const EpisodeLog& log, int agent_id = 0);

struct GroupStats {
  double min_err = 0.0, mean_err = 0.0, max_err = 0.0;
  double rms_cov_trace = 0.0;
};

struct McTick {
  double t = 0.0;
  GroupStats group[4];  // position, orientation, velocity, angular rates
  double mean_nees_pos = 0.0;
};

struct McSummary {
  std::vector<McTick> ticks;
  int total_runs = 0;
  int diverged_runs = 0;
};

struct McResult {
  McSummary summary;
  std::vector<RunReduced> runs;
};

McSummary aggregate_runs(const std::vector<RunReduced>& runs);

// Runs are embarrassingly parallel with independent seed streams; any
// thread count yields identical results. threads <= 1 is the serial
// reference path.
McResult run_monte_carlo(const SimConfig& cfg, int threads = 1);

// Writes summary.csv, one run_NNN.csv per run, and manifest.json. Throws
// ConfigError for an empty result and std::runtime_error on I/O failure;
// no partial summary file is left behind.
void export_results(const McResult& result, const SimConfig& cfg,
                    const std::string& out_dir);

}  // namespace multilift
