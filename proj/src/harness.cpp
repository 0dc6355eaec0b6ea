#include "multilift/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace multilift {

namespace {

struct Agent {
  InformationPair pair;
  bool initialized = false;
  ControlInput last_u;  // in-loop: this agent's previous controller output
};

bool in_total_blackout(const LossSchedule& loss, double t) {
  for (const auto& w : loss.windows) {
    if (w.mode == LossMode::kTotalBlackout && t >= w.start && t < w.end) {
      return true;
    }
  }
  return false;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double orientation_error(const Quat& q_est, const Quat& q_true) {
  const Quat err = quat_align_sign(
      quat_multiply(q_est, quat_conjugate(q_true)), Quat::identity());
  return 2.0 * err.vec().norm();
}

EpisodeLog run_episode(const SimConfig& cfg, int run_index) {
  cfg.validate();
  const double dt = cfg.estimator_dt;
  const int num_ticks = static_cast<int>(std::llround(cfg.duration / dt));
  const bool isolated = cfg.mode == SimMode::kIsolatedEstimator;

  RandomStream dist_stream(
      derive_seed(cfg.master_seed, run_index, kStreamDisturbance));
  std::vector<RandomStream> sensor_streams;
  for (int i = 0; i < cfg.num_agents; ++i) {
    sensor_streams.emplace_back(
        derive_seed(cfg.master_seed, run_index, kStreamSensorBase + i));
  }

  PayloadState truth;
  {
    const ReferenceState ref0 = trajectory_reference(0.0, cfg.trajectory);
    truth.position = ref0.position;
    truth.attitude = ref0.attitude;
    truth.velocity = ref0.velocity;
    truth.rates = ref0.rates;
  }

  std::vector<Agent> agents(cfg.num_agents);
  SyncBus bus(cfg.num_agents, cfg.loss);
  ControlInput applied_u;  // drives truth over the current interval (in-loop)
  Vec3 f_dist = Vec3::Zero();
  double next_dist_sample = 0.0;

  EpisodeLog log;
  log.ticks.reserve(num_ticks);

  for (int k = 0; k < num_ticks; ++k) {
    const double t = k * dt;

    if (k > 0) {
      // Disturbance held constant over the configured hold interval
      // (one estimator period by default).
      if ((k - 1) * dt >= next_dist_sample - 0.5 * dt) {
        f_dist = sample_disturbance(dist_stream, cfg.disturbance);
        next_dist_sample += cfg.disturbance.hold_interval;
      }
      const int substeps = cfg.strict_250hz
                               ? ((k % 2 == 0) ? 13 : 12)
                               : cfg.physics_substeps;
      const double h = dt / substeps;
      for (int s = 0; s < substeps; ++s) {
        const double ts = (k - 1) * dt + s * h;
        const ControlInput u_truth =
            isolated ? trajectory_reference(ts, cfg.trajectory).feed_forward()
                     : applied_u;
        truth = step_truth(truth, u_truth, f_dist, h,
                           cfg.disturbance.payload_mass);
      }
    }

    std::vector<Measurement> meas(cfg.num_agents);
    for (int i = 0; i < cfg.num_agents; ++i) {
      meas[i] = sense_payload(i, truth, cfg.formation, cfg.camera,
                              sensor_streams[i], cfg.noise.meas, t);
    }

    TickRecord rec;
    rec.t = t;
    rec.truth = truth;
    rec.comms_active = !in_total_blackout(cfg.loss, t);
    rec.agents.resize(cfg.num_agents);

    try {
      // Phase 1: predict, produce and broadcast contributions.
      bus.expire_before(k >= cfg.bus_latency_ticks ? k - cfg.bus_latency_ticks
                                                   : 0);
      std::vector<InformationPair> predicted(cfg.num_agents);
      std::vector<PayloadState> x_pred(cfg.num_agents);
      std::vector<Contribution> own(cfg.num_agents);
      std::vector<bool> has_own(cfg.num_agents, false);
      // Agents that were already initialized before this tick; the ones
      // initialized this tick skip predict/fuse.
      std::vector<bool> active(cfg.num_agents, false);
      for (int i = 0; i < cfg.num_agents; ++i) active[i] = agents[i].initialized;

      for (int i = 0; i < cfg.num_agents; ++i) {
        Agent& a = agents[i];
        if (!active[i]) {
          const Measurement& init_z =
              cfg.init_mode == InitMode::kShared ? meas[0] : meas[i];
          if (init_z.valid) {
            a.pair = initial_pair(init_z, cfg.noise);
            a.initialized = true;
            rec.agents[i].meas_valid = meas[i].valid;
          }
          continue;
        }
        const ControlInput u_pred =
            isolated
                ? trajectory_reference((k - 1) * dt, cfg.trajectory).feed_forward()
                : a.last_u;
        predicted[i] = predict(a.pair, u_pred, cfg.noise, dt);
        Mat13 unused;
        from_information(predicted[i], &x_pred[i], &unused);
        if (meas[i].valid) {
          own[i] = local_contribution(x_pred[i], meas[i], cfg.noise);
          own[i].step = static_cast<std::uint64_t>(k);
          has_own[i] = true;
          bus.broadcast({i, static_cast<std::uint64_t>(k), own[i], t}, t);
        }
        rec.agents[i].meas_valid = meas[i].valid;
      }

      // Phase 2: collect and fuse. Contributions are ordered by agent id
      // so identically-initialized agents stay bit-identical.
      const std::uint64_t fuse_step =
          k >= cfg.bus_latency_ticks
              ? static_cast<std::uint64_t>(k - cfg.bus_latency_ticks)
              : std::numeric_limits<std::uint64_t>::max();
      for (int i = 0; i < cfg.num_agents; ++i) {
        Agent& a = agents[i];
        if (!active[i]) continue;

        std::vector<Contribution> contributions;
        if (has_own[i]) contributions.push_back(own[i]);
        if (fuse_step != std::numeric_limits<std::uint64_t>::max()) {
          for (auto& c : bus.collect(i, fuse_step)) {
            contributions.push_back(std::move(c));
          }
        }
        std::sort(contributions.begin(), contributions.end(),
                  [](const Contribution& x, const Contribution& y) {
                    return x.agent_id < y.agent_id;
                  });
        int rejected = 0;
        a.pair = fuse(predicted[i], contributions, &rejected);
        log.rejected_contributions += rejected;
      }

      // Phase 3: control and logging.
      const ReferenceState ref = trajectory_reference(t, cfg.trajectory);
      for (int i = 0; i < cfg.num_agents; ++i) {
        Agent& a = agents[i];
        if (!a.initialized) continue;
        PayloadState x_hat;
        Mat13 P_hat;
        from_information(a.pair, &x_hat, &P_hat);
        rec.agents[i].estimate = x_hat.to_vector();
        rec.agents[i].covariance = P_hat;
        if (!isolated) a.last_u = compute_input(x_hat, ref, cfg.gains);
      }
      applied_u = isolated ? ref.feed_forward() : agents[cfg.driver_agent].last_u;
      rec.input = applied_u;
    } catch (const DivergenceError&) {
      log.diverged = true;
      log.diverged_at = t;
      return log;
    }

    log.ticks.push_back(std::move(rec));
  }
  return log;
}

RunReduced reduce_episode(const EpisodeLog& log, int agent_id) {
  RunReduced out;
  out.diverged = log.diverged;
  out.ticks.reserve(log.ticks.size());
  for (const auto& rec : log.ticks) {
    const auto& a = rec.agents.at(agent_id);
    const PayloadState est = PayloadState::from_vector(a.estimate);
    ReducedTick r;
    r.t = rec.t;
    r.comms_active = rec.comms_active;
    r.truth_pos = rec.truth.position;
    r.truth_att = rec.truth.attitude;
    r.est_pos = est.position;
    r.est_att = est.attitude;

    r.err[0] = (est.position - rec.truth.position).norm();
    r.err[1] = orientation_error(est.attitude, rec.truth.attitude);
    r.err[2] = (est.velocity - rec.truth.velocity).norm();
    r.err[3] = (est.rates - rec.truth.rates).norm();

    r.cov_trace[0] = a.covariance.block<3, 3>(kPosIdx, kPosIdx).trace();
    r.cov_trace[1] = a.covariance.block<4, 4>(kQuatIdx, kQuatIdx).trace();
    r.cov_trace[2] = a.covariance.block<3, 3>(kVelIdx, kVelIdx).trace();
    r.cov_trace[3] = a.covariance.block<3, 3>(kRateIdx, kRateIdx).trace();

    const Mat3 P_pos = a.covariance.block<3, 3>(kPosIdx, kPosIdx);
    const Vec3 e = est.position - rec.truth.position;
    r.nees_pos = e.dot(P_pos.llt().solve(e));
    r.sigma_pos = P_pos.diagonal().cwiseSqrt();
    out.ticks.push_back(r);
  }
  return out;
}

McSummary aggregate_runs(const std::vector<RunReduced>& runs) {
  McSummary summary;
  summary.total_runs = static_cast<int>(runs.size());
  std::size_t num_ticks = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) {
    if (r.diverged) {
      ++summary.diverged_runs;
      continue;
    }
    num_ticks = std::min(num_ticks, r.ticks.size());
  }
  const int live = summary.total_runs - summary.diverged_runs;
  if (live == 0 || num_ticks == std::numeric_limits<std::size_t>::max()) {
    return summary;
  }

  summary.ticks.resize(num_ticks);
  for (std::size_t k = 0; k < num_ticks; ++k) {
    McTick& mt = summary.ticks[k];
    for (int g = 0; g < 4; ++g) {
      mt.group[g].min_err = std::numeric_limits<double>::infinity();
      mt.group[g].max_err = -std::numeric_limits<double>::infinity();
    }
    for (const auto& r : runs) {
      if (r.diverged) continue;
      const ReducedTick& tick = r.ticks[k];
      mt.t = tick.t;
      for (int g = 0; g < 4; ++g) {
        mt.group[g].min_err = std::min(mt.group[g].min_err, tick.err[g]);
        mt.group[g].max_err = std::max(mt.group[g].max_err, tick.err[g]);
        mt.group[g].mean_err += tick.err[g];
        mt.group[g].rms_cov_trace += tick.cov_trace[g] * tick.cov_trace[g];
      }
      mt.mean_nees_pos += tick.nees_pos;
    }
    for (int g = 0; g < 4; ++g) {
      mt.group[g].mean_err /= live;
      mt.group[g].rms_cov_trace = std::sqrt(mt.group[g].rms_cov_trace / live);
    }
    mt.mean_nees_pos /= live;
  }
  return summary;
}

McResult run_monte_carlo(const SimConfig& cfg, int threads) {
  cfg.validate();
  McResult result;
  result.runs.resize(cfg.runs);

#ifdef _OPENMP
  if (threads > 1) {
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (int r = 0; r < cfg.runs; ++r) {
      result.runs[r] = reduce_episode(run_episode(cfg, r));
    }
  } else
#endif
  {
    for (int r = 0; r < cfg.runs; ++r) {
      result.runs[r] = reduce_episode(run_episode(cfg, r));
    }
  }
  result.summary = aggregate_runs(result.runs);
  return result;
}

void export_results(const McResult& result, const SimConfig& cfg,
                    const std::string& out_dir) {
  if (result.runs.empty() || result.summary.ticks.empty()) {
    throw ConfigError("nothing to export: empty result");
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  static const char* kGroups[4] = {"pos", "att", "vel", "rate"};

  std::string summary_csv = "time";
  for (const auto* g : kGroups) {
    summary_csv += std::string(",") + g + "_err_min," + g + "_err_mean," + g +
                   "_err_max," + g + "_rms_cov_trace";
  }
  summary_csv += ",mean_nees_pos\n";
  for (const auto& mt : result.summary.ticks) {
    summary_csv += fmt(mt.t);
    for (int g = 0; g < 4; ++g) {
      summary_csv += "," + fmt(mt.group[g].min_err) + "," +
                     fmt(mt.group[g].mean_err) + "," + fmt(mt.group[g].max_err) +
                     "," + fmt(mt.group[g].rms_cov_trace);
    }
    summary_csv += "," + fmt(mt.mean_nees_pos) + "\n";
  }

  {
    std::ofstream out(fs::path(out_dir) / "summary.csv",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write summary.csv in " + out_dir);
    out << summary_csv;
    if (!out) throw std::runtime_error("write failure on summary.csv");
  }

  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03zu.csv", r);
    std::ofstream out(fs::path(out_dir) / name,
                      std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(std::string("cannot write ") + name);
    out << "time,truth_n,truth_e,truth_d,truth_qw,truth_qx,truth_qy,truth_qz"
           ",est_n,est_e,est_d,est_qw,est_qx,est_qy,est_qz"
           ",lo_n,hi_n,lo_e,hi_e,lo_d,hi_d,comms\n";
    for (const auto& tick : result.runs[r].ticks) {
      out << fmt(tick.t);
      const double truth[7] = {tick.truth_pos[0], tick.truth_pos[1],
                               tick.truth_pos[2], tick.truth_att.w,
                               tick.truth_att.x, tick.truth_att.y,
                               tick.truth_att.z};
      const double est[7] = {tick.est_pos[0], tick.est_pos[1], tick.est_pos[2],
                             tick.est_att.w, tick.est_att.x, tick.est_att.y,
                             tick.est_att.z};
      for (double v : truth) out << "," << fmt(v);
      for (double v : est) out << "," << fmt(v);
      for (int axis = 0; axis < 3; ++axis) {
        out << "," << fmt(tick.est_pos[axis] - 2.0 * tick.sigma_pos[axis])
            << "," << fmt(tick.est_pos[axis] + 2.0 * tick.sigma_pos[axis]);
      }
      out << "," << (tick.comms_active ? 1 : 0) << "\n";
    }
    if (!out) throw std::runtime_error(std::string("write failure on ") + name);
  }

  nlohmann::json manifest = nlohmann::json::parse(config_to_json(cfg));
  manifest["diverged_runs"] = result.summary.diverged_runs;
  nlohmann::json seeds = nlohmann::json::array();
  for (int r = 0; r < cfg.runs; ++r) {
    seeds.push_back(derive_seed(cfg.master_seed, r, kStreamDisturbance));
  }
  manifest["run_disturbance_seeds"] = seeds;
  std::ofstream mout(fs::path(out_dir) / "manifest.json",
                     std::ios::binary | std::ios::trunc);
  if (!mout) throw std::runtime_error("cannot write manifest.json");
  mout << manifest.dump(2) << "\n";
}

}  // namespace multilift
