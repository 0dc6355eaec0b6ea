#include "multilift/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace multilift {

using nlohmann::json;

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kPirouette: return "pirouette";
    case TrajectoryKind::kLissajous: return "lissajous";
    case TrajectoryKind::kHover: return "hover";
  }
  return "pirouette";
}

TrajectoryKind kind_from_name(const std::string& s) {
  if (s == "pirouette") return TrajectoryKind::kPirouette;
  if (s == "lissajous") return TrajectoryKind::kLissajous;
  if (s == "hover") return TrajectoryKind::kHover;
  throw ConfigError("unknown trajectory kind: " + s);
}

template <typename T>
void get_if(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

void get_vec3_if(const json& j, const char* key, Vec3* out) {
  if (j.contains(key)) *out = vec3_from_json(j.at(key));
}

}  // namespace

void SimConfig::validate() const {
  if (num_agents < 1) throw ConfigError("num_agents must be >= 1");
  if (estimator_dt <= 0.0) throw ConfigError("estimator_dt must be > 0");
  if (physics_substeps < 1) throw ConfigError("physics_substeps must be >= 1");
  if (duration <= trajectory.ramp_duration) {
    throw ConfigError("duration must exceed the trajectory ramp");
  }
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (driver_agent < 0 || driver_agent >= num_agents) {
    throw ConfigError("driver_agent out of range");
  }
  if (trajectory.ramp_duration <= 0.0) throw ConfigError("ramp_duration must be > 0");
  if (trajectory.kind == TrajectoryKind::kPirouette && trajectory.radius <= 0.0) {
    throw ConfigError("pirouette radius must be > 0");
  }
  if (trajectory.kind == TrajectoryKind::kLissajous &&
      (trajectory.f_n <= 0.0 || trajectory.f_e <= 0.0)) {
    throw ConfigError("lissajous frequencies must be > 0");
  }
  if (camera.fov <= 0.0 || camera.fov >= M_PI) throw ConfigError("fov out of range");
  if (camera.max_range <= 0.0) throw ConfigError("max_range must be > 0");
  if (disturbance.sigma_force < 0.0) throw ConfigError("sigma_force must be >= 0");
  if (disturbance.payload_mass <= 0.0) throw ConfigError("payload_mass must be > 0");
  for (const auto& w : loss.windows) {
    if (!(w.start < w.end)) throw ConfigError("loss window start must be < end");
  }
}

std::string config_to_json(const SimConfig& cfg) {
  json j;
  j["trajectory"] = {
      {"kind", kind_name(cfg.trajectory.kind)},
      {"radius", cfg.trajectory.radius},
      {"tangential_speed", cfg.trajectory.tangential_speed},
      {"f_n", cfg.trajectory.f_n},
      {"f_e", cfg.trajectory.f_e},
      {"amp_n", cfg.trajectory.amp_n},
      {"amp_e", cfg.trajectory.amp_e},
      {"amp_d", cfg.trajectory.amp_d},
      {"ramp_duration", cfg.trajectory.ramp_duration},
      {"center", vec3_to_json(cfg.trajectory.center)},
  };
  j["camera"] = {
      {"tilt", cfg.camera.tilt},
      {"mount_offset", vec3_to_json(cfg.camera.mount_offset)},
      {"fov", cfg.camera.fov},
      {"max_range", cfg.camera.max_range},
      {"tag_offset", vec3_to_json(cfg.camera.tag_offset)},
      {"dropout_prob", cfg.camera.dropout_prob},
  };
  j["formation"] = {
      {"cable_length", cfg.formation.cable_length},
      {"splay_angle", cfg.formation.splay_angle},
      {"half_size", cfg.formation.half_size},
  };
  j["noise"] = {
      {"q_accel", std::vector<double>(cfg.noise.q_accel.data(),
                                      cfg.noise.q_accel.data() + 6)},
      {"pos_var", vec3_to_json(cfg.noise.meas.pos_var)},
      {"euler_var", vec3_to_json(cfg.noise.meas.euler_var)},
      {"p0_vel", cfg.noise.p0_vel},
      {"p0_rate", cfg.noise.p0_rate},
  };
  j["disturbance"] = {
      {"sigma_force", cfg.disturbance.sigma_force},
      {"payload_mass", cfg.disturbance.payload_mass},
      {"hold_interval", cfg.disturbance.hold_interval},
  };
  j["loss_windows"] = json::array();
  for (const auto& w : cfg.loss.windows) {
    json links = json::array();
    for (const auto& [a, b] : w.links) links.push_back(json::array({a, b}));
    j["loss_windows"].push_back(
        {{"start", w.start},
         {"end", w.end},
         {"mode", w.mode == LossMode::kTotalBlackout ? "blackout" : "per-link"},
         {"links", links}});
  }
  j["gains"] = {
      {"kp_pos", cfg.gains.kp_pos},           {"kd_pos", cfg.gains.kd_pos},
      {"kp_att", cfg.gains.kp_att},           {"kd_att", cfg.gains.kd_att},
      {"max_linear_accel", cfg.gains.max_linear_accel},
      {"max_angular_accel", cfg.gains.max_angular_accel},
  };
  j["mode"] = cfg.mode == SimMode::kIsolatedEstimator ? "isolated" : "in-loop";
  j["init_mode"] = cfg.init_mode == InitMode::kOwnMeasurement ? "own" : "shared";
  j["num_agents"] = cfg.num_agents;
  j["estimator_dt"] = cfg.estimator_dt;
  j["physics_substeps"] = cfg.physics_substeps;
  j["strict_250hz"] = cfg.strict_250hz;
  j["duration"] = cfg.duration;
  j["master_seed"] = cfg.master_seed;
  j["runs"] = cfg.runs;
  j["driver_agent"] = cfg.driver_agent;
  j["bus_latency_ticks"] = cfg.bus_latency_ticks;
  return j.dump(2);
}

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  SimConfig cfg;
  try {
    if (j.contains("trajectory")) {
      const auto& t = j["trajectory"];
      if (t.contains("kind")) {
        cfg.trajectory.kind = kind_from_name(t["kind"].get<std::string>());
      }
      get_if(t, "radius", &cfg.trajectory.radius);
      get_if(t, "tangential_speed", &cfg.trajectory.tangential_speed);
      get_if(t, "f_n", &cfg.trajectory.f_n);
      get_if(t, "f_e", &cfg.trajectory.f_e);
      get_if(t, "amp_n", &cfg.trajectory.amp_n);
      get_if(t, "amp_e", &cfg.trajectory.amp_e);
      get_if(t, "amp_d", &cfg.trajectory.amp_d);
      get_if(t, "ramp_duration", &cfg.trajectory.ramp_duration);
      get_vec3_if(t, "center", &cfg.trajectory.center);
    }
    if (j.contains("camera")) {
      const auto& c = j["camera"];
      get_if(c, "tilt", &cfg.camera.tilt);
      get_vec3_if(c, "mount_offset", &cfg.camera.mount_offset);
      get_if(c, "fov", &cfg.camera.fov);
      get_if(c, "max_range", &cfg.camera.max_range);
      get_vec3_if(c, "tag_offset", &cfg.camera.tag_offset);
      get_if(c, "dropout_prob", &cfg.camera.dropout_prob);
    }
    if (j.contains("formation")) {
      const auto& f = j["formation"];
      get_if(f, "cable_length", &cfg.formation.cable_length);
      get_if(f, "splay_angle", &cfg.formation.splay_angle);
      get_if(f, "half_size", &cfg.formation.half_size);
    }
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      if (n.contains("q_accel")) {
        const auto q = n["q_accel"].get<std::vector<double>>();
        if (q.size() != 6) throw ConfigError("q_accel must have 6 entries");
        for (int i = 0; i < 6; ++i) cfg.noise.q_accel[i] = q[i];
      }
      get_vec3_if(n, "pos_var", &cfg.noise.meas.pos_var);
      get_vec3_if(n, "euler_var", &cfg.noise.meas.euler_var);
      get_if(n, "p0_vel", &cfg.noise.p0_vel);
      get_if(n, "p0_rate", &cfg.noise.p0_rate);
    }
    if (j.contains("disturbance")) {
      const auto& d = j["disturbance"];
      get_if(d, "sigma_force", &cfg.disturbance.sigma_force);
      get_if(d, "payload_mass", &cfg.disturbance.payload_mass);
      get_if(d, "hold_interval", &cfg.disturbance.hold_interval);
    }
    if (j.contains("loss_windows")) {
      for (const auto& w : j["loss_windows"]) {
        LossWindow win;
        win.start = w.at("start").get<double>();
        win.end = w.at("end").get<double>();
        if (w.contains("mode") && w["mode"].get<std::string>() == "per-link") {
          win.mode = LossMode::kPerLink;
        }
        if (w.contains("links")) {
          for (const auto& l : w["links"]) {
            win.links.emplace_back(l[0].get<int>(), l[1].get<int>());
          }
        }
        cfg.loss.windows.push_back(std::move(win));
      }
    }
    if (j.contains("gains")) {
      const auto& g = j["gains"];
      get_if(g, "kp_pos", &cfg.gains.kp_pos);
      get_if(g, "kd_pos", &cfg.gains.kd_pos);
      get_if(g, "kp_att", &cfg.gains.kp_att);
      get_if(g, "kd_att", &cfg.gains.kd_att);
      get_if(g, "max_linear_accel", &cfg.gains.max_linear_accel);
      get_if(g, "max_angular_accel", &cfg.gains.max_angular_accel);
    }
    if (j.contains("mode")) {
      const auto m = j["mode"].get<std::string>();
      if (m == "isolated") {
        cfg.mode = SimMode::kIsolatedEstimator;
      } else if (m == "in-loop") {
        cfg.mode = SimMode::kEstimatorInLoop;
      } else {
        throw ConfigError("unknown mode: " + m);
      }
    }
    if (j.contains("init_mode")) {
      const auto m = j["init_mode"].get<std::string>();
      if (m == "own") {
        cfg.init_mode = InitMode::kOwnMeasurement;
      } else if (m == "shared") {
        cfg.init_mode = InitMode::kShared;
      } else {
        throw ConfigError("unknown init_mode: " + m);
      }
    }
    get_if(j, "num_agents", &cfg.num_agents);
    get_if(j, "estimator_dt", &cfg.estimator_dt);
    get_if(j, "physics_substeps", &cfg.physics_substeps);
    get_if(j, "strict_250hz", &cfg.strict_250hz);
    get_if(j, "duration", &cfg.duration);
    get_if(j, "master_seed", &cfg.master_seed);
    get_if(j, "runs", &cfg.runs);
    get_if(j, "driver_agent", &cfg.driver_agent);
    get_if(j, "bus_latency_ticks", &cfg.bus_latency_ticks);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

SimConfig make_scenario(const std::string& name) {
  SimConfig cfg;
  const bool commloss = name.ends_with("-commloss");
  const std::string base =
      commloss ? name.substr(0, name.size() - 9) : name;
  if (base == "pirouette") {
    cfg.trajectory.kind = TrajectoryKind::kPirouette;
    cfg.trajectory.ramp_duration = 10.0;
    cfg.mode = SimMode::kIsolatedEstimator;
    cfg.duration = 60.0;
  } else if (base == "lissajous") {
    cfg.trajectory.kind = TrajectoryKind::kLissajous;
    cfg.trajectory.ramp_duration = 15.0;
    cfg.mode = SimMode::kEstimatorInLoop;
    cfg.duration = 65.0;
  } else {
    throw ConfigError("unknown scenario: " + name);
  }
  if (commloss) {
    cfg.loss.windows.push_back({20.0, 40.0, LossMode::kTotalBlackout, {}});
  }
  cfg.runs = 50;
  cfg.validate();
  return cfg;
}

}  // namespace multilift
