#include "multilift/sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace multilift {

TagObservation true_tag_in_camera(const QuadPose& quad,
                                  const PayloadState& payload,
                                  const CameraConfig& cam) {
  const Mat3 R_nd = quat_to_dcm(quad.attitude);
  const Mat3 R_dc = rotation_camera_to_body(cam.tilt);
  const Mat3 R_payload = quat_to_dcm(payload.attitude);
  const Vec3 p_tag = payload.position - R_payload * cam.tag_offset;

  TagObservation obs;
  obs.d_c = R_dc.transpose() *
            (R_nd.transpose() * (p_tag - quad.position) - cam.mount_offset);
  obs.attitude_c = quat_from_dcm(R_dc.transpose() * R_nd.transpose() * R_payload);
  return obs;
}

bool visible(const Vec3& d_c, const CameraConfig& cam) {
  if (!(d_c.z() > 0.0)) return false;
  const double off_axis = std::atan2(std::hypot(d_c.x(), d_c.y()), d_c.z());
  if (!(off_axis < 0.5 * cam.fov)) return false;
  return d_c.norm() < cam.max_range;
}

Measurement compose_measurement(const TagObservation& obs, const QuadPose& quad,
                                const CameraConfig& cam, RandomStream& rng,
                                const MeasurementNoise& noise, int agent_id,
                                double timestamp) {
  if (!visible(obs.d_c, cam)) {
    throw std::logic_error("compose_measurement called on non-visible tag");
  }
  const Mat3 R_nd = quat_to_dcm(quad.attitude);
  const Mat3 R_dc = rotation_camera_to_body(cam.tilt);

  const Vec3 tag_pos = R_nd * (R_dc * obs.d_c + cam.mount_offset) + quad.position;
  const Mat3 R_payload = R_nd * R_dc * quat_to_dcm(obs.attitude_c);
  const Quat q_payload = quat_from_dcm(R_payload);

  Measurement z;
  z.agent_id = agent_id;
  z.timestamp = timestamp;
  z.valid = true;
  z.z_p = tag_pos + R_payload * cam.tag_offset;
  for (int i = 0; i < 3; ++i) {
    z.z_p[i] += rng.gaussian(0.0, std::sqrt(noise.pos_var[i]));
  }
  // Orientation noise: perturb the Euler angles of the measured attitude,
  // matching where the angular variances of R are specified.
  EulerAngles e = euler_from_quat(q_payload);
  e.roll += rng.gaussian(0.0, std::sqrt(noise.euler_var[0]));
  e.pitch += rng.gaussian(0.0, std::sqrt(noise.euler_var[1]));
  e.yaw += rng.gaussian(0.0, std::sqrt(noise.euler_var[2]));
  z.z_q = quat_align_sign(quat_from_euler(e), q_payload);
  return z;
}

QuadPose formation_quad_pose(int agent_id, const PayloadState& payload,
                             const FormationConfig& formation) {
  const double psi_p = euler_from_quat(payload.attitude).yaw;
  const double bearing = M_PI / 4 + agent_id * M_PI / 2;
  const Vec3 u{std::cos(bearing), std::sin(bearing), 0.0};
  const double radial =
      formation.half_size * std::sqrt(2.0) +
      formation.cable_length * std::sin(formation.splay_angle);
  const double height =
      formation.half_size + formation.cable_length * std::cos(formation.splay_angle);

  const Mat3 R_yaw = dcm_body_to_inertial({0.0, 0.0, psi_p});
  QuadPose quad;
  quad.position = payload.position + R_yaw * (radial * u - height * Vec3::UnitZ());
  // Body x axis points at the payload center, level attitude.
  quad.attitude = quat_from_euler({0.0, 0.0, psi_p + bearing + M_PI});
  return quad;
}

Measurement sense_payload(int agent_id, const PayloadState& payload,
                          const FormationConfig& formation,
                          const CameraConfig& cam, RandomStream& rng,
                          const MeasurementNoise& noise, double timestamp) {
  const QuadPose quad = formation_quad_pose(agent_id, payload, formation);
  const TagObservation obs = true_tag_in_camera(quad, payload, cam);
  Measurement miss;
  miss.agent_id = agent_id;
  miss.timestamp = timestamp;
  if (!visible(obs.d_c, cam)) return miss;
  if (cam.dropout_prob > 0.0 && rng.uniform(0.0, 1.0) < cam.dropout_prob) {
    return miss;
  }
  return compose_measurement(obs, quad, cam, rng, noise, agent_id, timestamp);
}

}  // namespace multilift
