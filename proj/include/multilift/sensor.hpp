#pragma once

#include "multilift/rng.hpp"
#include "multilift/state.hpp"

namespace multilift {

struct CameraConfig {
  double tilt = 1.1;               // alpha [rad], Eq.-3 camera tilt
  Vec3 mount_offset{0.0, 0.0, 0.05};  // c_D, camera position in body frame [m]
  double fov = 1.5;                // horizontal field of view [rad]
  double max_range = 10.0;         // [m]
  // Tag-to-CG displacement s_p in the payload frame. The default puts the
  // tag centered on the top face of the 0.25 m cube (CG 0.125 m below it).
  Vec3 tag_offset{0.0, 0.0, 0.125};
  double dropout_prob = 0.0;       // extra probabilistic miss rate
};

struct QuadPose {
  Vec3 position = Vec3::Zero();      // r_N [m]
  Quat attitude = Quat::identity();  // body -> inertial
};

struct MeasurementNoise {
  Vec3 pos_var{0.12, 0.12, 0.12};          // [m^2], inertial frame
  Vec3 euler_var{0.0027, 0.0027, 0.0027};  // [rad^2]
};

struct Measurement {
  Vec3 z_p = Vec3::Zero();           // payload CG position, inertial [m]
  Quat z_q = Quat::identity();       // payload attitude, inertial
  int agent_id = -1;
  double timestamp = 0.0;
  bool valid = false;
};

struct TagObservation {
  Vec3 d_c = Vec3::Zero();              // tag position in camera frame [m]
  Quat attitude_c = Quat::identity();   // tag attitude in camera frame
};

// Ground-truth tag pose in the camera frame (inverse of the Eq.-4 chain).
TagObservation true_tag_in_camera(const QuadPose& quad,
                                  const PayloadState& payload,
                                  const CameraConfig& cam);

// Tag in front of the lens, inside the FoV cone (strict), within range.
bool visible(const Vec3& d_c, const CameraConfig& cam);

// Forward Eq.-4 composition plus the s_p offset, with measurement noise
// injected in the inertial measurement space. Throws std::logic_error if
// called on a non-visible observation.
Measurement compose_measurement(const TagObservation& obs, const QuadPose& quad,
                                const CameraConfig& cam, RandomStream& rng,
                                const MeasurementNoise& noise, int agent_id,
                                double timestamp);

// Kinematic formation: quads hang off the four top corners at a fixed
// splay angle and track the payload's position and yaw exactly.
struct FormationConfig {
  double cable_length = 2.0;  // [m]
  double splay_angle = 1.06;  // [rad] cable angle from vertical
  double half_size = 0.125;   // [m] payload half edge length
};

QuadPose formation_quad_pose(int agent_id, const PayloadState& payload,
                             const FormationConfig& formation);

// Full per-agent sensing pipeline: formation pose, visibility gate,
// optional dropout, noisy composition. Returns an invalid Measurement
// when the tag is not detected.
Measurement sense_payload(int agent_id, const PayloadState& payload,
                          const FormationConfig& formation,
                          const CameraConfig& cam, RandomStream& rng,
                          const MeasurementNoise& noise, double timestamp);

}  // namespace multilift
