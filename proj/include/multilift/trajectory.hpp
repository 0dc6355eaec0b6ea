#pragma once

#include "multilift/state.hpp"

namespace multilift {

enum class TrajectoryKind { kPirouette, kLissajous, kHover };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::kPirouette;
  double radius = 2.5;            // [m] pirouette radius
  double tangential_speed = 0.5;  // [m/s]
  double f_n = 0.04;              // [Hz] lissajous north frequency
  double f_e = 0.02;              // [Hz] lissajous east frequency
  double amp_n = 4.0;             // [m]
  double amp_e = 4.0;             // [m]
  double amp_d = 0.5;             // [m] vertical oscillation amplitude
  double ramp_duration = 10.0;    // [s]
  Vec3 center{0.0, 0.0, -3.0};    // [m] NED
};

struct ReferenceState {
  Vec3 position = Vec3::Zero();
  Quat attitude = Quat::identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 rates = Vec3::Zero();          // body P,Q,R [rad/s]
  Vec3 linear_accel = Vec3::Zero();   // feed-forward [m/s^2]
  Vec3 angular_accel = Vec3::Zero();  // feed-forward [rad/s^2]

  ControlInput feed_forward() const { return {linear_accel, angular_accel}; }
};

// Quintic ramp 6u^5 - 15u^4 + 10u^3 on u = clamp(t/T, 0, 1).
double smootherstep(double t, double T);
double smootherstep_deriv(double t, double T);
// Integral of smootherstep from 0 to t (the ramped phase).
double smootherstep_integral(double t, double T);

ReferenceState pirouette_reference(double t, const TrajectoryConfig& cfg);
ReferenceState lissajous_reference(double t, const TrajectoryConfig& cfg);
ReferenceState hover_reference(double t, const TrajectoryConfig& cfg);

ReferenceState trajectory_reference(double t, const TrajectoryConfig& cfg);

}  // namespace multilift
