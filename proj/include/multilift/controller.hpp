#pragma once

#include "multilift/trajectory.hpp"

namespace multilift {

// Load-leading surrogate: feed-forward plus PD on the payload pose.
struct ControllerGains {
  double kp_pos = 2.0;   // [1/s^2]
  double kd_pos = 2.8;   // [1/s]
  double kp_att = 4.0;
  double kd_att = 4.0;
  double max_linear_accel = 5.0;   // [m/s^2]
  double max_angular_accel = 5.0;  // [rad/s^2]
};

ControlInput compute_input(const PayloadState& x_est, const ReferenceState& ref,
                           const ControllerGains& gains);

}  // namespace multilift
