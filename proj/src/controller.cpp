#include "multilift/controller.hpp"

#include <cmath>

namespace multilift {

namespace {
// Norm-preserving saturation: scales the command down without changing
// its direction.
Vec3 saturate(const Vec3& v, double limit) {
  const double n = v.norm();
  return n > limit ? Vec3(v * (limit / n)) : v;
}
}  // namespace

ControlInput compute_input(const PayloadState& x_est, const ReferenceState& ref,
                           const ControllerGains& gains) {
  ControlInput u;
  u.linear = ref.linear_accel + gains.kp_pos * (ref.position - x_est.position) +
             gains.kd_pos * (ref.velocity - x_est.velocity);
  u.linear = saturate(u.linear, gains.max_linear_accel);

  // Attitude error as twice the vector part of the error quaternion,
  // expressed in the body frame.
  const Quat q_err = quat_align_sign(
      quat_multiply(quat_conjugate(x_est.attitude), ref.attitude),
      Quat::identity());
  u.angular = ref.angular_accel + gains.kp_att * 2.0 * q_err.vec() +
              gains.kd_att * (ref.rates - x_est.rates);
  u.angular = saturate(u.angular, gains.max_angular_accel);
  return u;
}

}  // namespace multilift
