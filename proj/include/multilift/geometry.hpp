#pragma once

#include "multilift/types.hpp"

namespace multilift {

// Scalar-first unit quaternion. The component order matches the state
// vector layout [qw qx qy qz].
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
  Vec3 vec() const { return {x, y, z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

struct EulerAngles {
  double roll = 0.0;   // phi  [rad]
  double pitch = 0.0;  // theta, must stay inside (-pi/2, pi/2)
  double yaw = 0.0;    // psi  [rad]
};

Quat quat_multiply(const Quat& a, const Quat& b);
Quat quat_conjugate(const Quat& q);
// Throws DivergenceError on a numerically zero quaternion.
Quat quat_normalize(const Quat& q);
Mat3 quat_to_dcm(const Quat& q);
Quat quat_from_dcm(const Mat3& R);
// Flips q into the hemisphere of q_ref; the represented rotation is unchanged.
Quat quat_align_sign(const Quat& q, const Quat& q_ref);
Vec3 quat_rotate(const Quat& q, const Vec3& v);

// Body -> inertial rotation for a 3-2-1 Euler sequence, i.e. the matrix
// R_ND satisfying r_N = R_ND r_D.
Mat3 dcm_body_to_inertial(const EulerAngles& e);
Quat quat_from_euler(const EulerAngles& e);
EulerAngles euler_from_quat(const Quat& q);
EulerAngles euler_from_dcm(const Mat3& R);

// Camera -> quadrotor body rotation for a camera tilted by alpha with
// axes (right, down, out-of-lens).
Mat3 rotation_camera_to_body(double alpha);

// 4x3 Jacobian of the Euler-to-quaternion map evaluated at e.
Eigen::Matrix<double, 4, 3> quat_euler_jacobian(const EulerAngles& e);

// Variance assigned to the (unobservable) quaternion-norm direction when
// lifting an Euler covariance. Kept well above machine precision: the
// information filter accumulates ~1/eps along this direction each update,
// so a tiny eps would push the information matrix conditioning past what
// double-precision recovery of x = Y^-1 y can support.
inline constexpr double kQuatCovEps = 1e-4;

// Maps a 3x3 Euler-angle covariance into a full-rank 4x4 quaternion
// covariance: G Sigma G^T + eps*I, with G evaluated at q_ref.
// Throws ConfigError if sigma_euler is not symmetric PSD.
Mat4 euler_cov_to_quat_cov(const Quat& q_ref, const Mat3& sigma_euler,
                           double eps = kQuatCovEps);

}  // namespace multilift
