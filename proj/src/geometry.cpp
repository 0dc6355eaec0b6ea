#include "multilift/geometry.hpp"

#include <cmath>

namespace multilift {

Quat quat_multiply(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quat quat_conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

Quat quat_normalize(const Quat& q) {
  const double n = q.norm();
  if (!(n > 1e-30) || !std::isfinite(n)) {
    throw DivergenceError("quaternion norm degenerate");
  }
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Mat3 quat_to_dcm(const Quat& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 R;
  R << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return R;
}

Quat quat_from_dcm(const Mat3& R) {
  // Shepperd's method: pick the largest of the four pivots.
  const double tr = R.trace();
  Quat q;
  if (tr > R(0, 0) && tr > R(1, 1) && tr > R(2, 2)) {
    const double s = std::sqrt(1.0 + tr) * 2.0;
    q = {0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s,
         (R(1, 0) - R(0, 1)) / s};
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    q = {(R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s,
         (R(0, 2) + R(2, 0)) / s};
  } else if (R(1, 1) > R(2, 2)) {
    const double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
    q = {(R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s,
         (R(1, 2) + R(2, 1)) / s};
  } else {
    const double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
    q = {(R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s,
         (R(1, 2) + R(2, 1)) / s, 0.25 * s};
  }
  return quat_normalize(q);
}

Quat quat_align_sign(const Quat& q, const Quat& q_ref) {
  const double dot =
      q.w * q_ref.w + q.x * q_ref.x + q.y * q_ref.y + q.z * q_ref.z;
  if (dot < 0.0) return {-q.w, -q.x, -q.y, -q.z};
  return q;
}

Vec3 quat_rotate(const Quat& q, const Vec3& v) { return quat_to_dcm(q) * v; }

Mat3 dcm_body_to_inertial(const EulerAngles& e) {
  const double cphi = std::cos(e.roll), sphi = std::sin(e.roll);
  const double cth = std::cos(e.pitch), sth = std::sin(e.pitch);
  const double cpsi = std::cos(e.yaw), spsi = std::sin(e.yaw);
  // Transpose of the 3-2-1 inertial->body DCM.
  Mat3 R;
  R << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
      cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
      -sth, sphi * cth, cphi * cth;
  return R;
}

Quat quat_from_euler(const EulerAngles& e) {
  const Quat qx{std::cos(e.roll / 2), std::sin(e.roll / 2), 0, 0};
  const Quat qy{std::cos(e.pitch / 2), 0, std::sin(e.pitch / 2), 0};
  const Quat qz{std::cos(e.yaw / 2), 0, 0, std::sin(e.yaw / 2)};
  return quat_multiply(qz, quat_multiply(qy, qx));
}

EulerAngles euler_from_dcm(const Mat3& R) {
  EulerAngles e;
  e.pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  e.roll = std::atan2(R(2, 1), R(2, 2));
  e.yaw = std::atan2(R(1, 0), R(0, 0));
  return e;
}

EulerAngles euler_from_quat(const Quat& q) { return euler_from_dcm(quat_to_dcm(q)); }

Mat3 rotation_camera_to_body(double alpha) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  Mat3 R;
  R << 0, -ca, sa,
      1, 0, 0,
      0, sa, ca;
  return R;
}

Eigen::Matrix<double, 4, 3> quat_euler_jacobian(const EulerAngles& e) {
  const Quat qx{std::cos(e.roll / 2), std::sin(e.roll / 2), 0, 0};
  const Quat qy{std::cos(e.pitch / 2), 0, std::sin(e.pitch / 2), 0};
  const Quat qz{std::cos(e.yaw / 2), 0, 0, std::sin(e.yaw / 2)};
  const Quat dqx{-0.5 * std::sin(e.roll / 2), 0.5 * std::cos(e.roll / 2), 0, 0};
  const Quat dqy{-0.5 * std::sin(e.pitch / 2), 0, 0.5 * std::cos(e.pitch / 2), 0};
  const Quat dqz{-0.5 * std::sin(e.yaw / 2), 0, 0, 0.5 * std::cos(e.yaw / 2)};

  const Quat dphi = quat_multiply(qz, quat_multiply(qy, dqx));
  const Quat dtheta = quat_multiply(qz, quat_multiply(dqy, qx));
  const Quat dpsi = quat_multiply(dqz, quat_multiply(qy, qx));

  Eigen::Matrix<double, 4, 3> G;
  G.col(0) = dphi.coeffs();
  G.col(1) = dtheta.coeffs();
  G.col(2) = dpsi.coeffs();
  return G;
}

Mat4 euler_cov_to_quat_cov(const Quat& q_ref, const Mat3& sigma_euler,
                           double eps) {
  if ((sigma_euler - sigma_euler.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("euler covariance not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(sigma_euler);
  if (es.eigenvalues().minCoeff() < -1e-12) {
    throw ConfigError("euler covariance not positive semidefinite");
  }
  const auto G = quat_euler_jacobian(euler_from_quat(quat_normalize(q_ref)));
  Mat4 out = G * sigma_euler * G.transpose() + eps * Mat4::Identity();
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

}  // namespace multilift
