#pragma once

#include "multilift/geometry.hpp"
#include "multilift/types.hpp"

namespace multilift {

// The 13-element estimator state: position, attitude quaternion,
// inertial velocity, body angular rates.
struct PayloadState {
  Vec3 position = Vec3::Zero();       // n, e, d [m]
  Quat attitude = Quat::identity();   // qw qx qy qz
  Vec3 velocity = Vec3::Zero();       // vn, ve, vd [m/s]
  Vec3 rates = Vec3::Zero();          // P, Q, R [rad/s]

  Vec13 to_vector() const {
    Vec13 v;
    v.segment<3>(kPosIdx) = position;
    v.segment<4>(kQuatIdx) = attitude.coeffs();
    v.segment<3>(kVelIdx) = velocity;
    v.segment<3>(kRateIdx) = rates;
    return v;
  }

  static PayloadState from_vector(const Vec13& v) {
    PayloadState s;
    s.position = v.segment<3>(kPosIdx);
    s.attitude = Quat{v[kQuatIdx], v[kQuatIdx + 1], v[kQuatIdx + 2], v[kQuatIdx + 3]};
    s.velocity = v.segment<3>(kVelIdx);
    s.rates = v.segment<3>(kRateIdx);
    return s;
  }
};

// Linear and angular acceleration commands.
struct ControlInput {
  Vec3 linear = Vec3::Zero();   // vdot_n, vdot_e, vdot_d [m/s^2]
  Vec3 angular = Vec3::Zero();  // Pdot, Qdot, Rdot [rad/s^2]

  Vec6 to_vector() const {
    Vec6 v;
    v.head<3>() = linear;
    v.tail<3>() = angular;
    return v;
  }
};

// 4x4 quaternion-rate matrix Omega(P,Q,R) such that qdot = 0.5*Omega*q.
inline Mat4 omega_matrix(const Vec3& w) {
  const double P = w[0], Q = w[1], R = w[2];
  Mat4 O;
  O << 0, -P, -Q, -R,
      P, 0, R, -Q,
      Q, -R, 0, P,
      R, Q, -P, 0;
  return O;
}

// 4x3 matrix Xi(q) such that qdot = 0.5*Xi(q)*[P Q R]^T.
inline Eigen::Matrix<double, 4, 3> xi_matrix(const Quat& q) {
  Eigen::Matrix<double, 4, 3> X;
  X << -q.x, -q.y, -q.z,
      q.w, -q.z, q.y,
      q.z, q.w, -q.x,
      -q.y, q.x, q.w;
  return X;
}

}  // namespace multilift
