#pragma once

#include <vector>

#include "multilift/sensor.hpp"
#include "multilift/state.hpp"

namespace multilift {

// Inverse-covariance belief: Y = P^-1, y = P^-1 x.
struct InformationPair {
  Vec13 y = Vec13::Zero();
  Mat13 Y = Mat13::Identity();
};

// One agent's measurement information terms (the unit of communication).
struct Contribution {
  Vec13 i = Vec13::Zero();
  Mat13 I = Mat13::Zero();
  std::uint32_t agent_id = 0;
  std::uint64_t step = 0;
};

struct NoiseConfig {
  // Process noise variances on the six acceleration-driven channels
  // [vdot_n vdot_e vdot_d Pdot Qdot Rdot], lifted to 13x13 per step.
  Vec6 q_accel = (Vec6() << 0.0625, 0.0625, 0.0625, 7.84, 7.84, 7.84).finished();
  MeasurementNoise meas;
  // Initial velocity / angular-rate variances.
  double p0_vel = 0.5;
  double p0_rate = 0.5;
};

// Information matrices accumulate ~1/kQuatCovEps along the quaternion-norm
// direction, so the usable conditioning budget is wider than for a plain
// covariance filter.
inline constexpr double kMaxCondition = 1e14;
// Regularization added to the lifted process noise so the information
// matrix stays bounded in the quaternion-norm direction.
inline constexpr double kProcessNoiseEps = 1e-12;

// Symmetric positive definite inverse with a conditioning check.
Mat13 inverse_spd(const Mat13& M);

InformationPair to_information(const PayloadState& x, const Mat13& P);
// Quaternion block of the recovered state is renormalized.
void from_information(const InformationPair& p, PayloadState* x, Mat13* P);

// One Euler step of the process model (the filter's discrete transition).
// `renormalize` controls the quaternion renormalization applied at state
// extraction boundaries; the process Jacobian linearizes the raw step.
PayloadState state_transition(const PayloadState& x, const ControlInput& u,
                              double dt, bool renormalize = true);
Mat13 process_jacobian(const PayloadState& x, const ControlInput& u, double dt);

// Discrete lifted process noise G Q G^T (+ eps*I) shaped by one step of
// the acceleration channels.
Mat13 lift_process_noise(const Quat& q, const Vec6& q_accel, double dt);

// Effective 7x7 measurement covariance: position variances plus the
// Euler variances mapped into quaternion space at q_ref.
Mat7 effective_measurement_cov(const Quat& q_ref, const MeasurementNoise& noise);

InformationPair predict(const InformationPair& p, const ControlInput& u,
                        const NoiseConfig& noise, double dt);

Contribution local_contribution(const PayloadState& x_pred, const Measurement& z,
                                const NoiseConfig& noise);

// Summation fusion. Non-finite contributions are skipped; the skip count
// is reported through rejected when non-null.
InformationPair fuse(const InformationPair& p_pred,
                     const std::vector<Contribution>& contributions,
                     int* rejected = nullptr);

// Initial belief from a first fused measurement: measured pose, zero
// velocity and rates.
InformationPair initial_pair(const Measurement& z, const NoiseConfig& noise);

// Covariance-form EKF with identical f, h, Jacobians, Q and R, used as an
// algebraic oracle for the information form. Handles an arbitrary number
// of stacked measurements.
void ekf_oracle_step(PayloadState* x, Mat13* P, const ControlInput& u,
                     const std::vector<Measurement>& z_list,
                     const NoiseConfig& noise, double dt);

}  // namespace multilift
