#include "multilift/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace multilift {

namespace {

Mat13 symmetrized(const Mat13& M) { return 0.5 * (M + M.transpose()); }

Quat quat_from_segment(const Vec13& v) {
  return {v[kQuatIdx], v[kQuatIdx + 1], v[kQuatIdx + 2], v[kQuatIdx + 3]};
}

Vec7 measurement_vector(const Measurement& z, const Quat& q_ref) {
  const Quat zq = quat_align_sign(z.z_q, q_ref);
  Vec7 out;
  out.head<3>() = z.z_p;
  out.tail<4>() = zq.coeffs();
  return out;
}

Vec7 measurement_prediction(const PayloadState& x) {
  Vec7 h;
  h.head<3>() = x.position;
  h.tail<4>() = x.attitude.coeffs();
  return h;
}

}  // namespace

Mat13 inverse_spd(const Mat13& M) {
  Eigen::SelfAdjointEigenSolver<Mat13> es(symmetrized(M));
  const auto& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    throw DivergenceError("matrix not positive definite");
  }
  if (ev.maxCoeff() / ev.minCoeff() > kMaxCondition) {
    throw DivergenceError("matrix condition number exceeds limit");
  }
  const Mat13 inv = es.eigenvectors() *
                    ev.cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose();
  return symmetrized(inv);
}

InformationPair to_information(const PayloadState& x, const Mat13& P) {
  InformationPair p;
  p.Y = inverse_spd(P);
  p.y = p.Y * x.to_vector();
  return p;
}

void from_information(const InformationPair& p, PayloadState* x, Mat13* P) {
  const Mat13 cov = inverse_spd(p.Y);
  PayloadState s = PayloadState::from_vector(cov * p.y);
  s.attitude = quat_normalize(s.attitude);
  *x = s;
  if (P != nullptr) *P = cov;
}

PayloadState state_transition(const PayloadState& x, const ControlInput& u,
                              double dt, bool renormalize) {
  PayloadState out;
  out.position = x.position + dt * x.velocity;
  const Eigen::Vector4d q =
      x.attitude.coeffs() + dt * 0.5 * omega_matrix(x.rates) * x.attitude.coeffs();
  out.attitude = Quat{q[0], q[1], q[2], q[3]};
  if (renormalize) out.attitude = quat_normalize(out.attitude);
  out.velocity = x.velocity + dt * u.linear;
  out.rates = x.rates + dt * u.angular;
  return out;
}

Mat13 process_jacobian(const PayloadState& x, const ControlInput& /*u*/,
                       double dt) {
  Mat13 F = Mat13::Identity();
  F.block<3, 3>(kPosIdx, kVelIdx) = dt * Mat3::Identity();
  F.block<4, 4>(kQuatIdx, kQuatIdx) += (dt / 2.0) * omega_matrix(x.rates);
  F.block<4, 3>(kQuatIdx, kRateIdx) = (dt / 2.0) * xi_matrix(x.attitude);
  return F;
}

Mat13 lift_process_noise(const Quat& q, const Vec6& q_accel, double dt) {
  Eigen::Matrix<double, 13, 6> G = Eigen::Matrix<double, 13, 6>::Zero();
  G.block<3, 3>(kPosIdx, 0) = (dt * dt / 2.0) * Mat3::Identity();
  G.block<3, 3>(kVelIdx, 0) = dt * Mat3::Identity();
  G.block<3, 3>(kRateIdx, 3) = dt * Mat3::Identity();
  G.block<4, 3>(kQuatIdx, 3) = (dt * dt / 4.0) * xi_matrix(q);
  Mat13 Q = G * q_accel.asDiagonal() * G.transpose();
  Q += kProcessNoiseEps * Mat13::Identity();
  return symmetrized(Q);
}

Mat7 effective_measurement_cov(const Quat& q_ref, const MeasurementNoise& noise) {
  Mat7 R = Mat7::Zero();
  R.block<3, 3>(0, 0) = noise.pos_var.asDiagonal();
  R.block<4, 4>(3, 3) =
      euler_cov_to_quat_cov(q_ref, noise.euler_var.asDiagonal());
  return R;
}

InformationPair predict(const InformationPair& p, const ControlInput& u,
                        const NoiseConfig& noise, double dt) {
  PayloadState x;
  Mat13 P;
  from_information(p, &x, &P);

  const Mat13 F = process_jacobian(x, u, dt);
  const PayloadState x_pred = state_transition(x, u, dt);
  const Mat13 P_pred = symmetrized(
      F * P * F.transpose() + lift_process_noise(x.attitude, noise.q_accel, dt));

  InformationPair out;
  out.Y = inverse_spd(P_pred);
  out.y = out.Y * x_pred.to_vector();
  return out;
}

Contribution local_contribution(const PayloadState& x_pred, const Measurement& z,
                                const NoiseConfig& noise) {
  const Mat7 R = effective_measurement_cov(x_pred.attitude, noise.meas);
  Mat7 R_inv = R.inverse();
  R_inv = 0.5 * (R_inv + R_inv.transpose()).eval();

  const Vec7 zv = measurement_vector(z, x_pred.attitude);
  const Vec7 h = measurement_prediction(x_pred);
  const Vec7 nu = zv - h;

  // h selects the first seven states, so H^T R^-1 H embeds R^-1 in the
  // top-left block.
  Contribution c;
  c.agent_id = static_cast<std::uint32_t>(z.agent_id);
  c.I.block<7, 7>(0, 0) = R_inv;
  c.i.head<7>() = R_inv * (nu + h);
  return c;
}

InformationPair fuse(const InformationPair& p_pred,
                     const std::vector<Contribution>& contributions,
                     int* rejected) {
  InformationPair out = p_pred;
  int skipped = 0;
  // Summation order is canonicalized so fusion is bit-identical under any
  // permutation of the incoming contributions.
  std::vector<const Contribution*> ordered;
  ordered.reserve(contributions.size());
  for (const auto& c : contributions) ordered.push_back(&c);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Contribution* a, const Contribution* b) {
                     return a->agent_id != b->agent_id
                                ? a->agent_id < b->agent_id
                                : a->step < b->step;
                   });
  for (const Contribution* cp : ordered) {
    const Contribution& c = *cp;
    if (!c.i.allFinite() || !c.I.allFinite()) {
      ++skipped;
      continue;
    }
    out.y += c.i;
    out.Y += c.I;
  }
  out.Y = symmetrized(out.Y);
  if (rejected != nullptr) *rejected = skipped;
  return out;
}

InformationPair initial_pair(const Measurement& z, const NoiseConfig& noise) {
  PayloadState x0;
  x0.position = z.z_p;
  x0.attitude = quat_normalize(z.z_q);

  Mat13 P0 = Mat13::Zero();
  P0.block<3, 3>(kPosIdx, kPosIdx) = noise.meas.pos_var.asDiagonal();
  P0.block<4, 4>(kQuatIdx, kQuatIdx) =
      euler_cov_to_quat_cov(x0.attitude, noise.meas.euler_var.asDiagonal());
  P0.block<3, 3>(kVelIdx, kVelIdx) = noise.p0_vel * Mat3::Identity();
  P0.block<3, 3>(kRateIdx, kRateIdx) = noise.p0_rate * Mat3::Identity();
  return to_information(x0, P0);
}

void ekf_oracle_step(PayloadState* x, Mat13* P, const ControlInput& u,
                     const std::vector<Measurement>& z_list,
                     const NoiseConfig& noise, double dt) {
  const Mat13 F = process_jacobian(*x, u, dt);
  const Mat13 Q = lift_process_noise(x->attitude, noise.q_accel, dt);
  PayloadState x_pred = state_transition(*x, u, dt);
  Mat13 P_pred = 0.5 * ((F * *P * F.transpose() + Q) +
                        (F * *P * F.transpose() + Q).transpose());

  std::vector<const Measurement*> valid;
  for (const auto& z : z_list) {
    if (z.valid) valid.push_back(&z);
  }
  if (valid.empty()) {
    *x = x_pred;
    *P = P_pred;
    return;
  }

  const int m = static_cast<int>(valid.size()) * 7;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, kStateDim);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd nu(m);
  const Vec7 h = measurement_prediction(x_pred);
  for (int j = 0; j < static_cast<int>(valid.size()); ++j) {
    H.block<7, 7>(7 * j, 0).setIdentity();
    R.block<7, 7>(7 * j, 7 * j) =
        effective_measurement_cov(x_pred.attitude, noise.meas);
    nu.segment<7>(7 * j) = measurement_vector(*valid[j], x_pred.attitude) - h;
  }

  const Eigen::MatrixXd S = H * P_pred * H.transpose() + R;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw DivergenceError("singular innovation covariance");
  }
  const Eigen::MatrixXd K = ldlt.solve(H * P_pred).transpose();

  PayloadState x_upd = PayloadState::from_vector(x_pred.to_vector() + K * nu);
  x_upd.attitude = quat_normalize(x_upd.attitude);
  const Mat13 IKH = Mat13::Identity() - K * H;
  Mat13 P_upd = IKH * P_pred * IKH.transpose() + K * R * K.transpose();

  *x = x_upd;
  *P = 0.5 * (P_upd + P_upd.transpose()).eval();
}

}  // namespace multilift
