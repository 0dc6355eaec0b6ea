#include "multilift/dynamics.hpp"

#include <cmath>

namespace multilift {

Vec13 payload_derivative(const PayloadState& x, const ControlInput& u,
                         const Vec3& f_dist, double mass) {
  Vec13 dx;
  dx.segment<3>(kPosIdx) = x.velocity;
  dx.segment<4>(kQuatIdx) = 0.5 * omega_matrix(x.rates) * x.attitude.coeffs();
  dx.segment<3>(kVelIdx) = u.linear + f_dist / mass;
  dx.segment<3>(kRateIdx) = u.angular;
  return dx;
}

PayloadState step_truth(const PayloadState& x, const ControlInput& u,
                        const Vec3& f_dist, double dt, double mass) {
  const Vec13 x0 = x.to_vector();
  const auto f = [&](const Vec13& v) {
    return payload_derivative(PayloadState::from_vector(v), u, f_dist, mass);
  };
  const Vec13 k1 = f(x0);
  const Vec13 k2 = f(x0 + 0.5 * dt * k1);
  const Vec13 k3 = f(x0 + 0.5 * dt * k2);
  const Vec13 k4 = f(x0 + dt * k3);
  PayloadState out =
      PayloadState::from_vector(x0 + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
  out.attitude = quat_normalize(out.attitude);
  return out;
}

Vec3 sample_disturbance(RandomStream& rng, const DisturbanceModel& model) {
  if (model.sigma_force <= 0.0) return Vec3::Zero();
  const double magnitude = rng.gaussian(0.0, model.sigma_force);
  const double theta = rng.uniform(0.0, 2.0 * M_PI);
  return {magnitude * std::cos(theta), magnitude * std::sin(theta), 0.0};
}

}  // namespace multilift
