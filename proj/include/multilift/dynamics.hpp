#pragma once

#include "multilift/rng.hpp"
#include "multilift/state.hpp"

namespace multilift {

struct DisturbanceModel {
  double sigma_force = 0.227;   // [N] std of the planar disturbance force
  double payload_mass = 1.2;    // [kg]
  double hold_interval = 0.05;  // [s] disturbance held constant this long
};

// Process model xdot = f(x, u) with an extra inertial disturbance force
// acting on the linear acceleration (truth only; the estimator sees u).
Vec13 payload_derivative(const PayloadState& x, const ControlInput& u,
                         const Vec3& f_dist, double mass);

// One classic RK4 step followed by quaternion renormalization.
PayloadState step_truth(const PayloadState& x, const ControlInput& u,
                        const Vec3& f_dist, double dt, double mass);

// Zero-mean Gaussian-magnitude force in a uniformly random North-East
// direction; the Down component is always zero.
Vec3 sample_disturbance(RandomStream& rng, const DisturbanceModel& model);

}  // namespace multilift
