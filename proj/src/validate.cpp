#include "multilift/validate.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "multilift/dynamics.hpp"
#include "multilift/estimator.hpp"
#include "multilift/sensor.hpp"
#include "multilift/trajectory.hpp"

namespace multilift {

namespace {

bool report(std::ostream& out, const char* name, bool ok, double worst) {
  out << (ok ? "PASS" : "FAIL") << "  " << name << "  (worst " << worst
      << ")\n";
  return ok;
}

}  // namespace

bool run_validation(std::ostream& out) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  bool ok = true;

  {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const EulerAngles e{angle(rng), angle(rng), angle(rng)};
      const Mat3 R = dcm_body_to_inertial(e);
      worst = std::max(worst,
                       (R.transpose() * R - Mat3::Identity()).norm());
      worst = std::max(worst, std::abs(R.determinant() - 1.0));
    }
    ok &= report(out, "rotation orthonormality", worst < 1e-12, worst);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const EulerAngles e{angle(rng), angle(rng), angle(rng)};
      const Mat3 R = dcm_body_to_inertial(e);
      worst = std::max(worst, (quat_to_dcm(quat_from_dcm(R)) - R).norm());
    }
    ok &= report(out, "quaternion/DCM round trip", worst < 1e-10, worst);
  }
  {
    double worst = 0.0;
    PayloadState x;
    x.rates = Vec3{0.7, -0.4, 1.1};
    ControlInput u;
    u.angular = Vec3{0.2, 0.1, -0.3};
    for (int s = 0; s < 2000; ++s) {
      x = step_truth(x, u, Vec3::Zero(), 0.004, 1.2);
      worst = std::max(worst, std::abs(x.attitude.norm() - 1.0));
    }
    ok &= report(out, "quaternion norm preservation", worst < 1e-9, worst);
  }
  {
    double worst = std::abs(smootherstep(0.0, 10.0));
    worst = std::max(worst, std::abs(smootherstep(10.0, 10.0) - 1.0));
    worst = std::max(worst, std::abs(smootherstep_deriv(1e-9, 10.0)));
    worst = std::max(worst, std::abs(smootherstep_deriv(10.0 - 1e-9, 10.0)));
    ok &= report(out, "smootherstep endpoints", worst < 1e-12, worst);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      PayloadState x;
      x.position = Vec3{unit(rng), unit(rng), unit(rng)};
      x.attitude = quat_from_euler({angle(rng), angle(rng), angle(rng)});
      x.velocity = Vec3{unit(rng), unit(rng), unit(rng)};
      x.rates = Vec3{unit(rng), unit(rng), unit(rng)};
      ControlInput u{{unit(rng), unit(rng), unit(rng)},
                     {unit(rng), unit(rng), unit(rng)}};
      const double dt = 0.05;
      const Mat13 F = process_jacobian(x, u, dt);
      const Vec13 x0 = x.to_vector();
      for (int c = 0; c < kStateDim; ++c) {
        const double h = 1e-6;
        Vec13 plus = x0, minus = x0;
        plus[c] += h;
        minus[c] -= h;
        const Vec13 fd =
            (state_transition(PayloadState::from_vector(plus), u, dt, false)
                 .to_vector() -
             state_transition(PayloadState::from_vector(minus), u, dt, false)
                 .to_vector()) /
            (2 * h);
        worst = std::max(worst, (fd - F.col(c)).cwiseAbs().maxCoeff());
      }
    }
    ok &= report(out, "process Jacobian vs finite differences", worst < 1e-6,
                 worst);
  }
  {
    double worst = 0.0;
    RandomStream noise_rng(7);
    MeasurementNoise zero_noise;
    zero_noise.pos_var.setZero();
    zero_noise.euler_var.setZero();
    CameraConfig cam;
    FormationConfig formation;
    for (int i = 0; i < 1000; ++i) {
      PayloadState payload;
      payload.position = Vec3{5 * unit(rng), 5 * unit(rng), -3 + unit(rng)};
      payload.attitude = quat_from_euler({0.1 * unit(rng), 0.1 * unit(rng),
                                          3.0 * unit(rng)});
      const QuadPose quad = formation_quad_pose(i % 4, payload, formation);
      const TagObservation obs = true_tag_in_camera(quad, payload, cam);
      if (!visible(obs.d_c, cam)) continue;
      const Measurement z = compose_measurement(obs, quad, cam, noise_rng,
                                                zero_noise, 0, 0.0);
      worst = std::max(worst, (z.z_p - payload.position).norm());
      worst = std::max(
          worst, (quat_align_sign(z.z_q, payload.attitude).coeffs() -
                  payload.attitude.coeffs())
                     .norm());
    }
    ok &= report(out, "sensor round trip (noiseless)", worst < 1e-10, worst);
  }
  {
    double worst = 0.0;
    NoiseConfig noise;
    PayloadState x;
    x.attitude = quat_from_euler({0.05, -0.03, 0.8});
    InformationPair pair = to_information(x, Mat13::Identity());
    std::vector<Contribution> contributions;
    for (int j = 0; j < 4; ++j) {
      Measurement z;
      z.valid = true;
      z.agent_id = j;
      z.z_p = x.position + Vec3{0.1 * unit(rng), 0.1 * unit(rng), 0.1 * unit(rng)};
      z.z_q = quat_from_euler({0.05 * unit(rng), 0.05 * unit(rng), 0.8});
      contributions.push_back(local_contribution(x, z, noise));
    }
    const InformationPair fused = fuse(pair, contributions);
    std::vector<Contribution> permuted{contributions[2], contributions[0],
                                       contributions[3], contributions[1]};
    const InformationPair fused2 = fuse(pair, permuted);
    worst = (fused.y - fused2.y).cwiseAbs().maxCoeff();
    worst = std::max(worst, (fused.Y - fused2.Y).cwiseAbs().maxCoeff());
    ok &= report(out, "fusion order independence", worst < 1e-12, worst);
  }
  return ok;
}

}  // namespace multilift
