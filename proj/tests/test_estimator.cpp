#include <doctest.h>

#include <cmath>
#include <random>

#include "multilift/estimator.hpp"

using namespace multilift;

namespace {

PayloadState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PayloadState x;
  x.position = Vec3{3 * u(rng), 3 * u(rng), -3 + u(rng)};
  x.attitude = quat_from_euler({0.3 * u(rng), 0.3 * u(rng), 3 * u(rng)});
  x.velocity = Vec3{u(rng), u(rng), u(rng)};
  x.rates = 0.5 * Vec3{u(rng), u(rng), u(rng)};
  return x;
}

Mat13 random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat13 A;
  for (int r = 0; r < 13; ++r)
    for (int c = 0; c < 13; ++c) A(r, c) = u(rng);
  return A * A.transpose() + 0.1 * Mat13::Identity();
}

Measurement measurement_of(const PayloadState& x, std::mt19937_64* rng = nullptr,
                           double jitter = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Measurement z;
  z.valid = true;
  z.z_p = x.position;
  z.z_q = x.attitude;
  if (rng != nullptr) {
    z.z_p += jitter * Vec3{u(*rng), u(*rng), u(*rng)};
    const EulerAngles e = euler_from_quat(x.attitude);
    z.z_q = quat_from_euler({e.roll + jitter * u(*rng),
                             e.pitch + jitter * u(*rng),
                             e.yaw + jitter * u(*rng)});
  }
  return z;
}

}  // namespace

TEST_CASE("to_information with identity covariance") {
  std::mt19937_64 rng(31);
  const PayloadState x = random_state(rng);
  const InformationPair p = to_information(x, Mat13::Identity());
  CHECK((p.Y - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.y - x.to_vector()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("to_information with scaled covariance") {
  std::mt19937_64 rng(32);
  const PayloadState x = random_state(rng);
  const InformationPair p = to_information(x, 4.0 * Mat13::Identity());
  CHECK((p.Y - 0.25 * Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.y - 0.25 * x.to_vector()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inverse product identity for random SPD covariances") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 50; ++i) {
    const Mat13 P = random_spd(rng);
    const PayloadState x = random_state(rng);
    const InformationPair p = to_information(x, P);
    CHECK((p.Y * P - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("information round trip recovers state and covariance") {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 50; ++i) {
    const Mat13 P = random_spd(rng);
    const PayloadState x = random_state(rng);
    const InformationPair p = to_information(x, P);
    PayloadState xr;
    Mat13 Pr;
    from_information(p, &xr, &Pr);
    CHECK((xr.to_vector() - x.to_vector()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((Pr - P).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("inverse_spd rejects indefinite matrices") {
  Mat13 M = Mat13::Identity();
  M(4, 4) = -1.0;
  CHECK_THROWS_AS(inverse_spd(M), DivergenceError);
}

TEST_CASE("process jacobian limit cases") {
  std::mt19937_64 rng(35);
  const PayloadState x = random_state(rng);
  ControlInput u;
  u.linear = Vec3{0.1, -0.2, 0.05};
  const Mat13 F = process_jacobian(x, u, 1e-9);
  CHECK((F - Mat13::Identity()).cwiseAbs().maxCoeff() < 1e-8);

  PayloadState still = x;
  still.rates.setZero();
  const Mat13 F2 = process_jacobian(still, u, 0.05);
  CHECK((F2.block<4, 4>(kQuatIdx, kQuatIdx) - Mat4::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("process jacobian matches finite differences") {
  std::mt19937_64 rng(36);
  const double h = 1e-6, dt = 0.05;
  for (int i = 0; i < 100; ++i) {
    const PayloadState x = random_state(rng);
    ControlInput u;
    u.linear = Vec3{0.1, 0.0, -0.1};
    u.angular = Vec3{0.0, 0.2, -0.1};
    const Mat13 F = process_jacobian(x, u, dt);
    const Vec13 x0 = x.to_vector();
    for (int c = 0; c < kStateDim; ++c) {
      Vec13 plus = x0, minus = x0;
      plus[c] += h;
      minus[c] -= h;
      const Vec13 fd =
          (state_transition(PayloadState::from_vector(plus), u, dt, false)
               .to_vector() -
           state_transition(PayloadState::from_vector(minus), u, dt, false)
               .to_vector()) /
          (2 * h);
      CHECK((fd - F.col(c)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("static noiseless prediction is a fixed point as dt -> 0") {
  // The transition Jacobian carries dt off-diagonal coupling (position to
  // velocity, quaternion to rates), so Y is exactly unchanged only in the
  // dt -> 0 limit; at a finite dt the covariance growth has a closed form.
  NoiseConfig noise;
  noise.q_accel.setZero();
  PayloadState x;  // at rest
  const InformationPair p = to_information(x, Mat13::Identity());

  const InformationPair q0 = predict(p, ControlInput{}, noise, 1e-10);
  PayloadState xr;
  Mat13 Pr;
  from_information(q0, &xr, &Pr);
  CHECK((xr.to_vector() - x.to_vector()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((q0.Y - p.Y).cwiseAbs().maxCoeff() < 1e-9);

  // At dt = 0.05 with identity covariance at rest, trace(F F^T) - 13 is
  // 3 dt^2 (position rows) + (3/4) dt^2 (quaternion rows via Xi/2).
  const double dt = 0.05;
  const InformationPair q1 = predict(p, ControlInput{}, noise, dt);
  from_information(q1, &xr, &Pr);
  CHECK(Pr.trace() - 13.0 ==
        doctest::Approx(3.75 * dt * dt).epsilon(1e-6));
}

TEST_CASE("process noise only ever adds uncertainty") {
  std::mt19937_64 rng(37);
  NoiseConfig noise;
  for (int i = 0; i < 20; ++i) {
    const PayloadState x = random_state(rng);
    const Mat13 P = random_spd(rng);
    ControlInput u;
    u.linear = Vec3{0.1, 0.0, -0.1};
    const InformationPair q = predict(to_information(x, P), u, noise, 0.05);
    PayloadState xr;
    Mat13 Pr;
    from_information(q, &xr, &Pr);
    // Predicted covariance dominates the noise-free propagation F P F^T
    // in the PSD order (additive Q is positive semidefinite).
    const Mat13 F = process_jacobian(x, u, 0.05);
    const Mat13 diff = Pr - F * P * F.transpose();
    Eigen::SelfAdjointEigenSolver<Mat13> eig(diff);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8);
  }
  // On a diagonal covariance the trace itself is monotone.
  PayloadState x;
  x.attitude = quat_from_euler({0.1, -0.2, 0.4});
  const Mat13 P = 0.3 * Mat13::Identity();
  const InformationPair q = predict(to_information(x, P), ControlInput{},
                                    noise, 0.05);
  PayloadState xr;
  Mat13 Pr;
  from_information(q, &xr, &Pr);
  CHECK(Pr.trace() >= P.trace());
}

TEST_CASE("information prediction equals EKF prediction") {
  std::mt19937_64 rng(38);
  NoiseConfig noise;
  for (int i = 0; i < 30; ++i) {
    PayloadState x = random_state(rng);
    Mat13 P = 0.1 * random_spd(rng);
    ControlInput u;
    u.linear = Vec3{0.2, -0.1, 0.0};
    u.angular = Vec3{0.1, 0.0, -0.2};

    const InformationPair q = predict(to_information(x, P), u, noise, 0.05);
    PayloadState x_if;
    Mat13 P_if;
    from_information(q, &x_if, &P_if);

    ekf_oracle_step(&x, &P, u, {}, noise, 0.05);  // predict only
    CHECK((x_if.to_vector() - x.to_vector()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((P_if - P).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("zero innovation leaves the estimate unchanged") {
  std::mt19937_64 rng(39);
  NoiseConfig noise;
  for (int i = 0; i < 20; ++i) {
    const PayloadState x = random_state(rng);
    const InformationPair p = to_information(x, 0.2 * random_spd(rng));
    const Measurement z = measurement_of(x);
    const Contribution c = local_contribution(x, z, noise);
    const InformationPair fused = fuse(p, {c});
    PayloadState xr;
    Mat13 Pr;
    from_information(fused, &xr, &Pr);
    CHECK((xr.to_vector() - x.to_vector()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("contribution matrix does not depend on the measurement") {
  std::mt19937_64 rng(40);
  NoiseConfig noise;
  const PayloadState x = random_state(rng);
  const Contribution a = local_contribution(x, measurement_of(x), noise);
  const Contribution b =
      local_contribution(x, measurement_of(x, &rng, 0.3), noise);
  CHECK((a.I - b.I).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-agent update equals covariance EKF over random steps") {
  std::mt19937_64 rng(41);
  NoiseConfig noise;
  PayloadState x_truth = random_state(rng);
  x_truth.rates = Vec3{0.05, -0.04, 0.3};

  PayloadState x_ekf = x_truth;
  Mat13 P_ekf = 0.1 * Mat13::Identity();
  InformationPair belief = to_information(x_ekf, P_ekf);
  ControlInput u;
  const double dt = 0.05;
  double worst_x = 0.0, worst_p = 0.0;
  for (int k = 0; k < 300; ++k) {
    x_truth = state_transition(x_truth, u, dt);
    Measurement z = measurement_of(x_truth, &rng, 0.05);

    belief = predict(belief, u, noise, dt);
    PayloadState x_pred;
    Mat13 P_pred;
    from_information(belief, &x_pred, &P_pred);
    belief = fuse(belief, {local_contribution(x_pred, z, noise)});
    PayloadState x_if;
    Mat13 P_if;
    from_information(belief, &x_if, &P_if);

    ekf_oracle_step(&x_ekf, &P_ekf, u, {z}, noise, dt);

    worst_x = std::max(
        worst_x, (x_if.to_vector() - x_ekf.to_vector()).cwiseAbs().maxCoeff());
    worst_p = std::max(worst_p, (P_if - P_ekf).cwiseAbs().maxCoeff());
    // Keep both filters on the same belief to isolate per-step agreement.
    belief = to_information(x_ekf, P_ekf);
  }
  CHECK(worst_x < 1e-9);
  CHECK(worst_p < 1e-9);
}

TEST_CASE("fusing nothing is the identity") {
  std::mt19937_64 rng(42);
  const InformationPair p =
      to_information(random_state(rng), random_spd(rng));
  const InformationPair q = fuse(p, {});
  CHECK((q.y - p.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((q.Y - p.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two identical contributions add twice") {
  std::mt19937_64 rng(43);
  NoiseConfig noise;
  const PayloadState x = random_state(rng);
  const InformationPair p = to_information(x, 0.2 * random_spd(rng));
  const Contribution c = local_contribution(x, measurement_of(x, &rng, 0.1),
                                            noise);
  const InformationPair q = fuse(p, {c, c});
  CHECK((q.Y - (p.Y + 2.0 * c.I)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q.y - (p.y + 2.0 * c.i)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("four-way fusion equals the stacked centralized EKF") {
  std::mt19937_64 rng(44);
  NoiseConfig noise;
  for (int trial = 0; trial < 10; ++trial) {
    const PayloadState x = random_state(rng);
    const Mat13 P = 0.1 * random_spd(rng);

    std::vector<Measurement> z_list;
    std::vector<Contribution> contributions;
    for (int a = 0; a < 4; ++a) {
      Measurement z = measurement_of(x, &rng, 0.1);
      z.agent_id = a;
      z_list.push_back(z);
      contributions.push_back(local_contribution(x, z, noise));
    }

    const InformationPair fused = fuse(to_information(x, P), contributions);
    PayloadState x_if;
    Mat13 P_if;
    from_information(fused, &x_if, &P_if);

    // The oracle stacks all four 7-dim measurements into one 28-dim update.
    PayloadState x_ekf = x;
    Mat13 P_ekf = P;
    ekf_oracle_step(&x_ekf, &P_ekf, ControlInput{}, z_list, noise, 0.0);

    CHECK((x_if.to_vector() - x_ekf.to_vector()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((P_if - P_ekf).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("non-finite contributions are skipped and counted") {
  std::mt19937_64 rng(45);
  NoiseConfig noise;
  const PayloadState x = random_state(rng);
  const InformationPair p = to_information(x, 0.2 * random_spd(rng));
  Contribution good = local_contribution(x, measurement_of(x, &rng, 0.1), noise);
  Contribution bad = good;
  bad.i[0] = std::numeric_limits<double>::quiet_NaN();
  int rejected = 0;
  const InformationPair q = fuse(p, {good, bad}, &rejected);
  CHECK(rejected == 1);
  CHECK((q.Y - (p.Y + good.I)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ekf position gain matches the scalar closed form") {
  // With block-diagonal P and R and zero innovation elsewhere, each
  // position axis reduces to the 1-D Kalman update k = p/(p+r).
  NoiseConfig noise;
  const double p = 0.3, r = noise.meas.pos_var[0];
  PayloadState x;
  Mat13 P = Mat13::Identity();
  P.topLeftCorner<3, 3>() = p * Mat3::Identity();
  Measurement z;
  z.valid = true;
  z.z_p = Vec3{0.4, -0.2, 0.1};
  z.z_q = x.attitude;
  PayloadState x1 = x;
  Mat13 P1 = P;
  ekf_oracle_step(&x1, &P1, ControlInput{}, {z}, noise, 0.0);
  const double k = p / (p + r);
  CHECK((x1.position - k * z.z_p).cwiseAbs().maxCoeff() < 1e-9);
  for (int a = 0; a < 3; ++a) {
    CHECK(P1(a, a) == doctest::Approx((1.0 - k) * p).epsilon(1e-9));
  }
}

TEST_CASE("ekf with no measurements is pure prediction") {
  std::mt19937_64 rng(46);
  NoiseConfig noise;
  PayloadState x = random_state(rng);
  Mat13 P = 0.1 * random_spd(rng);
  PayloadState x2 = x;
  Mat13 P2 = P;
  ekf_oracle_step(&x2, &P2, ControlInput{}, {}, noise, 0.05);
  const Mat13 F = process_jacobian(x, ControlInput{}, 0.05);
  const Mat13 Q = lift_process_noise(x.attitude, noise.q_accel, 0.05);
  const PayloadState x_pred = state_transition(x, ControlInput{}, 0.05);
  CHECK((x2.to_vector() - x_pred.to_vector()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((P2 - (F * P * F.transpose() + Q)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("initial pair encodes the measured pose with static kinematics") {
  NoiseConfig noise;
  Measurement z;
  z.valid = true;
  z.z_p = Vec3{1.0, 2.0, -3.0};
  z.z_q = quat_from_euler({0.1, -0.05, 0.9});
  const InformationPair p = initial_pair(z, noise);
  PayloadState x;
  Mat13 P;
  from_information(p, &x, &P);
  CHECK((x.position - z.z_p).norm() < 1e-9);
  CHECK((quat_align_sign(x.attitude, z.z_q).coeffs() - z.z_q.coeffs()).norm() <
        1e-9);
  CHECK(x.velocity.norm() < 1e-9);
  CHECK(x.rates.norm() < 1e-9);
  for (int a = 0; a < 3; ++a) {
    CHECK(P(kPosIdx + a, kPosIdx + a) ==
          doctest::Approx(noise.meas.pos_var[a]).epsilon(1e-6));
    CHECK(P(kVelIdx + a, kVelIdx + a) ==
          doctest::Approx(noise.p0_vel).epsilon(1e-6));
    CHECK(P(kRateIdx + a, kRateIdx + a) ==
          doctest::Approx(noise.p0_rate).epsilon(1e-6));
  }
}

TEST_CASE("information matrix stays symmetric through filtering") {
  std::mt19937_64 rng(47);
  NoiseConfig noise;
  PayloadState truth = random_state(rng);
  truth.rates = Vec3{0.02, 0.05, 0.2};
  InformationPair belief = to_information(truth, 0.1 * Mat13::Identity());
  for (int k = 0; k < 200; ++k) {
    truth = state_transition(truth, ControlInput{}, 0.05);
    belief = predict(belief, ControlInput{}, noise, 0.05);
    PayloadState x_pred;
    Mat13 P_pred;
    from_information(belief, &x_pred, &P_pred);
    belief = fuse(belief, {local_contribution(
                              x_pred, measurement_of(truth, &rng, 0.05),
                              noise)});
    CHECK((belief.Y - belief.Y.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}
