#include "multilift/trajectory.hpp"

#include <cmath>

namespace multilift {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

Quat yaw_quat(double psi) {
  // Unwrapped yaw: qz has period 4*pi in psi, so continuity is preserved
  // as long as psi itself is continuous.
  return {std::cos(psi / 2), 0.0, 0.0, std::sin(psi / 2)};
}

struct Axis {
  double p, v, a;  // value and first two time derivatives
};

// x(t) = amp * sin(omega * phase(t)) with ramped phase.
Axis sine_axis(double amp, double omega, double phase, double dphase,
               double ddphase) {
  const double s = std::sin(omega * phase), c = std::cos(omega * phase);
  Axis out;
  out.p = amp * s;
  out.v = amp * omega * c * dphase;
  out.a = amp * (omega * c * ddphase - omega * omega * s * dphase * dphase);
  return out;
}

// Heading of the lissajous velocity vector at phase time t; returns false
// while the trajectory is at rest.
bool lissajous_heading(double t, const TrajectoryConfig& cfg, double* psi,
                       double* psidot) {
  const double T = cfg.ramp_duration;
  const double p = smootherstep_integral(t, T);
  const double dp = smootherstep(t, T);
  const double ddp = smootherstep_deriv(t, T);
  const double wn = kTwoPi * cfg.f_n, we = kTwoPi * cfg.f_e;
  const Axis n = sine_axis(cfg.amp_n, wn, p, dp, ddp);
  const Axis e = sine_axis(cfg.amp_e, we, p, dp, ddp);
  const double v2 = n.v * n.v + e.v * e.v;
  if (v2 < 1e-12) return false;
  *psi = std::atan2(e.v, n.v);
  *psidot = (n.v * e.a - e.v * n.a) / v2;
  return true;
}

double wrap_to_pi(double a) {
  a = std::fmod(a + M_PI, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - M_PI;
}
}  // namespace

double smootherstep(double t, double T) {
  const double u = std::clamp(t / T, 0.0, 1.0);
  return ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
}

double smootherstep_deriv(double t, double T) {
  const double u = t / T;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (u - 1.0) * (u - 1.0) / T;
}

double smootherstep_integral(double t, double T) {
  if (t <= 0.0) return 0.0;
  if (t >= T) return 0.5 * T + (t - T);
  const double u = t / T;
  return T * (((u - 3.0) * u + 2.5) * u * u * u * u);
}

ReferenceState pirouette_reference(double t, const TrajectoryConfig& cfg) {
  const double T = cfg.ramp_duration;
  const double omega = cfg.tangential_speed / cfg.radius;
  const double a = omega * smootherstep_integral(t, T);
  const double adot = omega * smootherstep(t, T);
  const double addot = omega * smootherstep_deriv(t, T);
  const double ca = std::cos(a), sa = std::sin(a);
  const double r = cfg.radius;

  ReferenceState ref;
  ref.position = cfg.center + Vec3{r * ca, r * sa, 0.0};
  ref.velocity = Vec3{-r * sa * adot, r * ca * adot, 0.0};
  ref.linear_accel = Vec3{-r * sa * addot - r * ca * adot * adot,
                          r * ca * addot - r * sa * adot * adot, 0.0};
  // Tangent heading; one payload wall keeps facing the circle center.
  ref.attitude = yaw_quat(a + M_PI / 2);
  ref.rates = Vec3{0.0, 0.0, adot};
  ref.angular_accel = Vec3{0.0, 0.0, addot};
  return ref;
}

ReferenceState lissajous_reference(double t, const TrajectoryConfig& cfg) {
  const double T = cfg.ramp_duration;
  const double p = smootherstep_integral(t, T);
  const double dp = smootherstep(t, T);
  const double ddp = smootherstep_deriv(t, T);
  const double wn = kTwoPi * cfg.f_n, we = kTwoPi * cfg.f_e;
  const Axis n = sine_axis(cfg.amp_n, wn, p, dp, ddp);
  const Axis e = sine_axis(cfg.amp_e, we, p, dp, ddp);
  const Axis d = sine_axis(cfg.amp_d, wn, p, dp, ddp);

  ReferenceState ref;
  ref.position = cfg.center + Vec3{n.p, e.p, d.p};
  ref.velocity = Vec3{n.v, e.v, d.v};
  ref.linear_accel = Vec3{n.a, e.a, d.a};

  // Yaw faces the direction of travel. atan2 wraps at +-pi mid-figure-8,
  // so the heading is unwrapped by accumulating wrapped increments along
  // the trajectory; at rest the initial tangent heading is held.
  const double psi0 = std::atan2(cfg.amp_e * we, cfg.amp_n * wn);
  double psi = psi0, psidot = 0.0;
  if (t > 0.0) {
    const double step = 0.05;
    double prev_raw = psi0;
    double unwrapped = psi0;
    const int nsteps = static_cast<int>(std::ceil(t / step));
    for (int i = 1; i <= nsteps; ++i) {
      const double ti = std::min(i * step, t);
      double raw, rate;
      if (!lissajous_heading(ti, cfg, &raw, &rate)) continue;
      unwrapped += wrap_to_pi(raw - prev_raw);
      prev_raw = raw;
    }
    psi = unwrapped;
    double raw_end, rate_end;
    if (lissajous_heading(t, cfg, &raw_end, &rate_end)) psidot = rate_end;
  }
  ref.attitude = yaw_quat(psi);
  ref.rates = Vec3{0.0, 0.0, psidot};

  // Yaw feed-forward acceleration by central difference of the analytic
  // yaw rate (the closed form would need position jerk).
  const double h = 1e-5;
  double rp = psidot, rm = psidot, tmp;
  lissajous_heading(t + h, cfg, &tmp, &rp);
  lissajous_heading(t - h, cfg, &tmp, &rm);
  ref.angular_accel = Vec3{0.0, 0.0, (rp - rm) / (2 * h)};
  return ref;
}

ReferenceState hover_reference(double /*t*/, const TrajectoryConfig& cfg) {
  ReferenceState ref;
  ref.position = cfg.center;
  return ref;
}

ReferenceState trajectory_reference(double t, const TrajectoryConfig& cfg) {
  switch (cfg.kind) {
    case TrajectoryKind::kPirouette:
      return pirouette_reference(t, cfg);
    case TrajectoryKind::kLissajous:
      return lissajous_reference(t, cfg);
    case TrajectoryKind::kHover:
      return hover_reference(t, cfg);
  }
  throw ConfigError("unknown trajectory kind");
}

}  // namespace multilift
