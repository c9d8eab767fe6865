#include "elastowave/analytic.hpp"

#include "elastowave/error.hpp"

#include <cmath>
#include <numbers>

namespace elastowave {

using std::numbers::pi;

Mat3 stress(const Mat3& grad, const ElasticMaterial& m) {
  const Mat3 eps = 0.5 * (grad + grad.transpose());
  return m.lambda * eps.trace() * Mat3::Identity() + 2.0 * m.mu * eps;
}

VerificationModel::VerificationModel(const ElasticMaterial& solid, const AcousticMaterial& fluid) {
  const WaveSpeeds w = wave_speeds(solid);
  cp_ = w.p;
  cs_ = w.s;
  c_ = fluid.sound_speed;
}

ElasticSample VerificationModel::elastic(const Vec3& x, double t) const {
  const double w = 4.0 * pi;
  const double ct = std::cos(w * t);
  const double st = std::sin(w * t);
  const std::array<double, 3> speed{cp_, cs_, cs_};
  ElasticSample s;
  for (int c = 0; c < 3; ++c) {
    const double kx = w / speed[static_cast<std::size_t>(c)];
    const double cx = std::cos(kx * x[0]);
    s.u[c] = cx * ct;
    s.v[c] = -w * cx * st;
    s.a[c] = -w * w * cx * ct;
    s.grad(c, 0) = -kx * std::sin(kx * x[0]) * ct;
  }
  return s;
}

AcousticSample VerificationModel::acoustic(const Vec3& x, double t) const {
  const double w = 4.0 * pi;
  const double kx = w / c_;
  const double sx = std::sin(kx * x[0]);
  const double cx = std::cos(kx * x[0]);
  AcousticSample s;
  s.phi = sx * std::sin(w * t);
  s.phi_t = w * sx * std::cos(w * t);
  s.phi_tt = -w * w * s.phi;
  s.grad = Vec3(kx * cx * std::sin(w * t), 0.0, 0.0);
  s.grad_t = Vec3(kx * w * cx * std::cos(w * t), 0.0, 0.0);
  return s;
}

namespace {

struct DecayRates {
  double b1p;
  double b2p;
  double b2s;
};

DecayRates decay_rates(const ElasticMaterial& solid, const AcousticMaterial& fluid, double speed) {
  const WaveSpeeds w = wave_speeds(solid);
  auto rate = [speed](double c) { return std::sqrt(1.0 - speed * speed / (c * c)); };
  return {rate(fluid.sound_speed), rate(w.p), rate(w.s)};
}

}  // namespace

Eigen::Matrix3d scholte_matrix(const ElasticMaterial& solid, const AcousticMaterial& fluid, double speed) {
  const DecayRates r = decay_rates(solid, fluid, speed);
  Eigen::Matrix3d m;
  // shear traction, normal traction, normal velocity
  m << 0.0, 2.0 * r.b2p, -(1.0 + r.b2s * r.b2s),
      fluid.density * speed * speed, solid.lambda * (r.b2p * r.b2p - 1.0) + 2.0 * solid.mu * r.b2p * r.b2p, -2.0 * solid.mu * r.b2s,
      r.b1p, r.b2p, -1.0;
  return m;
}

ScholteParams scholte_dispersion_solve(const ElasticMaterial& solid, const AcousticMaterial& fluid, double omega) {
  validate(solid);
  validate(fluid);
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  const double cmin = std::min(fluid.sound_speed, wave_speeds(solid).s);
  auto det = [&](double c) { return scholte_matrix(solid, fluid, c).determinant(); };

  const int steps = 200;
  const double lo0 = 0.01 * cmin;
  const double hi0 = 0.999 * cmin;
  double a = 0.0;
  double b = 0.0;
  bool found = false;
  // Scan downwards from the upper end so the root closest to min(c, c_S) wins.
  double prev_c = hi0;
  double prev = det(prev_c);
  for (int i = steps - 1; i >= 0 && !found; --i) {
    const double c = lo0 + (hi0 - lo0) * i / steps;
    const double d = det(c);
    if (prev == 0.0 || (d < 0.0) != (prev < 0.0)) {
      a = c;
      b = prev_c;
      found = true;
    }
    prev = d;
    prev_c = c;
  }
  if (!found) throw NoRootError("no Scholte speed below min(c, c_S) for these materials");

  double fa = det(a);
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = det(m);
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }

  ScholteParams p;
  p.omega = omega;
  p.speed = 0.5 * (a + b);
  p.k = omega / p.speed;
  const DecayRates r = decay_rates(solid, fluid, p.speed);
  p.b1p = r.b1p;
  p.b2p = r.b2p;
  p.b2s = r.b2s;
  const double b2 = (1.0 + r.b2s * r.b2s) / (2.0 * r.b2p);
  const double b1 = (1.0 - r.b2p * b2) / r.b1p;
  p.amplitude = {b1, b2, 1.0};
  return p;
}

ElasticSample ScholteModel::elastic(const Vec3& x, double t) const {
  const double k = p_.k;
  const double w = p_.omega;
  const double ep = std::exp(k * p_.b2p * x[2]);
  const double es = std::exp(k * p_.b2s * x[2]);
  const double B2 = p_.amplitude[1];
  const double B3 = p_.amplitude[2];
  const double a1 = k * (B2 * ep - B3 * p_.b2s * es);
  const double a3 = k * (B2 * p_.b2p * ep - B3 * es);
  const double a1z = k * k * (B2 * p_.b2p * ep - B3 * p_.b2s * p_.b2s * es);
  const double a3z = k * k * (B2 * p_.b2p * p_.b2p * ep - B3 * p_.b2s * es);
  const double th = k * x[0] - w * t;
  const double c = std::cos(th);
  const double s = std::sin(th);
  ElasticSample out;
  out.u = Vec3(a1 * c, 0.0, a3 * s);
  out.v = Vec3(a1 * w * s, 0.0, -a3 * w * c);
  out.a = Vec3(-a1 * w * w * c, 0.0, -a3 * w * w * s);
  out.grad(0, 0) = -k * a1 * s;
  out.grad(0, 2) = a1z * c;
  out.grad(2, 0) = k * a3 * c;
  out.grad(2, 2) = a3z * s;
  return out;
}

AcousticSample ScholteModel::acoustic(const Vec3& x, double t) const {
  const double k = p_.k;
  const double w = p_.omega;
  const double amp = w * p_.amplitude[0] * std::exp(-k * p_.b1p * x[2]);
  const double th = k * x[0] - w * t;
  const double c = std::cos(th);
  const double s = std::sin(th);
  AcousticSample out;
  out.phi = amp * c;
  out.phi_t = amp * w * s;
  out.phi_tt = -amp * w * w * c;
  out.grad = Vec3(-k * amp * s, 0.0, -k * p_.b1p * amp * c);
  out.grad_t = Vec3(k * amp * w * c, 0.0, -k * p_.b1p * amp * w * s);
  return out;
}

double ricker(double t, const RickerSource& source) {
  const double a = pi * pi * source.peak_frequency * source.peak_frequency * (t - source.delay) * (t - source.delay);
  return source.amplitude * (1.0 - 2.0 * a) * std::exp(-a);
}

}  // namespace elastowave
