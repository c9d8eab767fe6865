#pragma once

#include "elastowave/analytic.hpp"

#include <array>
#include <cmath>
#include <functional>

namespace elastowave::testing {

/// Sixth-order central differences of a scalar function of (x, t); axis 3
/// is time. Only the model's values are sampled, never its derivatives.
class FiniteDifference {
 public:
  using Field = std::function<double(const Vec3&, double)>;

  explicit FiniteDifference(double h) : h_(h) {}

  double d1(const Field& f, const Vec3& x, double t, int axis) const {
    static constexpr std::array<double, 3> c{3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    double s = 0.0;
    for (int k = 1; k <= 3; ++k) s += c[k - 1] * (eval(f, x, t, axis, k * h_) - eval(f, x, t, axis, -k * h_));
    return s / h_;
  }

  double d2(const Field& f, const Vec3& x, double t, int axis) const {
    static constexpr std::array<double, 3> c{3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    double s = -49.0 / 18.0 * f(x, t);
    for (int k = 1; k <= 3; ++k) s += c[k - 1] * (eval(f, x, t, axis, k * h_) + eval(f, x, t, axis, -k * h_));
    return s / (h_ * h_);
  }

  double mixed(const Field& f, const Vec3& x, double t, int a, int b) const {
    if (a == b) return d2(f, x, t, a);
    return d1([&](const Vec3& y, double s) { return d1(f, y, s, b); }, x, t, a);
  }

 private:
  static double eval(const Field& f, const Vec3& x, double t, int axis, double shift) {
    if (axis == 3) return f(x, t + shift);
    Vec3 y = x;
    y[axis] += shift;
    return f(y, t);
  }

  double h_;
};

struct Residual {
  double value = 0.0;  ///< largest absolute residual
  double scale = 0.0;  ///< largest term entering it
};

/// rho u_tt - div sigma(u), with (div sigma)_i = (lambda + mu) d_i div u + mu lap u_i.
inline Residual elastic_residual(const AnalyticModel& model, const ElasticMaterial& m, const Vec3& x, double t,
                                 const FiniteDifference& fd) {
  Residual r;
  for (int i = 0; i < 3; ++i) {
    auto ui = [&](const Vec3& y, double s) { return model.elastic(y, s).u[i]; };
    const double inertia = m.density * fd.d2(ui, x, t, 3);
    double grad_div = 0.0;
    double lap = 0.0;
    for (int j = 0; j < 3; ++j) {
      auto uj = [&](const Vec3& y, double s) { return model.elastic(y, s).u[j]; };
      grad_div += fd.mixed(uj, x, t, i, j);
      lap += fd.d2(ui, x, t, j);
    }
    const double div_sigma = (m.lambda + m.mu) * grad_div + m.mu * lap;
    r.value = std::max(r.value, std::abs(inertia - div_sigma));
    r.scale = std::max({r.scale, std::abs(inertia), std::abs(div_sigma)});
  }
  return r;
}

/// c^-2 phi_tt - lap phi.
inline Residual acoustic_residual(const AnalyticModel& model, const AcousticMaterial& m, const Vec3& x, double t,
                                  const FiniteDifference& fd) {
  auto phi = [&](const Vec3& y, double s) { return model.acoustic(y, s).phi; };
  const double tt = fd.d2(phi, x, t, 3) / (m.sound_speed * m.sound_speed);
  double lap = 0.0;
  for (int j = 0; j < 3; ++j) lap += fd.d2(phi, x, t, j);
  return {std::abs(tt - lap), std::max(std::abs(tt), std::abs(lap))};
}

/// sigma(u) n_e + rho_a phi_t n_e = 0 and grad phi . n_a + u_t . n_a = 0 at
/// an interface point, with n_a = -n_e.
inline Residual interface_residual(const AnalyticModel& model, const ElasticMaterial& m, const AcousticMaterial& a,
                                   const Vec3& x, double t, const Vec3& n_e, const FiniteDifference& fd) {
  Mat3 grad;
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d)
      grad(c, d) = fd.d1([&](const Vec3& y, double s) { return model.elastic(y, s).u[c]; }, x, t, d);
  const Vec3 traction = stress(grad, m) * n_e;
  auto phi = [&](const Vec3& y, double s) { return model.acoustic(y, s).phi; };
  const double phi_t = fd.d1(phi, x, t, 3);
  Residual r;
  for (int c = 0; c < 3; ++c) {
    r.value = std::max(r.value, std::abs(traction[c] + a.density * phi_t * n_e[c]));
    r.scale = std::max({r.scale, std::abs(traction[c]), std::abs(a.density * phi_t * n_e[c])});
  }
  double dphi_dn = 0.0;
  double ut_n = 0.0;
  for (int d = 0; d < 3; ++d) {
    dphi_dn -= fd.d1(phi, x, t, d) * n_e[d];
    ut_n -= fd.d1([&](const Vec3& y, double s) { return model.elastic(y, s).u[d]; }, x, t, 3) * n_e[d];
  }
  r.value = std::max(r.value, std::abs(dphi_dn + ut_n));
  r.scale = std::max({r.scale, std::abs(dphi_dn), std::abs(ut_n)});
  return r;
}

}  // namespace elastowave::testing
