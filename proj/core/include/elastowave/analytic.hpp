#pragma once

#include "elastowave/materials.hpp"

#include <array>
#include <string>

namespace elastowave {

/// Displacement and its derivatives at one space-time point.
/// grad(c, a) = d u_c / d x_a.
struct ElasticSample {
  Vec3 u = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Mat3 grad = Mat3::Zero();
};

/// Velocity potential and its derivatives; grad_t is the gradient of phi_t.
struct AcousticSample {
  double phi = 0.0;
  double phi_t = 0.0;
  double phi_tt = 0.0;
  Vec3 grad = Vec3::Zero();
  Vec3 grad_t = Vec3::Zero();
};

/// Closed-form reference solution covering both domains.
class AnalyticModel {
 public:
  virtual ~AnalyticModel() = default;
  virtual std::string name() const = 0;
  virtual ElasticSample elastic(const Vec3& x, double t) const = 0;
  virtual AcousticSample acoustic(const Vec3& x, double t) const = 0;
};

Mat3 stress(const Mat3& grad, const ElasticMaterial& m);

/// u = (cos(4 pi x / c_P), cos(4 pi x / c_S), cos(4 pi x / c_S)) cos(4 pi t),
/// phi = sin(4 pi x / c) sin(4 pi t). Zero body forces; the transmission
/// conditions hold on x = 0 when c = 1.
class VerificationModel final : public AnalyticModel {
 public:
  VerificationModel(const ElasticMaterial& solid, const AcousticMaterial& fluid);
  std::string name() const override { return "verification"; }
  ElasticSample elastic(const Vec3& x, double t) const override;
  AcousticSample acoustic(const Vec3& x, double t) const override;

 private:
  double cp_;
  double cs_;
  double c_;
};

struct ScholteParams {
  double omega = 1.0;
  double speed = 0.0;  ///< c_sch
  double k = 0.0;
  double b1p = 0.0;
  double b2p = 0.0;
  double b2s = 0.0;
  std::array<double, 3> amplitude{};  ///< B1, B2, B3
};

/// Interface matrix of the three transmission conditions at z = 0 for a
/// trial speed, with each row divided by its common factor of omega and k.
Eigen::Matrix3d scholte_matrix(const ElasticMaterial& solid, const AcousticMaterial& fluid, double speed);

/// Root of det on (0, min(c, c_S)) by scan and bisection; amplitudes with
/// B3 = 1. Throws NoRootError when no sign change is found.
ScholteParams scholte_dispersion_solve(const ElasticMaterial& solid, const AcousticMaterial& fluid, double omega);

/// Elastic half-space z < 0 below an acoustic half-space z > 0.
class ScholteModel final : public AnalyticModel {
 public:
  explicit ScholteModel(const ScholteParams& params) : p_(params) {}
  std::string name() const override { return "scholte"; }
  ElasticSample elastic(const Vec3& x, double t) const override;
  AcousticSample acoustic(const Vec3& x, double t) const override;
  const ScholteParams& params() const { return p_; }

 private:
  ScholteParams p_;
};

struct RickerSource {
  double amplitude = 1.0;       ///< f_0
  double peak_frequency = 1.0;  ///< f_p
  double delay = 0.0;           ///< t_0
  Vec3 position = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();

  bool operator==(const RickerSource&) const = default;
};

/// f_0 (1 - 2 pi^2 f_p^2 (t - t_0)^2) exp(-pi^2 f_p^2 (t - t_0)^2).
double ricker(double t, const RickerSource& source);

}  // namespace elastowave
