#pragma once

#include "elastowave/assembly.hpp"
#include "elastowave/time_integration.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace elastowave {

/// Squared contributions of the energy and L2 norms. The zeta-weighted
/// displacement term of the elastic energy norm is taken as zero.
struct NormBreakdown {
  double elastic_kinetic = 0.0;    ///< ||rho^1/2 v||^2
  double elastic_strain = 0.0;     ///< ||C^1/2 eps(u)||^2
  double elastic_jump = 0.0;       ///< ||eta^1/2 [u]||^2 on region interfaces
  double acoustic_kinetic = 0.0;   ///< ||c^-1 rho_a^1/2 psi||^2
  double acoustic_gradient = 0.0;  ///< ||rho_a^1/2 grad phi||^2
  double elastic_l2 = 0.0;         ///< ||u||^2
  double acoustic_l2 = 0.0;        ///< ||phi||^2

  double elastic_energy() const;
  double acoustic_energy() const;
  double energy() const;  ///< sqrt of the sum of all energy terms
  double l2() const;
};

/// Norms of (u_h - u, phi_h - phi) with Gauss quadrature of N+2 points per
/// direction. Either argument may be null: without a state the analytic
/// field alone is measured, without a model the discrete field.
NormBreakdown measure(const Discretization& d, const SimState* state, const AnalyticModel* model, double t);

double energy_norm_elastic(const Discretization& d, const SimState& state);
double energy_norm_acoustic(const Discretization& d, const SimState& state);

enum class NormKind { Energy, L2 };
double error_vs_analytic(const Discretization& d, const SimState& state, const AnalyticModel& model, double t,
                         NormKind kind);

/// Nodal interpolant of the model at time t (u, v, a_e, phi, psi, a_a).
SimState interpolate_state(const Discretization& d, const AnalyticModel& model, double t);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(error) against log(param), or against param when
/// `exponential` (the slope is then the log-decay per unit of param).
/// Needs at least 3 samples and positive errors.
FitResult fit_convergence_rate(std::span<const double> params, std::span<const double> errors,
                               bool exponential = false);

struct ConvergenceSeries {
  std::string parameter;  ///< "h" or "N"
  std::vector<double> params;
  std::vector<double> energy_errors;
  std::vector<double> l2_errors;
  FitResult energy_fit;
  FitResult l2_fit;
};

/// Point monitors. Each point is attached to the elastic space when it lies
/// there, otherwise to the acoustic space.
class ReceiverSet {
 public:
  struct Receiver {
    std::string name;
    Vec3 position;
    DomainKind kind = DomainKind::Elastic;
    std::vector<std::pair<int, double>> weights;  ///< (node, basis value)
  };

  ReceiverSet() = default;
  /// Throws InvalidArgument for points outside both domains.
  ReceiverSet(const Discretization& d, const std::vector<std::pair<std::string, Vec3>>& points);

  void record(const SimState& state);
  std::size_t size() const { return receivers_.size(); }
  const Receiver& receiver(std::size_t i) const { return receivers_[i]; }
  const std::vector<double>& times() const { return times_; }
  /// Samples of receiver i; 3 values per time for elastic, 1 for acoustic.
  const std::vector<double>& samples(std::size_t i) const { return samples_[i]; }

  /// One CSV per receiver: `<dir>/<name>.csv`.
  void write_csv(const std::filesystem::path& dir) const;

 private:
  std::vector<Receiver> receivers_;
  std::vector<double> times_;
  std::vector<std::vector<double>> samples_;
};

}  // namespace elastowave
