#pragma once

#include "elastowave/assembly.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace elastowave {

struct SimState {
  double t = 0.0;
  std::size_t step = 0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> a_e;
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> a_a;

  static SimState zeros(int elastic_size, int acoustic_size);
};

/// Time-dependent data of a run: right-hand sides and strongly imposed
/// Dirichlet values.
class Forcing {
 public:
  virtual ~Forcing() = default;
  virtual void loads(double t, std::span<double> f_e, std::span<double> f_a) const = 0;
  virtual void constrain_elastic(double, std::span<double>, std::span<double>, std::span<double>) const {}
  virtual void constrain_acoustic(double, std::span<double>, std::span<double>, std::span<double>) const {}
};

class ZeroForcing final : public Forcing {
 public:
  void loads(double, std::span<double> f_e, std::span<double> f_a) const override;
};

/// Loads from a LoadAssembler; Dirichlet nodes take the analytic values when
/// a model is given and zero otherwise.
class DiscreteForcing final : public Forcing {
 public:
  DiscreteForcing(std::shared_ptr<const LoadAssembler> loads, std::shared_ptr<const DofSpace> elastic,
                  std::shared_ptr<const DofSpace> acoustic, std::shared_ptr<const AnalyticModel> model);

  void loads(double t, std::span<double> f_e, std::span<double> f_a) const override;
  void constrain_elastic(double t, std::span<double> u, std::span<double> v, std::span<double> a) const override;
  void constrain_acoustic(double t, std::span<double> phi, std::span<double> psi, std::span<double> a) const override;

 private:
  std::shared_ptr<const LoadAssembler> loads_;
  std::shared_ptr<const DofSpace> elastic_;
  std::shared_ptr<const DofSpace> acoustic_;
  std::shared_ptr<const AnalyticModel> model_;
};

/// a_e = M_e^-1 (f_e - S_e v - K_e u - C_e psi) and the acoustic analogue,
/// written into state.a_e and state.a_a.
void initial_accelerations(const SystemOperators& ops, const Forcing& forcing, SimState& state);

/// u~ = u + dt v + dt^2/2 a, v~ = v + dt/2 a (and the acoustic pair), in place.
void predictors(SimState& state, double dt);

/// Staggered Newmark predictor-corrector. Workspace is sized once; step()
/// does not allocate.
class NewmarkStepper {
 public:
  NewmarkStepper(const SystemOperators& ops, const Forcing& forcing);

  /// Advances state from t_n to t_n + dt. Throws DivergenceError on
  /// non-finite values.
  void step(SimState& state, double dt);

 private:
  const SystemOperators& ops_;
  const Forcing& forcing_;
  std::vector<double> f_e_;
  std::vector<double> f_a_;
  std::vector<double> tmp_e_;
  std::vector<double> tmp_a_;
};

/// 0.5 (v'M_e v + u'K_e u + psi'M_a psi + phi'K_a phi).
struct EnergyParts {
  double elastic_kinetic = 0.0;
  double elastic_potential = 0.0;
  double acoustic_kinetic = 0.0;
  double acoustic_potential = 0.0;

  double elastic() const { return elastic_kinetic + elastic_potential; }
  double acoustic() const { return acoustic_kinetic + acoustic_potential; }
  double total() const { return elastic() + acoustic(); }
};
EnergyParts discrete_energy(const SystemOperators& ops, const SimState& state);
double total_discrete_energy(const SystemOperators& ops, const SimState& state);

struct StableStep {
  double dt = 0.0;
  double lambda_max = 0.0;
  double damping_rate = 0.0;  ///< largest eigenvalue of M^-1 S
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on M^-1/2 K M^-1/2 per domain (coupling ignored);
/// dt = safety * 2 / sqrt(lambda_max), reduced by the damped central
/// difference factor when absorbing terms are present. The smallest
/// domain step wins.
StableStep estimate_stable_dt(const SystemOperators& ops, double safety = 0.5, int max_iterations = 500,
                              double tolerance = 1e-4);

/// Power iteration on a diagonally scaled operator, exposed for tests.
StableStep estimate_stable_dt(const LinearOperator& stiffness, std::span<const double> mass, double safety = 0.5,
                              int max_iterations = 500, double tolerance = 1e-4);

}  // namespace elastowave
