#include "elastowave/time_integration.hpp"

#include "elastowave/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace elastowave {

namespace {

/// r -= A x, using tmp as workspace.
void subtract(const std::shared_ptr<const LinearOperator>& op, std::span<const double> x, std::span<double> r,
              std::span<double> tmp) {
  if (!op) return;
  op->apply(x, tmp);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= tmp[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_mass(const std::vector<double>& m) {
  for (double v : m) {
    if (!(v > 0.0)) throw AssemblyError("mass matrix has a nonpositive diagonal entry");
  }
}

}  // namespace

SimState SimState::zeros(int elastic_size, int acoustic_size) {
  SimState s;
  const auto ne = static_cast<std::size_t>(elastic_size);
  const auto na = static_cast<std::size_t>(acoustic_size);
  s.u.assign(ne, 0.0);
  s.v.assign(ne, 0.0);
  s.a_e.assign(ne, 0.0);
  s.phi.assign(na, 0.0);
  s.psi.assign(na, 0.0);
  s.a_a.assign(na, 0.0);
  return s;
}

void ZeroForcing::loads(double, std::span<double> f_e, std::span<double> f_a) const {
  std::fill(f_e.begin(), f_e.end(), 0.0);
  std::fill(f_a.begin(), f_a.end(), 0.0);
}

DiscreteForcing::DiscreteForcing(std::shared_ptr<const LoadAssembler> loads, std::shared_ptr<const DofSpace> elastic,
                                 std::shared_ptr<const DofSpace> acoustic, std::shared_ptr<const AnalyticModel> model)
    : loads_(std::move(loads)), elastic_(std::move(elastic)), acoustic_(std::move(acoustic)), model_(std::move(model)) {}

void DiscreteForcing::loads(double t, std::span<double> f_e, std::span<double> f_a) const {
  if (loads_) {
    loads_->evaluate(t, f_e, f_a);
  } else {
    std::fill(f_e.begin(), f_e.end(), 0.0);
    std::fill(f_a.begin(), f_a.end(), 0.0);
  }
}

void DiscreteForcing::constrain_elastic(double t, std::span<double> u, std::span<double> v, std::span<double> a) const {
  for (int node : elastic_->dirichlet_nodes) {
    ElasticSample s;
    if (model_) s = model_->elastic(elastic_->node_coords[static_cast<std::size_t>(node)], t);
    for (int c = 0; c < 3; ++c) {
      const auto i = static_cast<std::size_t>(elastic_->dof(node, c));
      u[i] = s.u[c];
      v[i] = s.v[c];
      a[i] = s.a[c];
    }
  }
}

void DiscreteForcing::constrain_acoustic(double t, std::span<double> phi, std::span<double> psi,
                                         std::span<double> a) const {
  for (int node : acoustic_->dirichlet_nodes) {
    AcousticSample s;
    if (model_) s = model_->acoustic(acoustic_->node_coords[static_cast<std::size_t>(node)], t);
    const auto i = static_cast<std::size_t>(node);
    phi[i] = s.phi;
    psi[i] = s.phi_t;
    a[i] = s.phi_tt;
  }
}

void initial_accelerations(const SystemOperators& ops, const Forcing& forcing, SimState& state) {
  check_mass(ops.mass_e);
  check_mass(ops.mass_a);
  const std::size_t ne = ops.mass_e.size();
  const std::size_t na = ops.mass_a.size();
  forcing.constrain_elastic(state.t, state.u, state.v, state.a_e);
  forcing.constrain_acoustic(state.t, state.phi, state.psi, state.a_a);
  std::vector<double> fe(ne);
  std::vector<double> fa(na);
  std::vector<double> te(ne);
  std::vector<double> ta(na);
  forcing.loads(state.t, fe, fa);
  subtract(ops.absorbing_e, state.v, fe, te);
  subtract(ops.stiffness_e, state.u, fe, te);
  subtract(ops.coupling_e, state.psi, fe, te);
  subtract(ops.absorbing_a, state.psi, fa, ta);
  subtract(ops.stiffness_a, state.phi, fa, ta);
  subtract(ops.coupling_a, state.v, fa, ta);
  for (std::size_t i = 0; i < ne; ++i) state.a_e[i] = fe[i] / ops.mass_e[i];
  for (std::size_t i = 0; i < na; ++i) state.a_a[i] = fa[i] / ops.mass_a[i];
  forcing.constrain_elastic(state.t, state.u, state.v, state.a_e);
  forcing.constrain_acoustic(state.t, state.phi, state.psi, state.a_a);
}

void predictors(SimState& state, double dt) {
  const double h = 0.5 * dt;
  const double h2 = 0.5 * dt * dt;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    state.u[i] += dt * state.v[i] + h2 * state.a_e[i];
    state.v[i] += h * state.a_e[i];
  }
  for (std::size_t i = 0; i < state.phi.size(); ++i) {
    state.phi[i] += dt * state.psi[i] + h2 * state.a_a[i];
    state.psi[i] += h * state.a_a[i];
  }
}

NewmarkStepper::NewmarkStepper(const SystemOperators& ops, const Forcing& forcing)
    : ops_(ops),
      forcing_(forcing),
      f_e_(ops.mass_e.size()),
      f_a_(ops.mass_a.size()),
      tmp_e_(ops.mass_e.size()),
      tmp_a_(ops.mass_a.size()) {
  check_mass(ops.mass_e);
  check_mass(ops.mass_a);
}

void NewmarkStepper::step(SimState& s, double dt) {
  const double t1 = s.t + dt;
  const double h = 0.5 * dt;
  predictors(s, dt);
  forcing_.constrain_elastic(t1, s.u, s.v, s.a_e);
  forcing_.constrain_acoustic(t1, s.phi, s.psi, s.a_a);

  forcing_.loads(t1, f_e_, f_a_);

  subtract(ops_.absorbing_e, s.v, f_e_, tmp_e_);
  subtract(ops_.stiffness_e, s.u, f_e_, tmp_e_);
  subtract(ops_.coupling_e, s.psi, f_e_, tmp_e_);
  double check = 0.0;
  for (std::size_t i = 0; i < f_e_.size(); ++i) {
    s.a_e[i] = f_e_[i] / ops_.mass_e[i];
    s.v[i] += h * s.a_e[i];
    check += s.v[i];
  }
  forcing_.constrain_elastic(t1, s.u, s.v, s.a_e);

  subtract(ops_.absorbing_a, s.psi, f_a_, tmp_a_);
  subtract(ops_.stiffness_a, s.phi, f_a_, tmp_a_);
  subtract(ops_.coupling_a, s.v, f_a_, tmp_a_);
  for (std::size_t i = 0; i < f_a_.size(); ++i) {
    s.a_a[i] = f_a_[i] / ops_.mass_a[i];
    s.psi[i] += h * s.a_a[i];
    check += s.psi[i];
  }
  forcing_.constrain_acoustic(t1, s.phi, s.psi, s.a_a);

  s.step += 1;
  s.t = t1;
  if (!std::isfinite(check)) throw DivergenceError("non-finite solution at t = " + std::to_string(t1), s.step);
}

EnergyParts discrete_energy(const SystemOperators& ops, const SimState& s) {
  EnergyParts e;
  for (std::size_t i = 0; i < s.v.size(); ++i) e.elastic_kinetic += 0.5 * ops.mass_e[i] * s.v[i] * s.v[i];
  for (std::size_t i = 0; i < s.psi.size(); ++i) e.acoustic_kinetic += 0.5 * ops.mass_a[i] * s.psi[i] * s.psi[i];
  std::vector<double> tmp(s.u.size());
  if (ops.stiffness_e && !s.u.empty()) {
    ops.stiffness_e->apply(s.u, tmp);
    e.elastic_potential = 0.5 * dot(s.u, tmp);
  }
  tmp.resize(s.phi.size());
  if (ops.stiffness_a && !s.phi.empty()) {
    ops.stiffness_a->apply(s.phi, tmp);
    e.acoustic_potential = 0.5 * dot(s.phi, tmp);
  }
  return e;
}

double total_discrete_energy(const SystemOperators& ops, const SimState& state) {
  return discrete_energy(ops, state).total();
}

StableStep estimate_stable_dt(const LinearOperator& stiffness, std::span<const double> mass, double safety,
                              int max_iterations, double tolerance) {
  const std::size_t n = mass.size();
  StableStep out;
  if (n == 0) return out;
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) throw AssemblyError("mass matrix has a nonpositive diagonal entry");
    scale[i] = 1.0 / std::sqrt(mass[i]);
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  std::vector<double> y(n);
  std::vector<double> z(n);
  for (auto& v : x) v = dist(rng);
  double norm = std::sqrt(dot(x, x));
  for (auto& v : x) v /= norm;
  double lambda = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) z[i] = scale[i] * x[i];
    stiffness.apply(z, y);
    for (std::size_t i = 0; i < n; ++i) y[i] *= scale[i];
    const double next = dot(x, y);
    norm = std::sqrt(dot(y, y));
    out.iterations = it;
    if (norm == 0.0) {
      lambda = 0.0;
      out.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    if (it > 1 && std::abs(next - lambda) <= tolerance * std::abs(next)) {
      lambda = next;
      out.converged = true;
      break;
    }
    lambda = next;
  }
  out.lambda_max = lambda;
  out.dt = lambda > 0.0 ? safety * 2.0 / std::sqrt(lambda) : 0.0;
  return out;
}

StableStep estimate_stable_dt(const SystemOperators& ops, double safety, int max_iterations, double tolerance) {
  StableStep best;
  best.converged = true;
  bool any = false;
  auto consider = [&](const std::shared_ptr<const LinearOperator>& k, const std::shared_ptr<const LinearOperator>& s,
                      const std::vector<double>& m) {
    if (!k || m.empty()) return;
    StableStep step = estimate_stable_dt(*k, m, safety, max_iterations, tolerance);
    if (s) {
      const StableStep d = estimate_stable_dt(*s, m, safety, max_iterations, tolerance);
      step.iterations += d.iterations;
      step.converged = step.converged && d.converged;
      step.damping_rate = d.lambda_max;
      // Central differences with damping: dt <= (2 / w) (sqrt(1 + xi^2) - xi), xi = d / (2 w).
      const double w = std::sqrt(step.lambda_max);
      const double denom = std::sqrt(w * w + 0.25 * step.damping_rate * step.damping_rate) + 0.5 * step.damping_rate;
      step.dt = denom > 0.0 ? safety * 2.0 / denom : 0.0;
    }
    best.iterations += step.iterations;
    best.converged = best.converged && step.converged;
    if (!any || step.dt < best.dt) {
      best.lambda_max = step.lambda_max;
      best.damping_rate = step.damping_rate;
      best.dt = step.dt;
    }
    any = true;
  };
  consider(ops.stiffness_e, ops.absorbing_e, ops.mass_e);
  consider(ops.stiffness_a, ops.absorbing_a, ops.mass_a);
  if (!any) best.converged = false;
  return best;
}

}  // namespace elastowave
