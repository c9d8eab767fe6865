#include "elastowave/error.hpp"
#include "elastowave/time_integration.hpp"

#include "fixtures.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace ew = elastowave;
using ew::testing::all;
using ew::testing::box;

namespace {

std::shared_ptr<ew::CsrMatrix> scalar(double v) {
  return std::make_shared<ew::CsrMatrix>(ew::CsrMatrix::from_triplets(1, 1, {{0, 0, v}}));
}

ew::SystemOperators oscillator(double k) {
  ew::SystemOperators ops;
  ops.mass_e = {1.0};
  ops.stiffness_e = scalar(k);
  return ops;
}

/// One elastic and one acoustic DoF with C_e = 1 = -C_a.
ew::SystemOperators coupled_toy(double ke, double ka) {
  ew::SystemOperators ops;
  ops.mass_e = {1.0};
  ops.mass_a = {1.0};
  ops.stiffness_e = scalar(ke);
  ops.stiffness_a = scalar(ka);
  ops.coupling_e = scalar(1.0);
  ops.coupling_a = scalar(-1.0);
  return ops;
}

std::array<double, 6> pack(const ew::SimState& s) { return {s.u[0], s.v[0], s.a_e[0], s.phi[0], s.psi[0], s.a_a[0]}; }

}  // namespace

TEST(InitialAccelerations, ZeroDataGivesZero) {
  const auto d = ew::testing::discretize_mesh(ew::testing::split_mesh(2, 2), ew::testing::materials(), 2,
                                              all(ew::BoundaryCondition::Dirichlet));
  auto s = ew::SimState::zeros(d.elastic->size(), d.acoustic->size());
  ew::ZeroForcing f;
  ew::initial_accelerations(d.operators, f, s);
  for (double v : s.a_e) EXPECT_EQ(v, 0.0);
  for (double v : s.a_a) EXPECT_EQ(v, 0.0);
}

TEST(InitialAccelerations, ConstantDisplacementIsUnforced) {
  ew::MaterialTable t;
  t.elastic[1] = {2.0, 1.0, 1.0};
  const auto d = ew::testing::discretize_mesh(
      ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {2, 2, 2}, 1, ew::DomainKind::Elastic), t, 3,
      all(ew::BoundaryCondition::Neumann));
  auto s = ew::SimState::zeros(d.elastic->size(), 0);
  for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = i % 3 == 1 ? 0.7 : -0.2;
  ew::ZeroForcing f;
  ew::initial_accelerations(d.operators, f, s);
  for (double v : s.a_e) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(InitialAccelerations, ScalarToy) {
  const auto ops = oscillator(4.0);
  auto s = ew::SimState::zeros(1, 0);
  s.u[0] = 1.0;
  ew::ZeroForcing f;
  ew::initial_accelerations(ops, f, s);
  EXPECT_EQ(s.a_e[0], -4.0);
}

TEST(Predictors, Formulas) {
  auto s = ew::SimState::zeros(1, 1);
  s.u[0] = 1.0;
  ew::predictors(s, 0.1);
  EXPECT_EQ(s.u[0], 1.0);
  EXPECT_EQ(s.v[0], 0.0);

  s.v[0] = 2.0;
  s.a_e[0] = 4.0;
  s.psi[0] = 1.0;
  ew::predictors(s, 0.1);
  EXPECT_NEAR(s.u[0], 1.22, 1e-15);
  EXPECT_NEAR(s.v[0], 2.2, 1e-15);

  auto a = ew::SimState::zeros(0, 1);
  a.psi[0] = 1.0;
  ew::predictors(a, 0.5);
  EXPECT_EQ(a.phi[0], 0.5);
  EXPECT_EQ(a.psi[0], 1.0);
}

TEST(Newmark, OscillatorConservesEnergyOverOnePeriod) {
  const double w = 2.0 * std::numbers::pi;
  const auto ops = oscillator(w * w);
  ew::ZeroForcing f;
  auto s = ew::SimState::zeros(1, 0);
  s.u[0] = 1.0;
  ew::initial_accelerations(ops, f, s);
  ew::NewmarkStepper stepper(ops, f);
  auto energy = [&] { return 0.5 * (s.v[0] * s.v[0] + w * w * s.u[0] * s.u[0]); };
  const double e0 = energy();
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    stepper.step(s, 1e-3);
    worst = std::max(worst, std::abs(energy() - e0) / e0);
  }
  EXPECT_EQ(s.step, 1000u);
  EXPECT_NEAR(s.t, 1.0, 1e-12);
  EXPECT_LT(std::abs(energy() - e0) / e0, 1e-6);
  // Within a period the plain energy only breathes at order (w dt)^2.
  EXPECT_LT(worst, std::pow(w * 1e-3, 2));
  EXPECT_NEAR(s.u[0], std::cos(w), 1e-4);
}

TEST(Newmark, ZeroStateStaysZero) {
  const auto d = ew::testing::discretize_mesh(ew::testing::split_mesh(2, 2), ew::testing::materials(), 2,
                                              all(ew::BoundaryCondition::Dirichlet));
  auto s = ew::SimState::zeros(d.elastic->size(), d.acoustic->size());
  ew::ZeroForcing f;
  ew::NewmarkStepper stepper(d.operators, f);
  for (int n = 0; n < 20; ++n) stepper.step(s, 1e-3);
  for (const auto* v : {&s.u, &s.v, &s.a_e, &s.phi, &s.psi, &s.a_a})
    for (double x : *v) EXPECT_EQ(x, 0.0);
}

TEST(Newmark, CoupledToyIsStable) {
  const double ke = 9.0;
  const double ka = 4.0;
  const auto ops = coupled_toy(ke, ka);
  // Largest frequency of [[ke, 1], [-1, ka]] acting on (u, phi) after elimination is bounded by sqrt(ke) + 1.
  const double dt = 0.1 / (std::sqrt(ke) + 1.0);
  ew::ZeroForcing f;
  ew::NewmarkStepper stepper(ops, f);

  // Amplification matrix, one column per unit state.
  Eigen::Matrix<double, 6, 6> g;
  for (int j = 0; j < 6; ++j) {
    auto s = ew::SimState::zeros(1, 1);
    std::array<double*, 6> slots{&s.u[0], &s.v[0], &s.a_e[0], &s.phi[0], &s.psi[0], &s.a_a[0]};
    *slots[static_cast<std::size_t>(j)] = 1.0;
    stepper.step(s, dt);
    const auto col = pack(s);
    for (int i = 0; i < 6; ++i) g(i, j) = col[static_cast<std::size_t>(i)];
  }
  const double radius = g.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_LE(radius, 1.0 + 1e-12);

  auto s = ew::SimState::zeros(1, 1);
  s.u[0] = 1.0;
  s.psi[0] = 0.5;
  ew::initial_accelerations(ops, f, s);
  const double e0 = ew::total_discrete_energy(ops, s);
  double lo = e0;
  double hi = e0;
  for (int n = 0; n < 10000; ++n) {
    stepper.step(s, dt);
    const double e = ew::total_discrete_energy(ops, s);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_GT(lo, 0.95 * e0);
  EXPECT_LT(hi, 1.05 * e0);
}

TEST(Newmark, CoupledToyGrowthIsSecondOrderInDt) {
  const auto ops = coupled_toy(9.0, 4.0);
  ew::ZeroForcing f;
  ew::NewmarkStepper stepper(ops, f);
  auto radius = [&](double dt) {
    Eigen::Matrix<double, 6, 6> g;
    for (int j = 0; j < 6; ++j) {
      auto s = ew::SimState::zeros(1, 1);
      std::array<double*, 6> slots{&s.u[0], &s.v[0], &s.a_e[0], &s.phi[0], &s.psi[0], &s.a_a[0]};
      *slots[static_cast<std::size_t>(j)] = 1.0;
      stepper.step(s, dt);
      const auto col = pack(s);
      for (int i = 0; i < 6; ++i) g(i, j) = col[static_cast<std::size_t>(i)];
    }
    return g.eigenvalues().cwiseAbs().maxCoeff();
  };
  // Excess over one shrinks like dt^2, so growth over a fixed time vanishes with dt.
  const double a = radius(0.05) - 1.0;
  const double b = radius(0.025) - 1.0;
  const double c = radius(0.0125) - 1.0;
  EXPECT_NEAR(a / b, 4.0, 0.05);
  EXPECT_NEAR(b / c, 4.0, 0.05);
}

TEST(Newmark, DivergenceReportsStep) {
  const auto ops = oscillator(4.0);
  ew::ZeroForcing f;
  auto s = ew::SimState::zeros(1, 0);
  s.u[0] = 1.0;
  ew::initial_accelerations(ops, f, s);
  ew::NewmarkStepper stepper(ops, f);
  try {
    for (int n = 0; n < 10000; ++n) stepper.step(s, 10.0);
    FAIL() << "expected DivergenceError";
  } catch (const ew::DivergenceError& e) {
    EXPECT_GT(e.step(), 10u);
    EXPECT_LT(e.step(), 10000u);
  }
}

TEST(Newmark, DirichletNodesFollowModel) {
  const auto mat = ew::ElasticMaterial::from_velocities(2.7, 6.20, 3.12);
  const auto d = ew::testing::discretize_mesh(ew::testing::split_mesh(2, 2), ew::testing::materials(mat), 2,
                                              all(ew::BoundaryCondition::Dirichlet));
  auto model = std::make_shared<ew::VerificationModel>(mat, ew::AcousticMaterial{});
  ew::DiscreteForcing forcing(nullptr, d.elastic, d.acoustic, model);
  auto s = ew::interpolate_state(d, *model, 0.0);
  ew::initial_accelerations(d.operators, forcing, s);
  ew::NewmarkStepper stepper(d.operators, forcing);
  for (int n = 0; n < 5; ++n) stepper.step(s, 1e-3);
  for (int node : d.elastic->dirichlet_nodes) {
    const auto ex = model->elastic(d.elastic->node_coords[node], s.t);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(s.u[d.elastic->dof(node, c)], ex.u[c]);
      EXPECT_EQ(s.v[d.elastic->dof(node, c)], ex.v[c]);
    }
  }
  for (int node : d.acoustic->dirichlet_nodes) {
    const auto ex = model->acoustic(d.acoustic->node_coords[node], s.t);
    EXPECT_EQ(s.phi[node], ex.phi);
    EXPECT_EQ(s.psi[node], ex.phi_t);
  }
}

TEST(Energy, ScalarToy) {
  const auto ops = oscillator(4.0);
  auto s = ew::SimState::zeros(1, 0);
  EXPECT_EQ(ew::total_discrete_energy(ops, s), 0.0);
  s.u[0] = 1.0;
  s.v[0] = 2.0;
  EXPECT_EQ(ew::total_discrete_energy(ops, s), 4.0);
  const auto parts = ew::discrete_energy(ops, s);
  EXPECT_EQ(parts.elastic_kinetic, 2.0);
  EXPECT_EQ(parts.elastic_potential, 2.0);
  EXPECT_EQ(parts.acoustic(), 0.0);
}

TEST(StableStep, ScalarEstimate) {
  const auto ops = oscillator(4.0);
  const auto e = ew::estimate_stable_dt(ops);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.lambda_max, 4.0, 1e-12);
  EXPECT_NEAR(e.dt, 0.5, 1e-12);
  EXPECT_EQ(e.damping_rate, 0.0);
}

TEST(StableStep, DampingShrinksTheStep) {
  auto ops = oscillator(4.0);
  ops.absorbing_e = scalar(1.0);
  const auto e = ew::estimate_stable_dt(ops);
  EXPECT_NEAR(e.damping_rate, 1.0, 1e-12);
  EXPECT_NEAR(e.dt, 0.5 * 2.0 / (std::sqrt(4.25) + 0.5), 1e-12);
  // The damped scalar recursion is stable at twice that step minus a margin and unstable beyond it.
  ew::ZeroForcing f;
  auto run = [&](double dt) {
    auto s = ew::SimState::zeros(1, 0);
    s.u[0] = 1.0;
    ew::initial_accelerations(ops, f, s);
    ew::NewmarkStepper stepper(ops, f);
    for (int n = 0; n < 2000; ++n) stepper.step(s, dt);
    return std::abs(s.u[0]) + std::abs(s.v[0]);
  };
  EXPECT_LT(run(0.98 * e.dt / 0.5), 1.0);
  EXPECT_GT(run(1.05 * e.dt / 0.5), 1e3);
}

TEST(StableStep, ScalesWithMeshAndDegree) {
  auto estimate = [](int cells, int degree) {
    ew::MaterialTable t;
    t.acoustic[2] = {1.0, 1.0};
    const auto d = ew::testing::discretize_mesh(
        ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {cells, cells, cells}, 2, ew::DomainKind::Acoustic), t, degree,
        all(ew::BoundaryCondition::Neumann));
    return ew::estimate_stable_dt(d.operators, 0.5, 2000, 1e-8).dt;
  };
  const double coarse = estimate(3, 2);
  const double fine = estimate(6, 2);
  EXPECT_NEAR(fine / coarse, 0.5, 0.05);
  EXPECT_LT(estimate(3, 4), coarse);
}
