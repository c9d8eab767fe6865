#include "elastowave/dof_space.hpp"
#include "elastowave/error.hpp"
#include "elastowave/materials.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

namespace ew = elastowave;
using ew::testing::box;

namespace {

ew::HexMesh bar(int nx, ew::DomainKind kind) {
  return ew::build_box_mesh(box(0, 0, 0, nx, 1, 1), {nx, 1, 1}, 1, kind);
}

}  // namespace

TEST(Materials, WaveSpeedsOfUnitSolid) {
  const auto w = ew::wave_speeds({1.0, 1.0, 1.0});
  EXPECT_NEAR(w.p, std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(w.s, 1.0, 1e-15);
}

TEST(Materials, FromVelocities) {
  const auto rock = ew::ElasticMaterial::from_velocities(2700.0, 3000.0, 1734.0);
  EXPECT_NEAR(rock.p_modulus() / 2.43e10, 1.0, 1e-14);
  EXPECT_NEAR(rock.mu, 2700.0 * 1734.0 * 1734.0, 1e-3);
  EXPECT_NEAR(rock.mu / 8.118e9, 1.0, 1e-4);

  const auto v = ew::ElasticMaterial::from_velocities(2.7, 6.20, 3.12);
  EXPECT_NEAR(v.p_modulus(), 103.788, 1e-12);
  EXPECT_NEAR(v.mu, 26.28288, 1e-12);
  const auto w = ew::wave_speeds(v);
  EXPECT_NEAR(w.p, 6.20, 1e-14);
  EXPECT_NEAR(w.s, 3.12, 1e-14);
}

TEST(Materials, Validation) {
  EXPECT_NO_THROW(ew::validate(ew::ElasticMaterial{1.0, 1.0, 1.0}));
  EXPECT_THROW(ew::validate(ew::ElasticMaterial{-1.0, 1.0, 1.0}), ew::InvalidArgument);
  EXPECT_THROW(ew::validate(ew::ElasticMaterial{1.0, 1.0, 0.0}), ew::InvalidArgument);
  EXPECT_THROW(ew::validate(ew::ElasticMaterial{1.0, -3.0, 1.0}), ew::InvalidArgument);
  EXPECT_THROW(ew::validate(ew::AcousticMaterial{1.0, 0.0}), ew::InvalidArgument);
  EXPECT_THROW(ew::validate(ew::AcousticMaterial{0.0, 1.0}), ew::InvalidArgument);
}

TEST(Materials, MissingRegionIsAssemblyError) {
  const auto m = bar(1, ew::DomainKind::Elastic);
  ew::MaterialTable t;
  EXPECT_THROW(t.elastic_for(m, 0), ew::AssemblyError);
  t.elastic[1] = {};
  EXPECT_NO_THROW(t.elastic_for(m, 0));
}

TEST(ElasticSpace, DofCounts) {
  EXPECT_EQ(ew::build_elastic_space(bar(1, ew::DomainKind::Elastic), {{1, 2}}).size(), 81);
  EXPECT_EQ(ew::build_elastic_space(bar(2, ew::DomainKind::Elastic), {{1, 2}}).size(), 135);

  ew::HexMesh two = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  two.append(ew::build_box_mesh(box(1, 0, 0, 2, 1, 1), {1, 1, 1}, 2, ew::DomainKind::Elastic));
  const auto s = ew::build_elastic_space(two, {{1, 2}, {2, 2}});
  EXPECT_EQ(s.size(), 162);
  EXPECT_EQ(s.components, 3);
}

TEST(ElasticSpace, MixedDegreesPerRegion) {
  ew::HexMesh two = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  two.append(ew::build_box_mesh(box(1, 0, 0, 2, 1, 1), {2, 1, 1}, 2, ew::DomainKind::Elastic));
  const auto s = ew::build_elastic_space(two, {{1, 3}, {2, 1}});
  EXPECT_EQ(s.node_count(), 64 + 12);
}

TEST(AcousticSpace, DofCounts) {
  EXPECT_EQ(ew::build_acoustic_space(bar(1, ew::DomainKind::Acoustic), 2).size(), 27);
  EXPECT_EQ(ew::build_acoustic_space(bar(2, ew::DomainKind::Acoustic), 2).size(), 45);
  const auto cube = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {10, 10, 10}, 1, ew::DomainKind::Acoustic);
  EXPECT_EQ(ew::build_acoustic_space(cube, 1).size(), 1331);
}

TEST(DofSpace, SplitMeshKeepsDomainsApart) {
  const auto m = ew::testing::split_mesh(2, 3);
  const auto e = ew::build_elastic_space(m, {{1, 2}});
  const auto a = ew::build_acoustic_space(m, 2);
  EXPECT_EQ(e.node_count(), 5 * 5 * 5);
  EXPECT_EQ(a.node_count(), 7 * 7 * 7);
  EXPECT_EQ(e.element_count(), 8);
  EXPECT_EQ(a.element_count(), 27);
  for (int el = 0; el < static_cast<int>(m.elements.size()); ++el) {
    const bool elastic = m.kind_of(el) == ew::DomainKind::Elastic;
    EXPECT_EQ(e.local_of[el] >= 0, elastic);
    EXPECT_EQ(a.local_of[el] >= 0, !elastic);
  }
}

TEST(DofSpace, PolynomialInterpolationIsExact) {
  const auto m = ew::build_box_mesh(box(0, -1, 0, 2, 1, 0.5), {2, 3, 2}, 1, ew::DomainKind::Elastic);
  for (int n = 1; n <= 4; ++n) {
    const auto s = ew::build_elastic_space(m, {{1, n}});
    auto poly = [n](const ew::Vec3& x, int c) {
      return std::pow(x[0], n) - (c + 1) * std::pow(x[1], n - 1) * x[2] + 0.5 * x[2] + c;
    };
    const auto coeffs = ew::interpolate(s, [&](const ew::Vec3& x, std::span<double> out) {
      for (int c = 0; c < 3; ++c) out[c] = poly(x, c);
    });
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int se = 0; se < s.element_count(); ++se) {
      const int el = s.elements[se];
      for (int trial = 0; trial < 10; ++trial) {
        const ew::Vec3 ref(u(rng), u(rng), u(rng));
        const ew::Vec3 x = ew::geometry_map(m, el, ref).x;
        double vals[3];
        ew::evaluate(m, s, coeffs, se, ref, vals);
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(vals[c], poly(x, c), 1e-10);
      }
    }
  }
}

TEST(DofSpace, GradientOfLinearField) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 2, 1, 1), {2, 3, 1}, 1, ew::DomainKind::Acoustic);
  const auto s = ew::build_acoustic_space(m, 3);
  const auto c = ew::interpolate(s, [](const ew::Vec3& x, std::span<double> out) { out[0] = 2 * x[0] - x[1] + 3 * x[2]; });
  double v = 0.0;
  double g[3];
  ew::evaluate(m, s, c, 4, ew::Vec3(0.2, 0.3, -0.6), std::span<double>(&v, 1), g);
  EXPECT_NEAR(g[0], 2.0, 1e-12);
  EXPECT_NEAR(g[1], -1.0, 1e-12);
  EXPECT_NEAR(g[2], 3.0, 1e-12);
}

TEST(DofSpace, DirichletNodesLieOnTaggedFaces) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {3, 3, 3}, 1, ew::DomainKind::Elastic);
  std::vector<ew::FaceRef> faces;
  for (int e = 0; e < 27; ++e)
    if (m.corner(e, 0)[0] == 0.0) faces.push_back({e, 0});
  const auto s = ew::build_elastic_space(m, {{1, 3}}, faces);
  std::set<int> expected;
  for (int n = 0; n < s.node_count(); ++n)
    if (std::abs(s.node_coords[n][0]) < 1e-14) expected.insert(n);
  EXPECT_EQ(expected.size(), 10u * 10u);
  EXPECT_EQ(std::set<int>(s.dirichlet_nodes.begin(), s.dirichlet_nodes.end()), expected);
  EXPECT_TRUE(std::is_sorted(s.dirichlet_nodes.begin(), s.dirichlet_nodes.end()));
}

TEST(DofSpace, FaceNodesAndIncidence) {
  const auto m = bar(2, ew::DomainKind::Acoustic);
  const auto s = ew::build_acoustic_space(m, 2);
  const auto left = ew::face_nodes(s, 0, 1);
  const auto right = ew::face_nodes(s, 1, 0);
  EXPECT_EQ(left, right);
  for (int n : left) {
    EXPECT_NEAR(s.node_coords[n][0], 1.0, 1e-15);
    EXPECT_EQ(s.incidence_offset[n + 1] - s.incidence_offset[n], 2u);
  }
}

TEST(DofSpace, PointWeightsSnapToNodes) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {2, 2, 2}, 1, ew::DomainKind::Elastic);
  const auto s = ew::build_elastic_space(m, {{1, 2}});
  const auto w = ew::point_weights(m, s, ew::Vec3(0.25, 0.5, 0.75));
  ASSERT_TRUE(w.has_value());
  ASSERT_EQ(w->size(), 1u);
  EXPECT_EQ(w->front().second, 1.0);
  EXPECT_NEAR((s.node_coords[w->front().first] - ew::Vec3(0.25, 0.5, 0.75)).norm(), 0.0, 1e-15);

  const auto off = ew::point_weights(m, s, ew::Vec3(0.3, 0.41, 0.77));
  ASSERT_TRUE(off.has_value());
  double sum = 0.0;
  for (const auto& [n, v] : *off) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_FALSE(ew::point_weights(m, s, ew::Vec3(1.5, 0.5, 0.5)).has_value());
}
