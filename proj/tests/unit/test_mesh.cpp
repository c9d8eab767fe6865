#include "elastowave/error.hpp"
#include "elastowave/mesh.hpp"
#include "elastowave/spectral_basis.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace ew = elastowave;
using ew::testing::box;

namespace {

double mesh_volume(const ew::HexMesh& m) {
  const auto g = ew::gauss_legendre_rule(3);
  double v = 0.0;
  for (int e = 0; e < static_cast<int>(m.elements.size()); ++e)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
          const ew::Vec3 ref(g.nodes[i], g.nodes[j], g.nodes[k]);
          v += g.weights[i] * g.weights[j] * g.weights[k] * ew::geometry_map(m, e, ref).det;
        }
  return v;
}

const char* kCube = R"(REGION 1 ELASTIC
NODES 8
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
5 0 0 1
6 1 0 1
7 1 1 1
8 0 1 1
HEX 1
10 1 1 2 3 4 5 6 7 8
)";

}  // namespace

TEST(BoxMesh, UnitCubeFiveCubed) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {5, 5, 5}, 1, ew::DomainKind::Elastic);
  EXPECT_EQ(m.elements.size(), 125u);
  for (int e = 0; e < 125; ++e) EXPECT_NEAR(ew::element_size(m, e), 0.2, 1e-14);
}

TEST(BoxMesh, VerificationElasticBlock) {
  const auto m = ew::build_box_mesh(box(-1, 0, 0, 0, 1, 1), {10, 10, 10}, 1, ew::DomainKind::Elastic);
  EXPECT_EQ(m.elements.size(), 1000u);
  EXPECT_NEAR(ew::element_size(m, 0), 0.1, 1e-14);
  EXPECT_NEAR(mesh_volume(m), 1.0, 1e-10);
}

TEST(BoxMesh, ScholteColumnWith2400Elements) {
  const auto m = ew::build_box_mesh(box(-1, -1, -20, 1, 1, 20), {5, 5, 96}, 1, ew::DomainKind::Elastic);
  EXPECT_EQ(m.elements.size(), 2400u);
  EXPECT_NEAR(mesh_volume(m), 160.0, 1e-9);
}

TEST(BoxMesh, ZeroSubdivisionRejected) {
  EXPECT_THROW(ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {0, 1, 1}, 1, ew::DomainKind::Elastic),
               ew::InvalidArgument);
}

TEST(BoxMesh, HoleRemovesAlignedCells) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 3, 3, 3), {3, 3, 3}, 1, ew::DomainKind::Elastic,
                                    box(1, 1, 1, 2, 2, 2));
  EXPECT_EQ(m.elements.size(), 26u);
  EXPECT_NEAR(mesh_volume(m), 26.0, 1e-10);
  EXPECT_THROW(ew::build_box_mesh(box(0, 0, 0, 3, 3, 3), {3, 3, 3}, 1, ew::DomainKind::Elastic,
                                  box(0.5, 1, 1, 2, 2, 2)),
               ew::GeometryError);
}

TEST(GeometryMap, UnitCubeElement) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  const auto c = ew::geometry_map(m, 0, ew::Vec3::Zero());
  EXPECT_NEAR((c.x - ew::Vec3(0.5, 0.5, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(c.det, 0.125, 1e-15);
  const auto v0 = ew::geometry_map(m, 0, ew::Vec3(-1, -1, -1));
  EXPECT_EQ(v0.x, m.corner(0, 0));
}

TEST(GeometryMap, StretchedBox) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 2, 1, 1), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  for (const auto& ref : {ew::Vec3(0.3, -0.7, 0.1), ew::Vec3(-1, 1, 0.5)}) {
    const auto g = ew::geometry_map(m, 0, ref);
    EXPECT_NEAR(g.det, 0.25, 1e-15);
    EXPECT_NEAR(g.jacobian(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(g.jacobian(1, 1), 0.5, 1e-15);
  }
}

TEST(GeometryMap, InverseMapRoundTrip) {
  auto m = ew::build_box_mesh(box(0, 0, 0, 1, 1, 1), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  m.vertices[static_cast<std::size_t>(m.elements[0].vertices[7])] += ew::Vec3(0.2, 0.1, 0.15);
  const ew::Vec3 ref(0.2, -0.4, 0.6);
  const auto x = ew::geometry_map(m, 0, ref).x;
  const auto back = ew::inverse_map(m, 0, x);
  ASSERT_TRUE(back.has_value());
  EXPECT_NEAR((*back - ref).norm(), 0.0, 1e-10);
  EXPECT_FALSE(ew::inverse_map(m, 0, ew::Vec3(3, 3, 3)).has_value());
}

TEST(FaceGeometry, OutwardNormalsAndAreas) {
  const auto m = ew::build_box_mesh(box(0, 0, 0, 2, 1, 0.5), {1, 1, 1}, 1, ew::DomainKind::Elastic);
  const double areas[] = {0.5, 0.5, 1.0, 1.0, 2.0, 2.0};
  for (int f = 0; f < 6; ++f) {
    const ew::FaceRef face{0, f};
    const auto p = ew::face_geometry(m, face, ew::Vec2(0.1, -0.3));
    ew::Vec3 n = ew::Vec3::Zero();
    n[ew::face_axis(f)] = ew::face_side(f) == 0 ? -1.0 : 1.0;
    EXPECT_NEAR((p.normal - n).norm(), 0.0, 1e-14);
    EXPECT_NEAR(ew::face_area(m, face), areas[f], 1e-13);
    const auto st = ew::inverse_face_map(m, face, p.x);
    EXPECT_NEAR((st - ew::Vec2(0.1, -0.3)).norm(), 0.0, 1e-12);
  }
}

TEST(ImportMesh, SingleCube) {
  std::istringstream in(kCube);
  const auto m = ew::import_mesh(in);
  ASSERT_EQ(m.elements.size(), 1u);
  EXPECT_EQ(m.elements[0].external_id, 10);
  EXPECT_EQ(m.regions.size(), 1u);
  EXPECT_NEAR(ew::geometry_map(m, 0, ew::Vec3::Zero()).det, 0.125, 1e-15);
  EXPECT_NEAR((m.corner(0, 7) - ew::Vec3(1, 1, 1)).norm(), 0.0, 0.0);
}

TEST(ImportMesh, DuplicateNodeIsParseError) {
  std::string text(kCube);
  text.replace(text.find("2 1 0 0"), 1, "1");
  std::istringstream in(text);
  try {
    ew::import_mesh(in);
    FAIL() << "expected ParseError";
  } catch (const ew::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ImportMesh, InvertedElementNamesElement) {
  std::string text(kCube);
  text.replace(text.find("10 1 1 2 3 4 5 6 7 8"), 20, "10 1 5 6 7 8 1 2 3 4");
  std::istringstream in(text);
  try {
    ew::import_mesh(in);
    FAIL() << "expected GeometryError";
  } catch (const ew::GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
  }
}

TEST(ImportMesh, MalformedLinesReportLineNumbers) {
  std::string text(kCube);
  text.replace(text.find("3 1 1 0"), 7, "3 1 x 0");
  std::istringstream in(text);
  try {
    ew::import_mesh(in);
    FAIL() << "expected ParseError";
  } catch (const ew::ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  std::istringstream tag(std::string(kCube) + "FACES 1\n10 0 XYZ\n");
  EXPECT_THROW(ew::import_mesh(tag), ew::ParseError);
}

TEST(ImportMesh, ExportRoundTrip) {
  auto m = ew::testing::split_mesh(2, 3);
  m.face_tags[{0, 0}] = ew::BoundaryCondition::Absorbing;
  std::stringstream s;
  ew::export_mesh(m, s);
  const auto back = ew::import_mesh(s);
  ASSERT_EQ(back.elements.size(), m.elements.size());
  ASSERT_EQ(back.regions.size(), 2u);
  EXPECT_EQ(back.face_tags.size(), 1u);
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    EXPECT_EQ(back.kind_of(static_cast<int>(e)), m.kind_of(static_cast<int>(e)));
    for (int c = 0; c < 8; ++c) EXPECT_EQ(back.corner(static_cast<int>(e), c), m.corner(static_cast<int>(e), c));
  }
}
