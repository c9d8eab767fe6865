#pragma once

#include "elastowave/types.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace elastowave {

struct Region {
  int id = 0;
  DomainKind kind = DomainKind::Elastic;
  int degree = 0;  ///< 0 until a discretization assigns one
};

/// Trilinear hexahedron. Corner c = i + 2j + 4k sits at reference point
/// (2i-1, 2j-1, 2k-1).
struct HexElement {
  std::array<int, 8> vertices{};
  int region = 0;       ///< index into HexMesh::regions
  int external_id = 0;  ///< id used in files and error messages
};

/// Local faces: 0:-x 1:+x 2:-y 3:+y 4:-z 5:+z in reference coordinates.
struct FaceRef {
  int element = 0;
  int local_face = 0;
  auto operator<=>(const FaceRef&) const = default;
};

inline int face_axis(int local_face) { return local_face / 2; }
inline int face_side(int local_face) { return local_face % 2; }
/// The two tangential reference axes of a face, in increasing order.
std::array<int, 2> face_tangent_axes(int local_face);
/// Reference point of face parameters (s, t) on the given local face.
Vec3 face_to_reference(int local_face, const Vec2& st);
/// The four element corners of a face, ordered (s,t) = (-,-), (+,-), (-,+), (+,+).
std::array<int, 4> face_corners(int local_face);

struct Box {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Ones();

  bool operator==(const Box& o) const { return lower == o.lower && upper == o.upper; }
};

struct HexMesh {
  std::vector<Vec3> vertices;
  std::vector<HexElement> elements;
  std::vector<Region> regions;
  /// Boundary condition tags attached to outer faces.
  std::map<FaceRef, BoundaryCondition> face_tags;

  int region_index(int id) const;  ///< -1 when absent
  const Region& region_of(int element) const { return regions[static_cast<std::size_t>(elements[static_cast<std::size_t>(element)].region)]; }
  DomainKind kind_of(int element) const { return region_of(element).kind; }

  /// Adds all elements of `fragment`; vertices are not merged, regions with
  /// equal ids are unified.
  void append(const HexMesh& fragment);

  Box bounding_box() const;
  double diameter() const;

  Vec3 corner(int element, int c) const {
    return vertices[static_cast<std::size_t>(elements[static_cast<std::size_t>(element)].vertices[static_cast<std::size_t>(c)])];
  }
};

struct GeometryPoint {
  Vec3 x;
  Mat3 jacobian;  ///< jacobian(a, d) = dx_a / dxi_d
  double det = 0.0;
};

/// Trilinear map of an element at a reference point. Throws GeometryError when
/// the Jacobian determinant is not positive.
GeometryPoint geometry_map(const HexMesh& mesh, int element, const Vec3& ref);
/// Same without the sign check.
GeometryPoint geometry_map_unchecked(const HexMesh& mesh, int element, const Vec3& ref);

/// Newton inversion of the trilinear map; nullopt when the point is outside
/// (beyond `tolerance` in reference coordinates) or Newton fails.
std::optional<Vec3> inverse_map(const HexMesh& mesh, int element, const Vec3& x, double tolerance = 1e-10);

struct FacePoint {
  Vec3 x;
  Vec3 normal;         ///< unit outward normal of the element
  double area_scale;   ///< |dx/ds x dx/dt|
};
FacePoint face_geometry(const HexMesh& mesh, const FaceRef& face, const Vec2& st);
/// Least-squares inversion of the bilinear face map.
Vec2 inverse_face_map(const HexMesh& mesh, const FaceRef& face, const Vec3& x);
double face_area(const HexMesh& mesh, const FaceRef& face);
/// Longest element edge.
double element_size(const HexMesh& mesh, int element);

/// Structured axis-aligned hexahedra. Cells whose centroid falls inside
/// `hole` are skipped; the hole must align with the grid planes.
HexMesh build_box_mesh(const Box& box, const std::array<int, 3>& subdivisions, int region_id,
                       DomainKind kind, const std::optional<Box>& hole = std::nullopt);

/// Line-oriented ASCII mesh. Throws ParseError (with line) or GeometryError.
HexMesh import_mesh(std::istream& in);
void export_mesh(const HexMesh& mesh, std::ostream& out);

/// Checks that every element has positive Jacobian at its corners and centre.
void validate_geometry(const HexMesh& mesh);

}  // namespace elastowave
