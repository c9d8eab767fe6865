#pragma once

#include "elastowave/mesh.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace elastowave {

struct MortarPoint {
  Vec3 x;
  double weight = 0.0;  ///< physical surface weight
  Vec2 first_ref;       ///< face parameters on the first face
  Vec2 second_ref;      ///< face parameters on the second face
  Vec3 normal;          ///< unit outward normal of the first face
};

/// Quadrature on the geometric intersection of two faces that belong to
/// different conformity groups (elastic-acoustic, or two elastic regions).
struct MortarPair {
  FaceRef first;
  FaceRef second;
  std::vector<MortarPoint> points;

  double area() const;
};

/// Conditions for outer faces that carry no tag in the mesh. `sides` index
/// the bounding-box planes xmin, xmax, ymin, ymax, zmin, zmax.
struct BoundarySpec {
  std::optional<BoundaryCondition> default_condition;
  std::array<std::optional<BoundaryCondition>, 6> sides{};

  bool operator==(const BoundarySpec&) const = default;
};

struct FaceSets {
  /// Outer faces of each domain, indexed by BoundaryCondition.
  std::array<std::vector<FaceRef>, 3> elastic;
  std::array<std::vector<FaceRef>, 3> acoustic;
  /// Elasto-acoustic interface; `first` is always the elastic face.
  std::vector<MortarPair> interface;
  /// Faces between different elastic regions; `first` has the lower region index.
  std::vector<MortarPair> elastic_internal;

  const std::vector<FaceRef>& boundary(DomainKind kind, BoundaryCondition bc) const {
    return kind == DomainKind::Elastic ? elastic[static_cast<std::size_t>(bc)] : acoustic[static_cast<std::size_t>(bc)];
  }
};

/// Splits every element face into interior, outer boundary (tagged from the
/// mesh, then `spec`), elasto-acoustic interface or elastic region interface.
/// `quad_order` <= 0 selects max(N_first, N_second) + 1 Gauss points per
/// direction on each mortar intersection (region degrees, at least 1).
FaceSets classify_faces(const HexMesh& mesh, const BoundarySpec& spec, int quad_order = 0);

/// Pairs two face collections. Coincident faces of any shape are paired
/// one-to-one; the rest must be axis-aligned rectangles, intersected per
/// tangential axis. Throws GeometryError for faces that are neither.
std::vector<MortarPair> build_interface_pairs(const HexMesh& mesh, std::span<const FaceRef> first,
                                              std::span<const FaceRef> second, int quad_order);

/// Every face is interior, in exactly one boundary set, or fully covered by
/// mortar pairs. Throws ClassificationError otherwise.
void validate_face_sets(const HexMesh& mesh, const FaceSets& sets);

}  // namespace elastowave
