#pragma once

#include "elastowave/mesh.hpp"
#include "elastowave/spectral_basis.hpp"

#include <map>
#include <memory>
#include <span>
#include <vector>

namespace elastowave {

/// Nodal layout of one domain. Element-local nodes are lexicographic,
/// local index = a + (N+1) (b + (N+1) c) for GLL indices (a, b, c) along
/// (xi, eta, zeta). Global DoF = node * components + component.
struct DofSpace {
  DomainKind kind = DomainKind::Elastic;
  int components = 3;

  /// Mesh elements of this domain in DoF order (region-major).
  std::vector<int> elements;
  std::vector<int> degree;                  ///< per space element
  std::vector<std::size_t> node_offset;     ///< start of each element in `element_nodes`, size elements+1
  std::vector<int> element_nodes;           ///< local node -> global node
  std::vector<int> local_of;                ///< mesh element -> space element, -1 outside

  std::vector<Vec3> node_coords;
  std::vector<int> node_region;             ///< region index of each node

  /// Geometry at GLL points, laid out like `element_nodes`.
  std::vector<double> det_jacobian;
  std::vector<double> inv_jacobian;         ///< 9 per point, (d, a) = d xi_d / d x_a

  /// Node -> positions in `element_nodes` (CSR), in increasing position order.
  std::vector<std::size_t> incidence_offset;
  std::vector<std::size_t> incidence;

  std::vector<int> dirichlet_nodes;         ///< sorted, unique

  std::map<int, std::shared_ptr<const QuadratureRule1D>> rules;

  int node_count() const { return static_cast<int>(node_coords.size()); }
  int size() const { return node_count() * components; }
  int element_count() const { return static_cast<int>(elements.size()); }
  int dof(int node, int component) const { return node * components + component; }
  const QuadratureRule1D& rule_of(int space_element) const {
    return *rules.at(degree[static_cast<std::size_t>(space_element)]);
  }
  std::span<const int> nodes_of(int space_element) const {
    const auto b = node_offset[static_cast<std::size_t>(space_element)];
    const auto e = node_offset[static_cast<std::size_t>(space_element) + 1];
    return {element_nodes.data() + b, e - b};
  }
};

/// Vector space, continuous inside each elastic region and independent
/// across regions. `degrees` maps region id to N; regions absent from the
/// map use the region's own `degree`. Faces listed in `dirichlet` mark
/// their nodes as Dirichlet nodes.
DofSpace build_elastic_space(const HexMesh& mesh, const std::map<int, int>& degrees,
                             std::span<const FaceRef> dirichlet = {});

/// Scalar space, continuous over every acoustic element.
DofSpace build_acoustic_space(const HexMesh& mesh, int degree, std::span<const FaceRef> dirichlet = {});

/// Nodes of the given face of a space element, as global node numbers.
std::vector<int> face_nodes(const DofSpace& space, int space_element, int local_face);

/// Nodal interpolation of `f` (components values per call).
template <typename F>
std::vector<double> interpolate(const DofSpace& space, F&& f) {
  std::vector<double> out(static_cast<std::size_t>(space.size()), 0.0);
  for (int n = 0; n < space.node_count(); ++n) {
    f(space.node_coords[static_cast<std::size_t>(n)], std::span<double>(out.data() + static_cast<std::size_t>(n) * static_cast<std::size_t>(space.components),
                                                       static_cast<std::size_t>(space.components)));
  }
  return out;
}

/// Evaluates a discrete field at a reference point of a space element.
/// `values` receives `components` entries; `gradient` (optional) receives
/// components x 3 physical derivatives, row-major.
void evaluate(const HexMesh& mesh, const DofSpace& space, std::span<const double> coeffs, int space_element,
              const Vec3& ref, std::span<double> values, std::span<double> gradient = {});

/// Space element containing x and its reference coordinates; nullopt when
/// x lies outside every element of the space.
std::optional<std::pair<int, Vec3>> locate(const HexMesh& mesh, const DofSpace& space, const Vec3& x);

/// Basis weights of the nodes of the element containing x, zeros dropped.
/// Reference coordinates within 1e-12 of a GLL node snap to it, so nodal
/// points give a single weight of exactly 1.
std::optional<std::vector<std::pair<int, double>>> point_weights(const HexMesh& mesh, const DofSpace& space,
                                                                  const Vec3& x);

}  // namespace elastowave
