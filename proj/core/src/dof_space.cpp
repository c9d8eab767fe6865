#include "elastowave/dof_space.hpp"

#include "elastowave/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace elastowave {

namespace {

using NodeKey = std::array<long long, 6>;

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (long long v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Key identifying a GLL node by the mesh entity it lies on, independent of
/// which element of a conforming group enumerates it.
NodeKey node_key(const HexElement& element, int element_index, int n, const std::array<int, 3>& idx) {
  std::array<int, 3> bit{};
  int on_boundary = 0;
  for (int d = 0; d < 3; ++d) {
    if (idx[static_cast<std::size_t>(d)] == 0 || idx[static_cast<std::size_t>(d)] == n) ++on_boundary;
    bit[static_cast<std::size_t>(d)] = idx[static_cast<std::size_t>(d)] == n ? 1 : 0;
  }
  auto vid = [&](int i, int j, int k) { return static_cast<long long>(element.vertices[static_cast<std::size_t>(i + 2 * j + 4 * k)]); };

  if (on_boundary == 3) return {0, vid(bit[0], bit[1], bit[2]), 0, 0, 0, 0};

  if (on_boundary == 2) {
    int free = 0;
    for (int d = 0; d < 3; ++d) {
      if (idx[static_cast<std::size_t>(d)] != 0 && idx[static_cast<std::size_t>(d)] != n) free = d;
    }
    auto lo = bit;
    auto hi = bit;
    lo[static_cast<std::size_t>(free)] = 0;
    hi[static_cast<std::size_t>(free)] = 1;
    const long long va = vid(lo[0], lo[1], lo[2]);
    const long long vb = vid(hi[0], hi[1], hi[2]);
    const int p = idx[static_cast<std::size_t>(free)];
    return va < vb ? NodeKey{1, va, vb, p, 0, 0} : NodeKey{1, vb, va, n - p, 0, 0};
  }

  if (on_boundary == 1) {
    int axis = 0;
    for (int d = 0; d < 3; ++d) {
      if (idx[static_cast<std::size_t>(d)] == 0 || idx[static_cast<std::size_t>(d)] == n) axis = d;
    }
    const int local_face = 2 * axis + bit[static_cast<std::size_t>(axis)];
    const auto t = face_tangent_axes(local_face);
    const auto corners = face_corners(local_face);
    long long v[2][2];
    for (int sb = 0; sb < 2; ++sb) {
      for (int tb = 0; tb < 2; ++tb) v[sb][tb] = element.vertices[static_cast<std::size_t>(corners[static_cast<std::size_t>(sb + 2 * tb)])];
    }
    int s0 = 0;
    int t0 = 0;
    for (int sb = 0; sb < 2; ++sb) {
      for (int tb = 0; tb < 2; ++tb) {
        if (v[sb][tb] < v[s0][t0]) {
          s0 = sb;
          t0 = tb;
        }
      }
    }
    const int p = idx[static_cast<std::size_t>(t[0])];
    const int q = idx[static_cast<std::size_t>(t[1])];
    const int ds = s0 == 0 ? p : n - p;
    const int dt = t0 == 0 ? q : n - q;
    const long long adj_s = v[1 - s0][t0];
    const long long adj_t = v[s0][1 - t0];
    if (adj_s < adj_t) return {2, v[s0][t0], adj_s, adj_t, ds, dt};
    return {2, v[s0][t0], adj_t, adj_s, dt, ds};
  }

  return {3, element_index, idx[0], idx[1], idx[2], 0};
}

struct Group {
  std::vector<int> elements;
  int degree = 1;
  int region = 0;  // region index for node_region
};

DofSpace build_space(const HexMesh& mesh, DomainKind kind, const std::vector<std::vector<Group>>& groups,
                     std::span<const FaceRef> dirichlet) {
  DofSpace space;
  space.kind = kind;
  space.components = kind == DomainKind::Elastic ? 3 : 1;
  space.local_of.assign(mesh.elements.size(), -1);
  space.node_offset.push_back(0);

  std::unordered_map<NodeKey, int, NodeKeyHash> ids;
  for (const auto& conformity_group : groups) {
    ids.clear();
    for (const auto& g : conformity_group) {
      if (g.degree < 1) throw InvalidArgument("polynomial degree must be >= 1, got " + std::to_string(g.degree));
      if (!space.rules.count(g.degree)) space.rules[g.degree] = shared_gll_rule(g.degree);
      const auto& rule = *space.rules[g.degree];
      const int n = g.degree;
      const int np = n + 1;
      for (int e : g.elements) {
        const auto& element = mesh.elements[static_cast<std::size_t>(e)];
        space.local_of[static_cast<std::size_t>(e)] = static_cast<int>(space.elements.size());
        space.elements.push_back(e);
        space.degree.push_back(n);
        for (int c = 0; c < np; ++c) {
          for (int b = 0; b < np; ++b) {
            for (int a = 0; a < np; ++a) {
              const NodeKey key = node_key(element, e, n, {a, b, c});
              auto [it, inserted] = ids.try_emplace(key, space.node_count());
              const Vec3 ref(rule.nodes[static_cast<std::size_t>(a)], rule.nodes[static_cast<std::size_t>(b)],
                             rule.nodes[static_cast<std::size_t>(c)]);
              const GeometryPoint gp = geometry_map(mesh, e, ref);
              if (inserted) {
                space.node_coords.push_back(gp.x);
                space.node_region.push_back(g.region);
              }
              space.element_nodes.push_back(it->second);
              space.det_jacobian.push_back(gp.det);
              const Mat3 inv = gp.jacobian.inverse();
              for (int d = 0; d < 3; ++d) {
                for (int x = 0; x < 3; ++x) space.inv_jacobian.push_back(inv(d, x));
              }
            }
          }
        }
        space.node_offset.push_back(space.element_nodes.size());
      }
    }
  }

  const auto nodes = static_cast<std::size_t>(space.node_count());
  space.incidence_offset.assign(nodes + 1, 0);
  for (int node : space.element_nodes) ++space.incidence_offset[static_cast<std::size_t>(node) + 1];
  for (std::size_t i = 0; i < nodes; ++i) space.incidence_offset[i + 1] += space.incidence_offset[i];
  space.incidence.resize(space.element_nodes.size());
  std::vector<std::size_t> fill(space.incidence_offset.begin(), space.incidence_offset.end() - 1);
  for (std::size_t pos = 0; pos < space.element_nodes.size(); ++pos) {
    space.incidence[fill[static_cast<std::size_t>(space.element_nodes[pos])]++] = pos;
  }

  for (const auto& f : dirichlet) {
    const int se = space.local_of[static_cast<std::size_t>(f.element)];
    if (se < 0) continue;
    const auto fn = face_nodes(space, se, f.local_face);
    space.dirichlet_nodes.insert(space.dirichlet_nodes.end(), fn.begin(), fn.end());
  }
  std::sort(space.dirichlet_nodes.begin(), space.dirichlet_nodes.end());
  space.dirichlet_nodes.erase(std::unique(space.dirichlet_nodes.begin(), space.dirichlet_nodes.end()),
                              space.dirichlet_nodes.end());
  return space;
}

}  // namespace

DofSpace build_elastic_space(const HexMesh& mesh, const std::map<int, int>& degrees, std::span<const FaceRef> dirichlet) {
  std::vector<std::vector<Group>> groups;
  for (int r = 0; r < static_cast<int>(mesh.regions.size()); ++r) {
    const auto& region = mesh.regions[static_cast<std::size_t>(r)];
    if (region.kind != DomainKind::Elastic) continue;
    Group g;
    g.region = r;
    auto it = degrees.find(region.id);
    g.degree = it != degrees.end() ? it->second : region.degree;
    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
      if (mesh.elements[static_cast<std::size_t>(e)].region == r) g.elements.push_back(e);
    }
    if (!g.elements.empty()) groups.push_back({g});
  }
  return build_space(mesh, DomainKind::Elastic, groups, dirichlet);
}

DofSpace build_acoustic_space(const HexMesh& mesh, int degree, std::span<const FaceRef> dirichlet) {
  std::vector<Group> group;
  for (int r = 0; r < static_cast<int>(mesh.regions.size()); ++r) {
    if (mesh.regions[static_cast<std::size_t>(r)].kind != DomainKind::Acoustic) continue;
    Group g;
    g.region = r;
    g.degree = degree;
    for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
      if (mesh.elements[static_cast<std::size_t>(e)].region == r) g.elements.push_back(e);
    }
    if (!g.elements.empty()) group.push_back(g);
  }
  std::vector<std::vector<Group>> groups;
  if (!group.empty()) groups.push_back(group);
  return build_space(mesh, DomainKind::Acoustic, groups, dirichlet);
}

std::vector<int> face_nodes(const DofSpace& space, int space_element, int local_face) {
  const int n = space.degree[static_cast<std::size_t>(space_element)];
  const int np = n + 1;
  const int axis = face_axis(local_face);
  const int fixed = face_side(local_face) == 1 ? n : 0;
  const auto t = face_tangent_axes(local_face);
  const auto nodes = space.nodes_of(space_element);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(np * np));
  for (int q = 0; q < np; ++q) {
    for (int p = 0; p < np; ++p) {
      std::array<int, 3> idx{};
      idx[static_cast<std::size_t>(axis)] = fixed;
      idx[static_cast<std::size_t>(t[0])] = p;
      idx[static_cast<std::size_t>(t[1])] = q;
      out.push_back(nodes[static_cast<std::size_t>(idx[0] + np * (idx[1] + np * idx[2]))]);
    }
  }
  return out;
}

void evaluate(const HexMesh& mesh, const DofSpace& space, std::span<const double> coeffs, int space_element,
              const Vec3& ref, std::span<double> values, std::span<double> gradient) {
  const auto& rule = space.rule_of(space_element);
  const int np = rule.size();
  const int nc = space.components;
  std::vector<double> l[3];
  std::vector<double> dl[3];
  for (int d = 0; d < 3; ++d) {
    l[d].resize(static_cast<std::size_t>(np));
    dl[d].resize(static_cast<std::size_t>(np));
    lagrange_all(rule, ref[d], l[d], dl[d]);
  }
  const auto nodes = space.nodes_of(space_element);
  std::fill(values.begin(), values.end(), 0.0);
  std::vector<double> gref(static_cast<std::size_t>(3 * nc), 0.0);
  for (int c = 0; c < np; ++c) {
    for (int b = 0; b < np; ++b) {
      for (int a = 0; a < np; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        const auto ib = static_cast<std::size_t>(b);
        const auto ic = static_cast<std::size_t>(c);
        const double v = l[0][ia] * l[1][ib] * l[2][ic];
        const double g0 = dl[0][ia] * l[1][ib] * l[2][ic];
        const double g1 = l[0][ia] * dl[1][ib] * l[2][ic];
        const double g2 = l[0][ia] * l[1][ib] * dl[2][ic];
        const int node = nodes[static_cast<std::size_t>(a + np * (b + np * c))];
        for (int k = 0; k < nc; ++k) {
          const double u = coeffs[static_cast<std::size_t>(space.dof(node, k))];
          values[static_cast<std::size_t>(k)] += v * u;
          gref[static_cast<std::size_t>(3 * k)] += g0 * u;
          gref[static_cast<std::size_t>(3 * k + 1)] += g1 * u;
          gref[static_cast<std::size_t>(3 * k + 2)] += g2 * u;
        }
      }
    }
  }
  if (gradient.empty()) return;
  const GeometryPoint gp = geometry_map_unchecked(mesh, space.elements[static_cast<std::size_t>(space_element)], ref);
  const Mat3 inv = gp.jacobian.inverse();
  for (int k = 0; k < nc; ++k) {
    for (int x = 0; x < 3; ++x) {
      double s = 0.0;
      for (int d = 0; d < 3; ++d) s += gref[static_cast<std::size_t>(3 * k + d)] * inv(d, x);
      gradient[static_cast<std::size_t>(3 * k + x)] = s;
    }
  }
}

std::optional<std::pair<int, Vec3>> locate(const HexMesh& mesh, const DofSpace& space, const Vec3& x) {
  for (int se = 0; se < space.element_count(); ++se) {
    const int e = space.elements[static_cast<std::size_t>(se)];
    Vec3 lo = mesh.corner(e, 0);
    Vec3 hi = lo;
    for (int c = 1; c < 8; ++c) {
      lo = lo.cwiseMin(mesh.corner(e, c));
      hi = hi.cwiseMax(mesh.corner(e, c));
    }
    const double pad = 1e-9 * (hi - lo).norm();
    if ((x.array() < lo.array() - pad).any() || (x.array() > hi.array() + pad).any()) continue;
    if (auto ref = inverse_map(mesh, e, x, 1e-9)) {
      return std::pair{se, ref->cwiseMax(Vec3::Constant(-1.0)).cwiseMin(Vec3::Constant(1.0)).eval()};
    }
  }
  return std::nullopt;
}

std::optional<std::vector<std::pair<int, double>>> point_weights(const HexMesh& mesh, const DofSpace& space,
                                                                  const Vec3& x) {
  const auto loc = locate(mesh, space, x);
  if (!loc) return std::nullopt;
  const auto [se, ref0] = *loc;
  const auto& rule = space.rule_of(se);
  const int np = rule.size();
  Vec3 ref = ref0;
  for (int d = 0; d < 3; ++d) {
    for (double node : rule.nodes) {
      if (std::abs(ref[d] - node) < 1e-12) ref[d] = node;
    }
  }
  std::vector<std::pair<int, double>> out;
  const auto nodes = space.nodes_of(se);
  for (int c = 0; c < np; ++c) {
    for (int b = 0; b < np; ++b) {
      for (int a = 0; a < np; ++a) {
        const double v = lagrange_eval(rule, a, ref[0]) * lagrange_eval(rule, b, ref[1]) * lagrange_eval(rule, c, ref[2]);
        if (v != 0.0) out.emplace_back(nodes[static_cast<std::size_t>(a + np * (b + np * c))], v);
      }
    }
  }
  return out;
}

}  // namespace elastowave
