#include "elastowave/face_sets.hpp"

#include "elastowave/error.hpp"
#include "elastowave/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace elastowave {

double MortarPair::area() const {
  double a = 0.0;
  for (const auto& p : points) a += p.weight;
  return a;
}

namespace {

struct FaceInfo {
  FaceRef ref;
  int group = 0;  // elastic region index, or -1 for the acoustic domain
  int degree = 1;
  Vec3 centroid;
  std::array<Vec3, 4> corners;
  bool rectangle = false;
  int axis = 0;
  double plane = 0.0;
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  double area = 0.0;
  double covered = 0.0;
};

std::array<int, 2> other_axes(int d) { return d == 0 ? std::array{1, 2} : d == 1 ? std::array{0, 2} : std::array{0, 1}; }

FaceInfo describe(const HexMesh& mesh, const FaceRef& f, double tol) {
  FaceInfo info;
  info.ref = f;
  const auto& region = mesh.region_of(f.element);
  info.group = region.kind == DomainKind::Acoustic ? -1 : mesh.elements[static_cast<std::size_t>(f.element)].region;
  info.degree = std::max(1, region.degree);
  const auto corners = face_corners(f.local_face);
  info.centroid.setZero();
  for (std::size_t c = 0; c < 4; ++c) {
    info.corners[c] = mesh.corner(f.element, corners[c]);
    info.centroid += 0.25 * info.corners[c];
  }
  info.area = face_area(mesh, f);

  for (int d = 0; d < 3; ++d) {
    double mn = info.corners[0][d];
    double mx = mn;
    for (const auto& c : info.corners) {
      mn = std::min(mn, c[d]);
      mx = std::max(mx, c[d]);
    }
    if (mx - mn > tol) continue;
    const auto t = other_axes(d);
    bool ok = true;
    std::set<std::pair<int, int>> combos;
    for (std::size_t k = 0; k < 2 && ok; ++k) {
      double lo = info.corners[0][t[k]];
      double hi = lo;
      for (const auto& c : info.corners) {
        lo = std::min(lo, c[t[k]]);
        hi = std::max(hi, c[t[k]]);
      }
      info.lo[k] = lo;
      info.hi[k] = hi;
      if (hi - lo <= tol) ok = false;
    }
    for (const auto& c : info.corners) {
      if (!ok) break;
      std::array<int, 2> bits{};
      for (std::size_t k = 0; k < 2; ++k) {
        if (std::abs(c[t[k]] - info.lo[k]) <= tol) {
          bits[k] = 0;
        } else if (std::abs(c[t[k]] - info.hi[k]) <= tol) {
          bits[k] = 1;
        } else {
          ok = false;
        }
      }
      combos.insert({bits[0], bits[1]});
    }
    if (ok && combos.size() == 4) {
      info.rectangle = true;
      info.axis = d;
      info.plane = 0.25 * (info.corners[0][d] + info.corners[1][d] + info.corners[2][d] + info.corners[3][d]);
    }
    break;
  }
  return info;
}

bool coincident(const FaceInfo& a, const FaceInfo& b, double tol) {
  if ((a.centroid - b.centroid).norm() > tol) return false;
  for (const auto& ca : a.corners) {
    bool found = false;
    for (const auto& cb : b.corners) {
      if ((ca - cb).norm() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

MortarPair pair_coincident(const HexMesh& mesh, const FaceInfo& a, const FaceInfo& b, int q) {
  const GaussRule1D rule = gauss_legendre_rule(q);
  MortarPair pair{a.ref, b.ref, {}};
  pair.points.reserve(static_cast<std::size_t>(q * q));
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      const Vec2 st(rule.nodes[static_cast<std::size_t>(i)], rule.nodes[static_cast<std::size_t>(j)]);
      const FacePoint fp = face_geometry(mesh, a.ref, st);
      MortarPoint p;
      p.x = fp.x;
      p.weight = rule.weights[static_cast<std::size_t>(i)] * rule.weights[static_cast<std::size_t>(j)] * fp.area_scale;
      p.first_ref = st;
      p.second_ref = inverse_face_map(mesh, b.ref, fp.x);
      p.normal = fp.normal;
      pair.points.push_back(p);
    }
  }
  return pair;
}

MortarPair pair_rectangles(const HexMesh& mesh, const FaceInfo& a, const FaceInfo& b, const std::array<double, 2>& lo,
                           const std::array<double, 2>& hi, int q) {
  const GaussRule1D rule = gauss_legendre_rule(q);
  const auto t = other_axes(a.axis);
  MortarPair pair{a.ref, b.ref, {}};
  pair.points.reserve(static_cast<std::size_t>(q * q));
  const double half0 = 0.5 * (hi[0] - lo[0]);
  const double half1 = 0.5 * (hi[1] - lo[1]);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      Vec3 x;
      x[a.axis] = a.plane;
      x[t[0]] = lo[0] + half0 * (1.0 + rule.nodes[static_cast<std::size_t>(i)]);
      x[t[1]] = lo[1] + half1 * (1.0 + rule.nodes[static_cast<std::size_t>(j)]);
      MortarPoint p;
      p.x = x;
      p.weight = rule.weights[static_cast<std::size_t>(i)] * rule.weights[static_cast<std::size_t>(j)] * half0 * half1;
      p.first_ref = inverse_face_map(mesh, a.ref, x);
      p.second_ref = inverse_face_map(mesh, b.ref, x);
      p.normal = face_geometry(mesh, a.ref, p.first_ref).normal;
      pair.points.push_back(p);
    }
  }
  return pair;
}

struct PairingResult {
  std::vector<MortarPair> pairs;
  std::vector<int> covered_by;  // number of pairs touching each face
};

int pair_order(const FaceInfo& a, const FaceInfo& b, int quad_order) {
  return quad_order > 0 ? quad_order : std::max(a.degree, b.degree) + 1;
}

/// Pairs faces of different groups. Faces are given as FaceInfo with
/// accumulated coverage. `orient` decides which face becomes `first`.
template <typename Orient>
std::vector<MortarPair> pair_faces(const HexMesh& mesh, std::vector<FaceInfo>& faces, double tol, int quad_order,
                                   Orient orient) {
  std::vector<MortarPair> pairs;
  std::vector<bool> matched(faces.size(), false);

  // Coincident faces, found by a sweep over centroid x.
  std::vector<std::size_t> order(faces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return faces[a].centroid[0] < faces[b].centroid[0];
  });
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (faces[j].centroid[0] - faces[i].centroid[0] > tol) break;
      if (!coincident(faces[i], faces[j], tol)) continue;
      if (faces[i].group == faces[j].group) {
        throw GeometryError("element " + std::to_string(mesh.elements[static_cast<std::size_t>(faces[i].ref.element)].external_id) +
                            " and element " + std::to_string(mesh.elements[static_cast<std::size_t>(faces[j].ref.element)].external_id) +
                            " touch without sharing vertices inside one conformity region");
      }
      auto [a, b] = orient(i, j);
      pairs.push_back(pair_coincident(mesh, faces[a], faces[b], pair_order(faces[a], faces[b], quad_order)));
      matched[i] = matched[j] = true;
      faces[i].covered += faces[i].area;
      faces[j].covered += faces[j].area;
    }
  }

  // Remaining axis-aligned rectangles, clustered by (axis, plane).
  std::vector<std::size_t> rects;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (!matched[i] && faces[i].rectangle) rects.push_back(i);
  }
  std::sort(rects.begin(), rects.end(), [&](std::size_t a, std::size_t b) {
    if (faces[a].axis != faces[b].axis) return faces[a].axis < faces[b].axis;
    return faces[a].plane < faces[b].plane;
  });
  std::size_t begin = 0;
  while (begin < rects.size()) {
    std::size_t end = begin + 1;
    while (end < rects.size() && faces[rects[end]].axis == faces[rects[begin]].axis &&
           faces[rects[end]].plane - faces[rects[end - 1]].plane <= tol) {
      ++end;
    }
    // Within a plane cluster, sort by the first tangential lower bound to prune.
    std::vector<std::size_t> cluster(rects.begin() + static_cast<long>(begin), rects.begin() + static_cast<long>(end));
    std::sort(cluster.begin(), cluster.end(), [&](std::size_t a, std::size_t b) { return faces[a].lo[0] < faces[b].lo[0]; });
    for (std::size_t ci = 0; ci < cluster.size(); ++ci) {
      const std::size_t i = cluster[ci];
      for (std::size_t cj = ci + 1; cj < cluster.size(); ++cj) {
        const std::size_t j = cluster[cj];
        if (faces[j].lo[0] >= faces[i].hi[0] - tol) break;
        std::array<double, 2> lo{};
        std::array<double, 2> hi{};
        bool overlap = true;
        for (std::size_t k = 0; k < 2; ++k) {
          lo[k] = std::max(faces[i].lo[k], faces[j].lo[k]);
          hi[k] = std::min(faces[i].hi[k], faces[j].hi[k]);
          if (hi[k] - lo[k] <= tol) overlap = false;
        }
        if (!overlap) continue;
        if (faces[i].group == faces[j].group) {
          throw GeometryError("overlapping non-conforming faces inside one conformity region (element " +
                              std::to_string(mesh.elements[static_cast<std::size_t>(faces[i].ref.element)].external_id) + ")");
        }
        auto [a, b] = orient(i, j);
        auto pair = pair_rectangles(mesh, faces[a], faces[b], lo, hi, pair_order(faces[a], faces[b], quad_order));
        const double area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        faces[i].covered += area;
        faces[j].covered += area;
        pairs.push_back(std::move(pair));
      }
    }
    begin = end;
  }
  std::sort(pairs.begin(), pairs.end(), [](const MortarPair& a, const MortarPair& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  return pairs;
}

/// Faces not shared with another element of the same conformity group.
std::vector<FaceRef> exterior_faces(const HexMesh& mesh) {
  struct Entry {
    std::array<int, 4> key;
    FaceRef face;
  };
  std::vector<Entry> entries;
  entries.reserve(mesh.elements.size() * 6);
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    for (int lf = 0; lf < 6; ++lf) {
      const auto corners = face_corners(lf);
      std::array<int, 4> key{};
      for (std::size_t c = 0; c < 4; ++c) key[c] = mesh.elements[static_cast<std::size_t>(e)].vertices[static_cast<std::size_t>(corners[c])];
      std::sort(key.begin(), key.end());
      entries.push_back({key, {e, lf}});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.key, a.face) < std::tie(b.key, b.face);
  });
  auto group = [&](int e) {
    const auto& r = mesh.region_of(e);
    return r.kind == DomainKind::Acoustic ? -1 : mesh.elements[static_cast<std::size_t>(e)].region;
  };
  std::vector<FaceRef> out;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    if (j - i > 2) {
      throw GeometryError("face shared by more than two elements (element " +
                          std::to_string(mesh.elements[static_cast<std::size_t>(entries[i].face.element)].external_id) + ")");
    }
    if (j - i == 1 || group(entries[i].face.element) != group(entries[i + 1].face.element)) {
      for (std::size_t k = i; k < j; ++k) out.push_back(entries[k].face);
    }
    i = j;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<BoundaryCondition> side_condition(const FaceInfo& f, const Box& box, const BoundarySpec& spec, double tol) {
  if (!f.rectangle) return std::nullopt;
  const int d = f.axis;
  if (std::abs(f.plane - box.lower[d]) <= tol) return spec.sides[static_cast<std::size_t>(2 * d)];
  if (std::abs(f.plane - box.upper[d]) <= tol) return spec.sides[static_cast<std::size_t>(2 * d + 1)];
  return std::nullopt;
}

}  // namespace

std::vector<MortarPair> build_interface_pairs(const HexMesh& mesh, std::span<const FaceRef> first,
                                              std::span<const FaceRef> second, int quad_order) {
  const double tol = 1e-9 * mesh.diameter();
  std::vector<FaceInfo> faces;
  faces.reserve(first.size() + second.size());
  for (const auto& f : first) {
    faces.push_back(describe(mesh, f, tol));
    faces.back().group = 0;
  }
  for (const auto& f : second) {
    faces.push_back(describe(mesh, f, tol));
    faces.back().group = 1;
  }
  auto orient = [&](std::size_t i, std::size_t j) {
    return faces[i].group == 0 ? std::pair{i, j} : std::pair{j, i};
  };
  auto pairs = pair_faces(mesh, faces, tol, quad_order, orient);
  for (const auto& f : faces) {
    if (f.covered == 0.0 && !f.rectangle) {
      throw GeometryError("non-matching interface face of element " +
                          std::to_string(mesh.elements[static_cast<std::size_t>(f.ref.element)].external_id) +
                          " is not an axis-aligned rectangle; only planar axis-aligned non-matching interfaces are supported");
    }
  }
  return pairs;
}

FaceSets classify_faces(const HexMesh& mesh, const BoundarySpec& spec, int quad_order) {
  const double tol = 1e-9 * mesh.diameter();
  const Box box = mesh.bounding_box();
  const auto exterior = exterior_faces(mesh);
  std::vector<FaceInfo> faces;
  faces.reserve(exterior.size());
  for (const auto& f : exterior) faces.push_back(describe(mesh, f, tol));

  auto orient = [&](std::size_t i, std::size_t j) {
    const FaceInfo& a = faces[i];
    const FaceInfo& b = faces[j];
    // Elastic before acoustic; among elastic regions the lower index first.
    if (a.group == -1) return std::pair{j, i};
    if (b.group == -1) return std::pair{i, j};
    return a.group < b.group ? std::pair{i, j} : std::pair{j, i};
  };
  auto pairs = pair_faces(mesh, faces, tol, quad_order, orient);

  FaceSets sets;
  for (auto& p : pairs) {
    if (mesh.kind_of(p.second.element) == DomainKind::Acoustic) {
      sets.interface.push_back(std::move(p));
    } else {
      sets.elastic_internal.push_back(std::move(p));
    }
  }

  for (const auto& f : faces) {
    const double rel = f.covered / f.area;
    if (rel > 1e-8) {
      if (std::abs(rel - 1.0) > 1e-8) {
        throw ClassificationError("face " + std::to_string(f.ref.local_face) + " of element " +
                                  std::to_string(mesh.elements[static_cast<std::size_t>(f.ref.element)].external_id) +
                                  " is only partially covered by a neighbouring region");
      }
      continue;
    }
    std::optional<BoundaryCondition> bc;
    if (auto it = mesh.face_tags.find(f.ref); it != mesh.face_tags.end()) bc = it->second;
    if (!bc) bc = side_condition(f, box, spec, tol);
    if (!bc) bc = spec.default_condition;
    if (!bc) {
      throw ClassificationError("outer face " + std::to_string(f.ref.local_face) + " of element " +
                                std::to_string(mesh.elements[static_cast<std::size_t>(f.ref.element)].external_id) +
                                " has no boundary condition");
    }
    auto& target = mesh.kind_of(f.ref.element) == DomainKind::Elastic ? sets.elastic : sets.acoustic;
    target[static_cast<std::size_t>(*bc)].push_back(f.ref);
  }
  return sets;
}

void validate_face_sets(const HexMesh& mesh, const FaceSets& sets) {
  std::map<FaceRef, int> boundary_count;
  for (const auto* group : {&sets.elastic, &sets.acoustic}) {
    for (const auto& list : *group) {
      for (const auto& f : list) ++boundary_count[f];
    }
  }
  std::map<FaceRef, double> covered;
  for (const auto* list : {&sets.interface, &sets.elastic_internal}) {
    for (const auto& p : *list) {
      const double a = p.area();
      covered[p.first] += a;
      covered[p.second] += a;
    }
  }
  for (const auto& [f, n] : boundary_count) {
    if (n != 1) throw ClassificationError("face listed in more than one boundary set");
    if (covered.count(f)) throw ClassificationError("face is both a boundary face and paired");
  }
  for (const auto& [f, a] : covered) {
    const double area = face_area(mesh, f);
    if (std::abs(a - area) > 1e-8 * area) throw ClassificationError("paired face not fully covered by its mortar pairs");
  }
  for (const auto& f : exterior_faces(mesh)) {
    if (!boundary_count.count(f) && !covered.count(f)) throw ClassificationError("exterior face missing from the face sets");
  }
}

}  // namespace elastowave
