#include "elastowave/mesh.hpp"

#include "elastowave/error.hpp"
#include "elastowave/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

namespace elastowave {

std::array<int, 2> face_tangent_axes(int local_face) {
  switch (face_axis(local_face)) {
    case 0:
      return {1, 2};
    case 1:
      return {0, 2};
    default:
      return {0, 1};
  }
}

Vec3 face_to_reference(int local_face, const Vec2& st) {
  Vec3 ref;
  const auto t = face_tangent_axes(local_face);
  ref[face_axis(local_face)] = face_side(local_face) == 0 ? -1.0 : 1.0;
  ref[t[0]] = st[0];
  ref[t[1]] = st[1];
  return ref;
}

std::array<int, 4> face_corners(int local_face) {
  const int d = face_axis(local_face);
  const int side = face_side(local_face);
  const auto t = face_tangent_axes(local_face);
  std::array<int, 4> out{};
  for (int tt = 0; tt < 2; ++tt) {
    for (int s = 0; s < 2; ++s) {
      out[static_cast<std::size_t>(s + 2 * tt)] = (side << d) | (s << t[0]) | (tt << t[1]);
    }
  }
  return out;
}

int HexMesh::region_index(int id) const {
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions[r].id == id) return static_cast<int>(r);
  }
  return -1;
}

void HexMesh::append(const HexMesh& fragment) {
  const int vertex_offset = static_cast<int>(vertices.size());
  const int element_offset = static_cast<int>(elements.size());
  vertices.insert(vertices.end(), fragment.vertices.begin(), fragment.vertices.end());
  std::vector<int> region_map(fragment.regions.size());
  for (std::size_t r = 0; r < fragment.regions.size(); ++r) {
    int idx = region_index(fragment.regions[r].id);
    if (idx < 0) {
      regions.push_back(fragment.regions[r]);
      idx = static_cast<int>(regions.size()) - 1;
    } else if (regions[static_cast<std::size_t>(idx)].kind != fragment.regions[r].kind) {
      throw GeometryError("region " + std::to_string(fragment.regions[r].id) + " appended with a different domain kind");
    }
    region_map[r] = idx;
  }
  int next_external = 0;
  for (const auto& e : elements) next_external = std::max(next_external, e.external_id);
  for (const auto& e : fragment.elements) {
    HexElement copy = e;
    for (auto& v : copy.vertices) v += vertex_offset;
    copy.region = region_map[static_cast<std::size_t>(e.region)];
    copy.external_id = ++next_external;
    elements.push_back(copy);
  }
  for (const auto& [face, tag] : fragment.face_tags) {
    face_tags[{face.element + element_offset, face.local_face}] = tag;
  }
}

Box HexMesh::bounding_box() const {
  Box box;
  if (vertices.empty()) return box;
  box.lower = vertices.front();
  box.upper = vertices.front();
  for (const auto& v : vertices) {
    box.lower = box.lower.cwiseMin(v);
    box.upper = box.upper.cwiseMax(v);
  }
  return box;
}

double HexMesh::diameter() const {
  const Box b = bounding_box();
  return (b.upper - b.lower).norm();
}

GeometryPoint geometry_map_unchecked(const HexMesh& mesh, int element, const Vec3& ref) {
  GeometryPoint g;
  g.x.setZero();
  g.jacobian.setZero();
  for (int c = 0; c < 8; ++c) {
    const double sx = (c & 1) ? 1.0 : -1.0;
    const double sy = (c & 2) ? 1.0 : -1.0;
    const double sz = (c & 4) ? 1.0 : -1.0;
    const double fx = 0.5 * (1.0 + sx * ref[0]);
    const double fy = 0.5 * (1.0 + sy * ref[1]);
    const double fz = 0.5 * (1.0 + sz * ref[2]);
    const Vec3& p = mesh.corner(element, c);
    g.x += fx * fy * fz * p;
    g.jacobian.col(0) += 0.5 * sx * fy * fz * p;
    g.jacobian.col(1) += 0.5 * sy * fx * fz * p;
    g.jacobian.col(2) += 0.5 * sz * fx * fy * p;
  }
  g.det = g.jacobian.determinant();
  return g;
}

GeometryPoint geometry_map(const HexMesh& mesh, int element, const Vec3& ref) {
  GeometryPoint g = geometry_map_unchecked(mesh, element, ref);
  if (!(g.det > 0.0)) {
    throw GeometryError("element " + std::to_string(mesh.elements[static_cast<std::size_t>(element)].external_id) +
                        " is inverted or degenerate (det J = " + std::to_string(g.det) + ")");
  }
  return g;
}

std::optional<Vec3> inverse_map(const HexMesh& mesh, int element, const Vec3& x, double tolerance) {
  Vec3 ref = Vec3::Zero();
  for (int iter = 0; iter < 50; ++iter) {
    const GeometryPoint g = geometry_map_unchecked(mesh, element, ref);
    if (!(g.det > 0.0)) return std::nullopt;
    const Vec3 delta = g.jacobian.lu().solve(x - g.x);
    ref += delta;
    if (ref.cwiseAbs().maxCoeff() > 10.0) return std::nullopt;
    if (delta.norm() < 1e-13) break;
  }
  if (ref.cwiseAbs().maxCoeff() > 1.0 + tolerance) return std::nullopt;
  const GeometryPoint g = geometry_map_unchecked(mesh, element, ref);
  const double scale = std::max(1.0, x.norm());
  if ((g.x - x).norm() > 1e-9 * scale) return std::nullopt;
  return ref.cwiseMax(-1.0).cwiseMin(1.0);
}

FacePoint face_geometry(const HexMesh& mesh, const FaceRef& face, const Vec2& st) {
  const GeometryPoint g = geometry_map_unchecked(mesh, face.element, face_to_reference(face.local_face, st));
  const auto t = face_tangent_axes(face.local_face);
  const Vec3 cross = g.jacobian.col(t[0]).cross(g.jacobian.col(t[1]));
  const double orientation = (face_axis(face.local_face) == 1 ? -1.0 : 1.0) * (face_side(face.local_face) == 1 ? 1.0 : -1.0);
  FacePoint p;
  p.x = g.x;
  p.area_scale = cross.norm();
  p.normal = orientation * cross / p.area_scale;
  return p;
}

Vec2 inverse_face_map(const HexMesh& mesh, const FaceRef& face, const Vec3& x) {
  const auto t = face_tangent_axes(face.local_face);
  Vec2 st = Vec2::Zero();
  for (int iter = 0; iter < 50; ++iter) {
    const GeometryPoint g = geometry_map_unchecked(mesh, face.element, face_to_reference(face.local_face, st));
    Eigen::Matrix<double, 3, 2> j;
    j.col(0) = g.jacobian.col(t[0]);
    j.col(1) = g.jacobian.col(t[1]);
    const Vec2 delta = (j.transpose() * j).ldlt().solve(j.transpose() * (x - g.x));
    st += delta;
    if (delta.norm() < 1e-14) break;
  }
  return st.cwiseMax(-1.0).cwiseMin(1.0);
}

double face_area(const HexMesh& mesh, const FaceRef& face) {
  static const GaussRule1D rule = [] {
    GaussRule1D r;
    // 3x3 Gauss; exact for parallelograms.
    r.nodes = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    r.weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    return r;
  }();
  double area = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      area += rule.weights[a] * rule.weights[b] *
              face_geometry(mesh, face, Vec2(rule.nodes[a], rule.nodes[b])).area_scale;
    }
  }
  return area;
}

double element_size(const HexMesh& mesh, int element) {
  static constexpr std::array<std::array<int, 2>, 12> edges{{{0, 1}, {2, 3}, {4, 5}, {6, 7},
                                                             {0, 2}, {1, 3}, {4, 6}, {5, 7},
                                                             {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
  double h = 0.0;
  for (const auto& e : edges) {
    h = std::max(h, (mesh.corner(element, e[1]) - mesh.corner(element, e[0])).norm());
  }
  return h;
}

HexMesh build_box_mesh(const Box& box, const std::array<int, 3>& subdivisions, int region_id,
                       DomainKind kind, const std::optional<Box>& hole) {
  for (int d = 0; d < 3; ++d) {
    if (subdivisions[static_cast<std::size_t>(d)] < 1) {
      throw InvalidArgument("build_box_mesh: subdivisions must be positive");
    }
    if (!(box.upper[d] > box.lower[d])) {
      throw InvalidArgument("build_box_mesh: box extents must be positive");
    }
  }
  const int nx = subdivisions[0];
  const int ny = subdivisions[1];
  const int nz = subdivisions[2];
  const Vec3 h((box.upper[0] - box.lower[0]) / nx, (box.upper[1] - box.lower[1]) / ny,
               (box.upper[2] - box.lower[2]) / nz);

  if (hole) {
    for (int d = 0; d < 3; ++d) {
      for (double plane : {hole->lower[d], hole->upper[d]}) {
        const double cells = (plane - box.lower[d]) / h[d];
        if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, std::abs(cells))) {
          throw GeometryError("build_box_mesh: hole faces must lie on grid planes");
        }
      }
    }
  }

  HexMesh mesh;
  mesh.regions.push_back({region_id, kind, 0});
  auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        Vec3 p(box.lower[0] + i * h[0], box.lower[1] + j * h[1], box.lower[2] + k * h[2]);
        if (i == nx) p[0] = box.upper[0];
        if (j == ny) p[1] = box.upper[1];
        if (k == nz) p[2] = box.upper[2];
        mesh.vertices.push_back(p);
      }
    }
  }
  int next_id = 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (hole) {
          const Vec3 c(box.lower[0] + (i + 0.5) * h[0], box.lower[1] + (j + 0.5) * h[1],
                       box.lower[2] + (k + 0.5) * h[2]);
          if ((c.array() > hole->lower.array()).all() && (c.array() < hole->upper.array()).all()) continue;
        }
        HexElement e;
        for (int c = 0; c < 8; ++c) {
          e.vertices[static_cast<std::size_t>(c)] = vid(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        }
        e.region = 0;
        e.external_id = next_id++;
        mesh.elements.push_back(e);
      }
    }
  }
  // Drop vertices not referenced by any element (only relevant with a hole).
  if (hole) {
    std::vector<int> remap(mesh.vertices.size(), -1);
    std::vector<Vec3> kept;
    for (auto& e : mesh.elements) {
      for (auto& v : e.vertices) {
        auto& r = remap[static_cast<std::size_t>(v)];
        if (r < 0) {
          r = static_cast<int>(kept.size());
          kept.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
        }
        v = r;
      }
    }
    mesh.vertices = std::move(kept);
  }
  return mesh;
}

namespace {

// File corner order v1..v8 follows the usual (VTK/Gmsh) hexahedron layout:
// bottom face counter-clockwise, then top face.
constexpr std::array<int, 8> kFileToLocal{0, 1, 3, 2, 4, 5, 7, 6};

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

BoundaryCondition parse_tag(const std::string& tag, std::size_t line) {
  if (tag == "DIR") return BoundaryCondition::Dirichlet;
  if (tag == "NEU") return BoundaryCondition::Neumann;
  if (tag == "ABS") return BoundaryCondition::Absorbing;
  throw ParseError("unknown face tag '" + tag + "' (expected DIR, NEU or ABS)", line);
}

}  // namespace

HexMesh import_mesh(std::istream& in) {
  HexMesh mesh;
  std::unordered_map<long, int> node_index;
  std::unordered_map<long, int> element_index;
  std::vector<std::pair<int, std::size_t>> element_region_ids;  // (region id, line)
  struct PendingFace {
    long element;
    int local_face;
    BoundaryCondition tag;
    std::size_t line;
  };
  std::vector<PendingFace> faces;

  enum class Block { None, Nodes, Hex, Faces };
  Block block = Block::None;
  long remaining = 0;
  std::string raw;
  std::size_t line_no = 0;

  auto expect_count = [&](std::istringstream& ss, const std::string& keyword) {
    long n = -1;
    std::string extra;
    if (!(ss >> n) || n < 0 || (ss >> extra)) throw ParseError("expected '" + keyword + " <count>'", line_no);
    return n;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream ss(strip_comment(raw));
    std::string first;
    if (!(ss >> first)) continue;

    if (remaining > 0) {
      --remaining;
      long id = 0;
      try {
        std::size_t used = 0;
        id = std::stol(first, &used);
        if (used != first.size()) throw std::invalid_argument(first);
      } catch (const std::exception&) {
        throw ParseError("expected an integer id, got '" + first + "'", line_no);
      }
      std::string extra;
      if (block == Block::Nodes) {
        Vec3 p;
        if (!(ss >> p[0] >> p[1] >> p[2]) || (ss >> extra)) throw ParseError("expected 'id x y z'", line_no);
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second) {
          throw ParseError("duplicated node id " + std::to_string(id), line_no);
        }
        mesh.vertices.push_back(p);
      } else if (block == Block::Hex) {
        int region = 0;
        std::array<long, 8> v{};
        if (!(ss >> region >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5] >> v[6] >> v[7]) || (ss >> extra)) {
          throw ParseError("expected 'id region v1 ... v8'", line_no);
        }
        HexElement e;
        e.external_id = static_cast<int>(id);
        for (int c = 0; c < 8; ++c) {
          auto it = node_index.find(v[static_cast<std::size_t>(c)]);
          if (it == node_index.end()) {
            throw ParseError("element " + std::to_string(id) + " references unknown node " +
                                 std::to_string(v[static_cast<std::size_t>(c)]),
                             line_no);
          }
          e.vertices[static_cast<std::size_t>(kFileToLocal[static_cast<std::size_t>(c)])] = it->second;
        }
        if (!element_index.emplace(id, static_cast<int>(mesh.elements.size())).second) {
          throw ParseError("duplicated element id " + std::to_string(id), line_no);
        }
        mesh.elements.push_back(e);
        element_region_ids.emplace_back(region, line_no);
      } else if (block == Block::Faces) {
        int lf = -1;
        std::string tag;
        if (!(ss >> lf >> tag) || (ss >> extra)) throw ParseError("expected 'elem_id local_face tag'", line_no);
        if (lf < 0 || lf > 5) throw ParseError("local face must be in 0..5", line_no);
        faces.push_back({id, lf, parse_tag(tag, line_no), line_no});
      }
      continue;
    }

    if (first == "NODES") {
      block = Block::Nodes;
      remaining = expect_count(ss, first);
    } else if (first == "HEX") {
      block = Block::Hex;
      remaining = expect_count(ss, first);
    } else if (first == "FACES") {
      block = Block::Faces;
      remaining = expect_count(ss, first);
    } else if (first == "REGION") {
      int id = 0;
      std::string kind;
      std::string extra;
      if (!(ss >> id >> kind) || (ss >> extra)) throw ParseError("expected 'REGION id ELASTIC|ACOUSTIC'", line_no);
      Region r;
      r.id = id;
      if (kind == "ELASTIC") {
        r.kind = DomainKind::Elastic;
      } else if (kind == "ACOUSTIC") {
        r.kind = DomainKind::Acoustic;
      } else {
        throw ParseError("unknown region kind '" + kind + "'", line_no);
      }
      if (mesh.region_index(id) >= 0) throw ParseError("duplicated region " + std::to_string(id), line_no);
      mesh.regions.push_back(r);
    } else {
      throw ParseError("unexpected token '" + first + "'", line_no);
    }
  }
  if (remaining > 0) throw ParseError("unexpected end of file inside a block", line_no);

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto [rid, line] = element_region_ids[e];
    int idx = mesh.region_index(rid);
    if (idx < 0) {
      // Regions without a descriptor default to elastic.
      mesh.regions.push_back({rid, DomainKind::Elastic, 0});
      idx = static_cast<int>(mesh.regions.size()) - 1;
    }
    mesh.elements[e].region = idx;
  }
  for (const auto& f : faces) {
    auto it = element_index.find(f.element);
    if (it == element_index.end()) {
      throw ParseError("face references unknown element " + std::to_string(f.element), f.line);
    }
    mesh.face_tags[{it->second, f.local_face}] = f.tag;
  }
  validate_geometry(mesh);
  return mesh;
}

void export_mesh(const HexMesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& r : mesh.regions) {
    out << "REGION " << r.id << ' ' << (r.kind == DomainKind::Elastic ? "ELASTIC" : "ACOUSTIC") << '\n';
  }
  out << "NODES " << mesh.vertices.size() << '\n';
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto& p = mesh.vertices[v];
    out << v + 1 << ' ' << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  }
  out << "HEX " << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    out << e + 1 << ' ' << mesh.regions[static_cast<std::size_t>(el.region)].id;
    for (int c = 0; c < 8; ++c) {
      out << ' ' << el.vertices[static_cast<std::size_t>(kFileToLocal[static_cast<std::size_t>(c)])] + 1;
    }
    out << '\n';
  }
  out << "FACES " << mesh.face_tags.size() << '\n';
  for (const auto& [face, tag] : mesh.face_tags) {
    out << face.element + 1 << ' ' << face.local_face << ' ' << to_string(tag) << '\n';
  }
}

void validate_geometry(const HexMesh& mesh) {
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    for (int c = 0; c < 9; ++c) {
      const Vec3 ref = c < 8 ? Vec3((c & 1) ? 1.0 : -1.0, (c & 2) ? 1.0 : -1.0, (c & 4) ? 1.0 : -1.0) : Vec3::Zero();
      geometry_map(mesh, e, ref);
    }
  }
}

}  // namespace elastowave
