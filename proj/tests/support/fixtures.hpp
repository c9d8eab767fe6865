#pragma once

#include "elastowave/assembly.hpp"
#include "elastowave/config.hpp"
#include "elastowave/scenario.hpp"

#include <random>
#include <vector>

namespace elastowave::testing {

inline Box box(double x0, double y0, double z0, double x1, double y1, double z1) {
  return Box{Vec3(x0, y0, z0), Vec3(x1, y1, z1)};
}

inline BoundarySpec all(BoundaryCondition bc) {
  BoundarySpec s;
  s.default_condition = bc;
  return s;
}

/// Two boxes meeting on x = 0: elastic region 1 on (-1,0)x(0,1)^2 and
/// acoustic region 2 on (0,1)^3, as in the verification layout.
inline HexMesh split_mesh(int ne, int na, int ny_e = -1, int ny_a = -1) {
  if (ny_e < 0) ny_e = ne;
  if (ny_a < 0) ny_a = na;
  HexMesh m = build_box_mesh(box(-1, 0, 0, 0, 1, 1), {ne, ny_e, ny_e}, 1, DomainKind::Elastic);
  m.append(build_box_mesh(box(0, 0, 0, 1, 1, 1), {na, ny_a, ny_a}, 2, DomainKind::Acoustic));
  return m;
}

inline MaterialTable materials(const ElasticMaterial& e = {}, const AcousticMaterial& a = {}) {
  MaterialTable t;
  t.elastic[1] = e;
  t.acoustic[2] = a;
  return t;
}

inline Discretization discretize_mesh(HexMesh mesh, MaterialTable table, int degree, const BoundarySpec& bc,
                                      double alpha = 1.0) {
  DiscretizationOptions o;
  for (const auto& r : mesh.regions) o.degrees[r.id] = degree;
  o.boundary = bc;
  o.penalty.alpha = alpha;
  return build_discretization(std::move(mesh), std::move(table), o);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> apply(const LinearOperator& op, const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(op.rows()), 0.0);
  op.apply(x, y);
  return y;
}

}  // namespace elastowave::testing
