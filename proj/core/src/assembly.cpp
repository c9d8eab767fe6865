#include "elastowave/assembly.hpp"

#include "elastowave/error.hpp"
#include "elastowave/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace elastowave {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

double penalty_value(double p_modulus_plus, double p_modulus_minus, int degree_plus, int degree_minus, double h_plus,
                     double h_minus, const PenaltySpec& spec) {
  const double np = static_cast<double>(degree_plus) * degree_plus / h_plus;
  const double nm = static_cast<double>(degree_minus) * degree_minus / h_minus;
  return spec.alpha * harmonic_mean(p_modulus_plus, p_modulus_minus) * harmonic_mean(np, nm);
}

std::vector<double> region_meshsizes(const HexMesh& mesh) {
  std::vector<double> h(mesh.regions.size(), 0.0);
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    auto& v = h[static_cast<std::size_t>(mesh.elements[static_cast<std::size_t>(e)].region)];
    v = std::max(v, element_size(mesh, e));
  }
  return h;
}

namespace {

constexpr int kMaxPoints = 11;

std::vector<double> weighted_determinants(const DofSpace& space) {
  std::vector<double> out(space.det_jacobian.size());
  for (int se = 0; se < space.element_count(); ++se) {
    const auto& rule = space.rule_of(se);
    const int np = rule.size();
    std::size_t pos = space.node_offset[static_cast<std::size_t>(se)];
    for (int c = 0; c < np; ++c) {
      for (int b = 0; b < np; ++b) {
        for (int a = 0; a < np; ++a, ++pos) {
          out[pos] = rule.weights[static_cast<std::size_t>(a)] * rule.weights[static_cast<std::size_t>(b)] *
                     rule.weights[static_cast<std::size_t>(c)] * space.det_jacobian[pos];
        }
      }
    }
  }
  return out;
}

void check_degrees(const DofSpace& space) {
  for (int n : space.degree) {
    if (n + 1 > kMaxPoints) {
      throw InvalidArgument("stiffness kernels support degrees up to " + std::to_string(kMaxPoints - 1) + ", got " +
                            std::to_string(n));
    }
  }
}

// Reference derivatives of a lexicographic (k, j, i) block along the three axes.
template <int NP>
inline void reference_gradient(const double* d, const double* u, double* g0, double* g1, double* g2) {
  for (int k = 0; k < NP; ++k) {
    for (int j = 0; j < NP; ++j) {
      for (int i = 0; i < NP; ++i) {
        double s0 = 0.0;
        double s1 = 0.0;
        double s2 = 0.0;
        for (int m = 0; m < NP; ++m) {
          s0 += d[i * NP + m] * u[(k * NP + j) * NP + m];
          s1 += d[j * NP + m] * u[(k * NP + m) * NP + i];
          s2 += d[k * NP + m] * u[(m * NP + j) * NP + i];
        }
        const int p = (k * NP + j) * NP + i;
        g0[p] = s0;
        g1[p] = s1;
        g2[p] = s2;
      }
    }
  }
}

template <int NP>
inline void reference_divergence(const double* d, const double* f0, const double* f1, const double* f2, double* y) {
  for (int k = 0; k < NP; ++k) {
    for (int j = 0; j < NP; ++j) {
      for (int i = 0; i < NP; ++i) {
        double s = 0.0;
        for (int m = 0; m < NP; ++m) {
          s += d[m * NP + i] * f0[(k * NP + j) * NP + m];
          s += d[m * NP + j] * f1[(k * NP + m) * NP + i];
          s += d[m * NP + k] * f2[(m * NP + j) * NP + i];
        }
        y[(k * NP + j) * NP + i] = s;
      }
    }
  }
}

template <int NP>
void elastic_kernel(const double* d, const double* u, const double* inv, const double* wdet, double lambda, double mu,
                    double* y) {
  constexpr int P3 = NP * NP * NP;
  double g[9][P3];
  for (int c = 0; c < 3; ++c) reference_gradient<NP>(d, u + c * P3, g[3 * c], g[3 * c + 1], g[3 * c + 2]);
  for (int p = 0; p < P3; ++p) {
    const double* ij = inv + 9 * p;
    double grad[3][3];
    for (int c = 0; c < 3; ++c) {
      for (int a = 0; a < 3; ++a) {
        grad[c][a] = g[3 * c][p] * ij[a] + g[3 * c + 1][p] * ij[3 + a] + g[3 * c + 2][p] * ij[6 + a];
      }
    }
    const double tr = lambda * (grad[0][0] + grad[1][1] + grad[2][2]);
    double sigma[3][3];
    for (int c = 0; c < 3; ++c) {
      for (int a = 0; a < 3; ++a) sigma[c][a] = mu * (grad[c][a] + grad[a][c]);
      sigma[c][c] += tr;
    }
    for (int c = 0; c < 3; ++c) {
      for (int dd = 0; dd < 3; ++dd) {
        g[3 * c + dd][p] =
            wdet[p] * (sigma[c][0] * ij[3 * dd] + sigma[c][1] * ij[3 * dd + 1] + sigma[c][2] * ij[3 * dd + 2]);
      }
    }
  }
  for (int c = 0; c < 3; ++c) reference_divergence<NP>(d, g[3 * c], g[3 * c + 1], g[3 * c + 2], y + c * P3);
}

template <int NP>
void acoustic_kernel(const double* d, const double* u, const double* inv, const double* wdet, double rho, double* y) {
  constexpr int P3 = NP * NP * NP;
  double g[3][P3];
  reference_gradient<NP>(d, u, g[0], g[1], g[2]);
  for (int p = 0; p < P3; ++p) {
    const double* ij = inv + 9 * p;
    double grad[3];
    for (int a = 0; a < 3; ++a) grad[a] = g[0][p] * ij[a] + g[1][p] * ij[3 + a] + g[2][p] * ij[6 + a];
    const double s = rho * wdet[p];
    for (int dd = 0; dd < 3; ++dd) {
      g[dd][p] = s * (grad[0] * ij[3 * dd] + grad[1] * ij[3 * dd + 1] + grad[2] * ij[3 * dd + 2]);
    }
  }
  reference_divergence<NP>(d, g[0], g[1], g[2], y);
}

using ElasticKernel = void (*)(const double*, const double*, const double*, const double*, double, double, double*);
using AcousticKernel = void (*)(const double*, const double*, const double*, const double*, double, double*);

template <int... I>
constexpr std::array<ElasticKernel, sizeof...(I)> elastic_table(std::integer_sequence<int, I...>) {
  return {&elastic_kernel<I + 2>...};
}
template <int... I>
constexpr std::array<AcousticKernel, sizeof...(I)> acoustic_table(std::integer_sequence<int, I...>) {
  return {&acoustic_kernel<I + 2>...};
}

constexpr auto kElasticKernels = elastic_table(std::make_integer_sequence<int, kMaxPoints - 1>{});
constexpr auto kAcousticKernels = acoustic_table(std::make_integer_sequence<int, kMaxPoints - 1>{});

/// Runs `kernel(se, u_local, y_local)` over all elements and assembles y.
/// Local blocks are component-major. Both paths add contributions to each
/// DoF in element order, so results do not depend on the thread count.
template <typename Kernel>
void element_loop(const DofSpace& space, std::span<const double> x, std::span<double> y, std::vector<double>& buffer,
                  Kernel&& kernel) {
  const int nc = space.components;
  const int threads = thread_count();
  constexpr std::size_t kLocal = 3 * kMaxPoints * kMaxPoints * kMaxPoints;

  auto gather = [&](int se, double* ue) {
    const auto nodes = space.nodes_of(se);
    const std::size_t p3 = nodes.size();
    for (std::size_t l = 0; l < p3; ++l) {
      const std::size_t base = static_cast<std::size_t>(nodes[l]) * static_cast<std::size_t>(nc);
      for (int c = 0; c < nc; ++c) ue[static_cast<std::size_t>(c) * p3 + l] = x[base + static_cast<std::size_t>(c)];
    }
  };

  if (threads <= 1) {
    std::fill(y.begin(), y.end(), 0.0);
    double ue[kLocal];
    double ye[kLocal];
    for (int se = 0; se < space.element_count(); ++se) {
      gather(se, ue);
      kernel(se, ue, ye);
      const auto nodes = space.nodes_of(se);
      const std::size_t p3 = nodes.size();
      for (std::size_t l = 0; l < p3; ++l) {
        const std::size_t base = static_cast<std::size_t>(nodes[l]) * static_cast<std::size_t>(nc);
        for (int c = 0; c < nc; ++c) y[base + static_cast<std::size_t>(c)] += ye[static_cast<std::size_t>(c) * p3 + l];
      }
    }
    return;
  }

  buffer.resize(space.element_nodes.size() * static_cast<std::size_t>(nc));
#ifdef ELASTOWAVE_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (int se = 0; se < space.element_count(); ++se) {
    double ue[kLocal];
    double ye[kLocal];
    gather(se, ue);
    kernel(se, ue, ye);
    const std::size_t begin = space.node_offset[static_cast<std::size_t>(se)];
    const std::size_t p3 = space.node_offset[static_cast<std::size_t>(se) + 1] - begin;
    for (std::size_t l = 0; l < p3; ++l) {
      for (int c = 0; c < nc; ++c) {
        buffer[(begin + l) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = ye[static_cast<std::size_t>(c) * p3 + l];
      }
    }
  }
#ifdef ELASTOWAVE_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (int node = 0; node < space.node_count(); ++node) {
    for (int c = 0; c < nc; ++c) {
      double s = 0.0;
      for (std::size_t k = space.incidence_offset[static_cast<std::size_t>(node)];
           k < space.incidence_offset[static_cast<std::size_t>(node) + 1]; ++k) {
        s += buffer[space.incidence[k] * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)];
      }
      y[static_cast<std::size_t>(node) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = s;
    }
  }
}

/// Basis values L_p(s) L_q(t) of the face nodes (face_nodes order) at st.
std::vector<double> face_basis(const QuadratureRule1D& rule, const Vec2& st) {
  const int np = rule.size();
  std::vector<double> ls(static_cast<std::size_t>(np));
  std::vector<double> lt(static_cast<std::size_t>(np));
  std::vector<double> dummy(static_cast<std::size_t>(np));
  lagrange_all(rule, st[0], ls, dummy);
  lagrange_all(rule, st[1], lt, dummy);
  std::vector<double> out(static_cast<std::size_t>(np * np));
  for (int q = 0; q < np; ++q) {
    for (int p = 0; p < np; ++p) out[static_cast<std::size_t>(p + np * q)] = ls[static_cast<std::size_t>(p)] * lt[static_cast<std::size_t>(q)];
  }
  return out;
}

int space_element(const DofSpace& space, int element) {
  const int se = space.local_of[static_cast<std::size_t>(element)];
  if (se < 0) throw AssemblyError("face element is not part of the " + std::string(to_string(space.kind)) + " space");
  return se;
}

}  // namespace

std::vector<double> assemble_mass(const HexMesh& mesh, const DofSpace& space, const MaterialTable& materials) {
  const auto wdet = weighted_determinants(space);
  std::vector<double> node_mass(static_cast<std::size_t>(space.node_count()), 0.0);
  for (int se = 0; se < space.element_count(); ++se) {
    const int e = space.elements[static_cast<std::size_t>(se)];
    double factor;
    if (space.kind == DomainKind::Elastic) {
      factor = materials.elastic_for(mesh, e).density;
    } else {
      const auto& m = materials.acoustic_for(mesh, e);
      factor = m.density / (m.sound_speed * m.sound_speed);
    }
    for (std::size_t pos = space.node_offset[static_cast<std::size_t>(se)]; pos < space.node_offset[static_cast<std::size_t>(se) + 1]; ++pos) {
      node_mass[static_cast<std::size_t>(space.element_nodes[pos])] += factor * wdet[pos];
    }
  }
  std::vector<double> mass(static_cast<std::size_t>(space.size()));
  for (int n = 0; n < space.node_count(); ++n) {
    const double m = node_mass[static_cast<std::size_t>(n)];
    if (!(m > 0.0)) throw AssemblyError("nonpositive lumped mass at node " + std::to_string(n));
    for (int c = 0; c < space.components; ++c) mass[static_cast<std::size_t>(space.dof(n, c))] = m;
  }
  return mass;
}

ElasticStiffness::ElasticStiffness(std::shared_ptr<const HexMesh> mesh, std::shared_ptr<const DofSpace> space,
                                   const MaterialTable& materials, std::vector<MortarPair> internal,
                                   const PenaltySpec& penalty, StiffnessParts parts)
    : mesh_(std::move(mesh)), space_(std::move(space)), parts_(parts) {
  if (space_->kind != DomainKind::Elastic) throw InvalidArgument("ElasticStiffness needs an elastic space");
  if (!(penalty.alpha > 0.0)) throw InvalidArgument("penalty alpha must be positive");
  check_degrees(*space_);
  for (int se = 0; se < space_->element_count(); ++se) {
    const auto& m = materials.elastic_for(*mesh_, space_->elements[static_cast<std::size_t>(se)]);
    validate(m);
    lambda_.push_back(m.lambda);
    mu_.push_back(m.mu);
  }
  weighted_det_ = weighted_determinants(*space_);

  const auto h = region_meshsizes(*mesh_);
  for (std::size_t ip = 0; ip < internal.size(); ++ip) {
    const auto& pair = internal[ip];
    const std::array<FaceRef, 2> refs{pair.first, pair.second};
    std::array<int, 2> se{};
    std::array<double, 2> pmod{};
    std::array<double, 2> hs{};
    for (std::size_t s = 0; s < 2; ++s) {
      se[s] = space_element(*space_, refs[s].element);
      pmod[s] = lambda_[static_cast<std::size_t>(se[s])] + 2.0 * mu_[static_cast<std::size_t>(se[s])];
      hs[s] = h[static_cast<std::size_t>(mesh_->elements[static_cast<std::size_t>(refs[s].element)].region)];
    }
    eta_.push_back(penalty_value(pmod[0], pmod[1], space_->degree[static_cast<std::size_t>(se[0])],
                                 space_->degree[static_cast<std::size_t>(se[1])], hs[0], hs[1], penalty));
    pair_elements_.push_back(se);

    for (const auto& mp : pair.points) {
      FacePoint fp{};
      fp.weight = mp.weight;
      fp.normal = mp.normal;
      fp.pair = static_cast<int>(ip);
      for (std::size_t s = 0; s < 2; ++s) {
        const auto& rule = space_->rule_of(se[s]);
        const int np = rule.size();
        const Vec3 ref = face_to_reference(refs[s].local_face, s == 0 ? mp.first_ref : mp.second_ref);
        std::vector<double> l[3];
        std::vector<double> dl[3];
        for (int d = 0; d < 3; ++d) {
          l[d].resize(static_cast<std::size_t>(np));
          dl[d].resize(static_cast<std::size_t>(np));
          lagrange_all(rule, ref[d], l[d], dl[d]);
        }
        const Mat3 inv = geometry_map(*mesh_, refs[s].element, ref).jacobian.inverse();
        fp.side[s] = {se[s], face_basis_.size()};
        for (int c = 0; c < np; ++c) {
          for (int b = 0; b < np; ++b) {
            for (int a = 0; a < np; ++a) {
              const auto ia = static_cast<std::size_t>(a);
              const auto ib = static_cast<std::size_t>(b);
              const auto ic = static_cast<std::size_t>(c);
              const Vec3 gref(dl[0][ia] * l[1][ib] * l[2][ic], l[0][ia] * dl[1][ib] * l[2][ic], l[0][ia] * l[1][ib] * dl[2][ic]);
              const Vec3 g = inv.transpose() * gref;
              face_basis_.push_back(l[0][ia] * l[1][ib] * l[2][ic]);
              face_basis_.push_back(g[0]);
              face_basis_.push_back(g[1]);
              face_basis_.push_back(g[2]);
            }
          }
        }
      }
      face_points_.push_back(fp);
    }
  }
}

ElasticStiffness::~ElasticStiffness() = default;

void ElasticStiffness::apply(std::span<const double> x, std::span<double> y) const {
  const DofSpace& s = *space_;
  if (parts_.volume) {
    element_loop(s, x, y, buffer_, [&](int se, const double* ue, double* ye) {
      const auto& rule = s.rule_of(se);
      const std::size_t pos = s.node_offset[static_cast<std::size_t>(se)];
      kElasticKernels[static_cast<std::size_t>(rule.size() - 2)](rule.diff_matrix.data(), ue, s.inv_jacobian.data() + 9 * pos,
                                                                 weighted_det_.data() + pos, lambda_[static_cast<std::size_t>(se)],
                                                                 mu_[static_cast<std::size_t>(se)], ye);
    });
  } else {
    std::fill(y.begin(), y.end(), 0.0);
  }
  if (!face_points_.empty() && (parts_.consistency || parts_.penalty)) apply_faces(x, y);
}

void ElasticStiffness::apply_faces(std::span<const double> x, std::span<double> y) const {
  const DofSpace& s = *space_;
  for (const auto& fp : face_points_) {
    Vec3 u[2];
    Mat3 sigma[2];
    for (std::size_t side = 0; side < 2; ++side) {
      const int se = fp.side[side].element;
      const auto nodes = s.nodes_of(se);
      const double* basis = face_basis_.data() + fp.side[side].basis;
      Vec3 val = Vec3::Zero();
      Mat3 grad = Mat3::Zero();
      for (std::size_t l = 0; l < nodes.size(); ++l) {
        const double* bl = basis + 4 * l;
        for (int c = 0; c < 3; ++c) {
          const double uc = x[static_cast<std::size_t>(s.dof(nodes[l], c))];
          val[c] += bl[0] * uc;
          grad(c, 0) += bl[1] * uc;
          grad(c, 1) += bl[2] * uc;
          grad(c, 2) += bl[3] * uc;
        }
      }
      u[side] = val;
      const double lam = lambda_[static_cast<std::size_t>(se)];
      const double mu = mu_[static_cast<std::size_t>(se)];
      sigma[side] = lam * grad.trace() * Mat3::Identity() + mu * (grad + grad.transpose());
    }
    const Vec3& n = fp.normal;
    const Vec3 jump = u[0] - u[1];
    const Vec3 traction = 0.5 * (sigma[0] + sigma[1]) * n;
    const double eta = eta_[static_cast<std::size_t>(fp.pair)];
    const double jn = jump.dot(n);
    for (std::size_t side = 0; side < 2; ++side) {
      const int se = fp.side[side].element;
      const double sign = side == 0 ? 1.0 : -1.0;
      const double lam = lambda_[static_cast<std::size_t>(se)];
      const double mu = mu_[static_cast<std::size_t>(se)];
      const auto nodes = s.nodes_of(se);
      const double* basis = face_basis_.data() + fp.side[side].basis;
      Vec3 value_coeff = Vec3::Zero();
      if (parts_.penalty) value_coeff += sign * eta * jump;
      if (parts_.consistency) value_coeff -= sign * traction;
      for (std::size_t l = 0; l < nodes.size(); ++l) {
        const double* bl = basis + 4 * l;
        const Vec3 g(bl[1], bl[2], bl[3]);
        Vec3 r = bl[0] * value_coeff;
        if (parts_.consistency) {
          const double gn = g.dot(n);
          const double jg = jump.dot(g);
          r -= 0.5 * (lam * jn * g + mu * (gn * jump + jg * n));
        }
        for (int c = 0; c < 3; ++c) y[static_cast<std::size_t>(s.dof(nodes[l], c))] += fp.weight * r[c];
      }
    }
  }
}

AcousticStiffness::AcousticStiffness(std::shared_ptr<const HexMesh> mesh, std::shared_ptr<const DofSpace> space,
                                     const MaterialTable& materials)
    : mesh_(std::move(mesh)), space_(std::move(space)) {
  if (space_->kind != DomainKind::Acoustic) throw InvalidArgument("AcousticStiffness needs an acoustic space");
  check_degrees(*space_);
  for (int se = 0; se < space_->element_count(); ++se) {
    const auto& m = materials.acoustic_for(*mesh_, space_->elements[static_cast<std::size_t>(se)]);
    validate(m);
    density_.push_back(m.density);
  }
  weighted_det_ = weighted_determinants(*space_);
}

void AcousticStiffness::apply(std::span<const double> x, std::span<double> y) const {
  const DofSpace& s = *space_;
  element_loop(s, x, y, buffer_, [&](int se, const double* ue, double* ye) {
    const auto& rule = s.rule_of(se);
    const std::size_t pos = s.node_offset[static_cast<std::size_t>(se)];
    kAcousticKernels[static_cast<std::size_t>(rule.size() - 2)](rule.diff_matrix.data(), ue, s.inv_jacobian.data() + 9 * pos,
                                                                weighted_det_.data() + pos, density_[static_cast<std::size_t>(se)], ye);
  });
}

CouplingMatrices assemble_coupling(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic,
                                   std::span<const MortarPair> pairs, const MaterialTable& materials) {
  std::vector<Triplet> triplets;
  for (const auto& pair : pairs) {
    const int se = space_element(elastic, pair.first.element);
    const int sa = space_element(acoustic, pair.second.element);
    const double rho = materials.acoustic_for(mesh, pair.second.element).density;
    const auto ne = face_nodes(elastic, se, pair.first.local_face);
    const auto na = face_nodes(acoustic, sa, pair.second.local_face);
    for (const auto& p : pair.points) {
      const auto le = face_basis(elastic.rule_of(se), p.first_ref);
      const auto la = face_basis(acoustic.rule_of(sa), p.second_ref);
      for (std::size_t i = 0; i < ne.size(); ++i) {
        if (le[i] == 0.0) continue;
        for (std::size_t j = 0; j < na.size(); ++j) {
          if (la[j] == 0.0) continue;
          const double v = p.weight * rho * le[i] * la[j];
          for (int c = 0; c < 3; ++c) {
            if (p.normal[c] != 0.0) triplets.push_back({elastic.dof(ne[i], c), na[j], v * p.normal[c]});
          }
        }
      }
    }
  }
  CouplingMatrices out;
  out.elastic = CsrMatrix::from_triplets(elastic.size(), acoustic.size(), std::move(triplets));
  out.acoustic = out.elastic.transposed().scaled(-1.0);
  return out;
}

AbsorbingMatrices assemble_absorbing(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic,
                                     const FaceSets& faces, const MaterialTable& materials) {
  const auto abs = static_cast<std::size_t>(BoundaryCondition::Absorbing);
  std::vector<Triplet> te;
  for (const auto& f : faces.elastic[abs]) {
    const int se = space_element(elastic, f.element);
    const auto& rule = elastic.rule_of(se);
    const int np = rule.size();
    const auto& m = materials.elastic_for(mesh, f.element);
    const WaveSpeeds w = wave_speeds(m);
    const auto nodes = face_nodes(elastic, se, f.local_face);
    for (int q = 0; q < np; ++q) {
      for (int p = 0; p < np; ++p) {
        const Vec2 st(rule.nodes[static_cast<std::size_t>(p)], rule.nodes[static_cast<std::size_t>(q)]);
        const FacePoint fp = face_geometry(mesh, f, st);
        const double weight = rule.weights[static_cast<std::size_t>(p)] * rule.weights[static_cast<std::size_t>(q)] * fp.area_scale;
        const Mat3 nn = fp.normal * fp.normal.transpose();
        const Mat3 block = m.density * (w.p * nn + w.s * (Mat3::Identity() - nn)) * weight;
        const int node = nodes[static_cast<std::size_t>(p + np * q)];
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            if (block(r, c) != 0.0) te.push_back({elastic.dof(node, r), elastic.dof(node, c), block(r, c)});
          }
        }
      }
    }
  }
  std::vector<Triplet> ta;
  for (const auto& f : faces.acoustic[abs]) {
    const int sa = space_element(acoustic, f.element);
    const auto& rule = acoustic.rule_of(sa);
    const int np = rule.size();
    const auto& m = materials.acoustic_for(mesh, f.element);
    const auto nodes = face_nodes(acoustic, sa, f.local_face);
    for (int q = 0; q < np; ++q) {
      for (int p = 0; p < np; ++p) {
        const Vec2 st(rule.nodes[static_cast<std::size_t>(p)], rule.nodes[static_cast<std::size_t>(q)]);
        const FacePoint fp = face_geometry(mesh, f, st);
        const double weight = rule.weights[static_cast<std::size_t>(p)] * rule.weights[static_cast<std::size_t>(q)] * fp.area_scale;
        const int node = nodes[static_cast<std::size_t>(p + np * q)];
        ta.push_back({node, node, m.density / m.sound_speed * weight});
      }
    }
  }
  AbsorbingMatrices out;
  out.elastic = CsrMatrix::from_triplets(elastic.size(), elastic.size(), std::move(te));
  out.acoustic = CsrMatrix::from_triplets(acoustic.size(), acoustic.size(), std::move(ta));
  return out;
}

LoadAssembler::LoadAssembler(const HexMesh& mesh, const DofSpace& elastic, const DofSpace& acoustic,
                             const FaceSets& faces, const MaterialTable& materials,
                             std::shared_ptr<const AnalyticModel> model, std::vector<RickerSource> sources)
    : model_(std::move(model)) {
  const auto neu = static_cast<std::size_t>(BoundaryCondition::Neumann);
  if (model_) {
    for (const auto& f : faces.elastic[neu]) {
      const int se = space_element(elastic, f.element);
      const auto& rule = elastic.rule_of(se);
      const int np = rule.size();
      const auto nodes = face_nodes(elastic, se, f.local_face);
      const auto& m = materials.elastic_for(mesh, f.element);
      for (int q = 0; q < np; ++q) {
        for (int p = 0; p < np; ++p) {
          const FacePoint fp = face_geometry(mesh, f, Vec2(rule.nodes[static_cast<std::size_t>(p)], rule.nodes[static_cast<std::size_t>(q)]));
          const double w = rule.weights[static_cast<std::size_t>(p)] * rule.weights[static_cast<std::size_t>(q)] * fp.area_scale;
          elastic_neumann_.push_back({nodes[static_cast<std::size_t>(p + np * q)], fp.x, fp.normal, w, m});
        }
      }
    }
    for (const auto& f : faces.acoustic[neu]) {
      const int sa = space_element(acoustic, f.element);
      const auto& rule = acoustic.rule_of(sa);
      const int np = rule.size();
      const auto nodes = face_nodes(acoustic, sa, f.local_face);
      const double rho = materials.acoustic_for(mesh, f.element).density;
      for (int q = 0; q < np; ++q) {
        for (int p = 0; p < np; ++p) {
          const FacePoint fp = face_geometry(mesh, f, Vec2(rule.nodes[static_cast<std::size_t>(p)], rule.nodes[static_cast<std::size_t>(q)]));
          const double w = rule.weights[static_cast<std::size_t>(p)] * rule.weights[static_cast<std::size_t>(q)] * fp.area_scale;
          acoustic_neumann_.push_back({nodes[static_cast<std::size_t>(p + np * q)], fp.x, fp.normal, w * rho});
        }
      }
    }
  }

  for (auto& src : sources) {
    auto weights = point_weights(mesh, elastic, src.position);
    if (!weights) throw InvalidArgument("point source outside the elastic domain");
    SourceWeights sw;
    sw.source = src;
    sw.node_weights = std::move(*weights);
    sources_.push_back(std::move(sw));
  }
}

void LoadAssembler::evaluate(double t, std::span<double> f_e, std::span<double> f_a) const {
  std::fill(f_e.begin(), f_e.end(), 0.0);
  std::fill(f_a.begin(), f_a.end(), 0.0);
  for (const auto& p : elastic_neumann_) {
    const Vec3 g = stress(model_->elastic(p.x, t).grad, p.material) * p.normal;
    for (int c = 0; c < 3; ++c) f_e[static_cast<std::size_t>(3 * p.node + c)] += p.weight * g[c];
  }
  for (const auto& p : acoustic_neumann_) {
    f_a[static_cast<std::size_t>(p.node)] += p.weight * model_->acoustic(p.x, t).grad.dot(p.normal);
  }
  for (const auto& s : sources_) {
    const double amp = ricker(t, s.source);
    for (const auto& [node, w] : s.node_weights) {
      for (int c = 0; c < 3; ++c) f_e[static_cast<std::size_t>(3 * node + c)] += amp * w * s.source.direction[c];
    }
  }
}

Discretization build_discretization(HexMesh mesh, MaterialTable materials, const DiscretizationOptions& options) {
  int acoustic_degree = 0;
  for (auto& r : mesh.regions) {
    auto it = options.degrees.find(r.id);
    if (it != options.degrees.end()) r.degree = it->second;
    if (r.degree <= 0) r.degree = 2;
    if (r.kind == DomainKind::Elastic) {
      if (!materials.elastic.count(r.id)) throw AssemblyError("no elastic material for region " + std::to_string(r.id));
      validate(materials.elastic.at(r.id));
    } else {
      if (!materials.acoustic.count(r.id)) throw AssemblyError("no acoustic material for region " + std::to_string(r.id));
      validate(materials.acoustic.at(r.id));
      if (acoustic_degree != 0 && acoustic_degree != r.degree) {
        throw InvalidArgument("all acoustic regions must share one polynomial degree");
      }
      acoustic_degree = r.degree;
    }
  }
  if (acoustic_degree == 0) acoustic_degree = 2;

  Discretization d;
  d.penalty = options.penalty;
  d.faces = classify_faces(mesh, options.boundary, options.mortar_order);
  validate_face_sets(mesh, d.faces);
  d.meshsize = region_meshsizes(mesh);

  std::map<int, int> degrees;
  for (const auto& r : mesh.regions) degrees[r.id] = r.degree;
  const auto dir = static_cast<std::size_t>(BoundaryCondition::Dirichlet);
  auto mesh_ptr = std::make_shared<const HexMesh>(std::move(mesh));
  d.mesh = mesh_ptr;
  d.elastic = std::make_shared<const DofSpace>(build_elastic_space(*mesh_ptr, degrees, d.faces.elastic[dir]));
  d.acoustic = std::make_shared<const DofSpace>(build_acoustic_space(*mesh_ptr, acoustic_degree, d.faces.acoustic[dir]));

  auto& ops = d.operators;
  ops.mass_e = assemble_mass(*mesh_ptr, *d.elastic, materials);
  ops.mass_a = assemble_mass(*mesh_ptr, *d.acoustic, materials);
  if (d.elastic->size() > 0) {
    auto k = std::make_shared<ElasticStiffness>(mesh_ptr, d.elastic, materials, d.faces.elastic_internal, options.penalty);
    d.internal_penalty = k->penalties();
    ops.stiffness_e = k;
  }
  if (d.acoustic->size() > 0) ops.stiffness_a = std::make_shared<AcousticStiffness>(mesh_ptr, d.acoustic, materials);

  if (!d.faces.interface.empty()) {
    auto c = assemble_coupling(*mesh_ptr, *d.elastic, *d.acoustic, d.faces.interface, materials);
    ops.coupling_e = std::make_shared<CsrMatrix>(std::move(c.elastic));
    ops.coupling_a = std::make_shared<CsrMatrix>(std::move(c.acoustic));
  } else if (d.elastic->size() > 0 && d.acoustic->size() > 0) {
    d.warnings.push_back("elastic and acoustic domains share no interface; the run is decoupled");
  }

  const auto abs = static_cast<std::size_t>(BoundaryCondition::Absorbing);
  if (!d.faces.elastic[abs].empty() || !d.faces.acoustic[abs].empty()) {
    auto s = assemble_absorbing(*mesh_ptr, *d.elastic, *d.acoustic, d.faces, materials);
    if (s.elastic.nonzeros() > 0) ops.absorbing_e = std::make_shared<CsrMatrix>(std::move(s.elastic));
    if (s.acoustic.nonzeros() > 0) ops.absorbing_a = std::make_shared<CsrMatrix>(std::move(s.acoustic));
  }
  d.materials = std::move(materials);
  return d;
}

}  // namespace elastowave
