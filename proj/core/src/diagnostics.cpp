#include "elastowave/diagnostics.hpp"

#include "elastowave/error.hpp"
#include "elastowave/parallel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace elastowave {

double NormBreakdown::elastic_energy() const { return elastic_kinetic + elastic_strain + elastic_jump; }
double NormBreakdown::acoustic_energy() const { return acoustic_kinetic + acoustic_gradient; }
double NormBreakdown::energy() const { return std::sqrt(elastic_energy() + acoustic_energy()); }
double NormBreakdown::l2() const { return std::sqrt(elastic_l2 + acoustic_l2); }

namespace {

struct ElementSums {
  double kinetic = 0.0;
  double gradient = 0.0;
  double l2 = 0.0;
};

/// Values and physical gradients of `comps` fields at Gauss points of one
/// element, from two coefficient vectors (displacement-like and rate-like).
struct ElementSampler {
  int np = 0;
  int q = 0;
  std::vector<double> gauss_nodes;
  std::vector<double> gauss_weights;
  std::vector<double> b;
  std::vector<double> dm;

  ElementSampler(const QuadratureRule1D& rule) {
    np = rule.size();
    q = np + 1;
    const auto g = gauss_legendre_rule(q);
    gauss_nodes = g.nodes;
    gauss_weights = g.weights;
    b = interpolation_matrix(rule, gauss_nodes);
    dm = derivative_matrix(rule, gauss_nodes);
  }
};

struct LocalFields {
  std::vector<double> val;   // comps x q^3
  std::vector<double> d[3];  // reference derivatives, comps x q^3
  std::vector<double> rate;  // comps x q^3
};

void sample_element(const ElementSampler& s, const DofSpace& space, int se, std::span<const double> x,
                    std::span<const double> xdot, LocalFields& out, std::vector<double>& scratch) {
  const int comps = space.components;
  const auto nodes = space.nodes_of(se);
  const std::size_t p3 = nodes.size();
  const std::size_t q3 = static_cast<std::size_t>(s.q) * s.q * s.q;
  std::vector<double> local(p3);
  out.val.assign(comps * q3, 0.0);
  out.rate.assign(comps * q3, 0.0);
  for (auto& d : out.d) d.assign(comps * q3, 0.0);
  for (int c = 0; c < comps; ++c) {
    for (std::size_t l = 0; l < p3; ++l) local[l] = x[static_cast<std::size_t>(space.dof(nodes[l], c))];
    const auto off = static_cast<std::size_t>(c) * q3;
    tensor_contract(s.b, s.b, s.b, s.np, s.q, local, std::span(out.val).subspan(off, q3), scratch);
    tensor_contract(s.dm, s.b, s.b, s.np, s.q, local, std::span(out.d[0]).subspan(off, q3), scratch);
    tensor_contract(s.b, s.dm, s.b, s.np, s.q, local, std::span(out.d[1]).subspan(off, q3), scratch);
    tensor_contract(s.b, s.b, s.dm, s.np, s.q, local, std::span(out.d[2]).subspan(off, q3), scratch);
    for (std::size_t l = 0; l < p3; ++l) local[l] = xdot[static_cast<std::size_t>(space.dof(nodes[l], c))];
    tensor_contract(s.b, s.b, s.b, s.np, s.q, local, std::span(out.rate).subspan(off, q3), scratch);
  }
}

/// Calls f(point index, x, weight * det, inverse jacobian) for each Gauss point.
template <typename F>
void for_gauss_points(const HexMesh& mesh, int e, const ElementSampler& s, F&& f) {
  std::size_t p = 0;
  for (int c = 0; c < s.q; ++c) {
    for (int b = 0; b < s.q; ++b) {
      for (int a = 0; a < s.q; ++a, ++p) {
        const Vec3 ref(s.gauss_nodes[static_cast<std::size_t>(a)], s.gauss_nodes[static_cast<std::size_t>(b)],
                       s.gauss_nodes[static_cast<std::size_t>(c)]);
        const GeometryPoint gp = geometry_map_unchecked(mesh, e, ref);
        const double w = s.gauss_weights[static_cast<std::size_t>(a)] * s.gauss_weights[static_cast<std::size_t>(b)] *
                         s.gauss_weights[static_cast<std::size_t>(c)] * std::abs(gp.det);
        f(p, gp.x, w, Mat3(gp.jacobian.inverse()));
      }
    }
  }
}

std::vector<ElementSums> elastic_sums(const Discretization& d, const SimState* state, const AnalyticModel* model,
                                      double t) {
  const auto& space = *d.elastic;
  const auto& mesh = *d.mesh;
  std::vector<ElementSums> sums(static_cast<std::size_t>(space.element_count()));
  std::vector<double> zeros;
  if (!state) zeros.assign(static_cast<std::size_t>(space.size()), 0.0);
  std::span<const double> u = state ? std::span<const double>(state->u) : std::span<const double>(zeros);
  std::span<const double> v = state ? std::span<const double>(state->v) : std::span<const double>(zeros);

#if defined(ELASTOWAVE_HAVE_OPENMP)
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
  for (int se = 0; se < space.element_count(); ++se) {
    const int e = space.elements[static_cast<std::size_t>(se)];
    const ElementSampler s(space.rule_of(se));
    const auto& m = d.materials.elastic_for(mesh, e);
    LocalFields f;
    std::vector<double> scratch;
    sample_element(s, space, se, u, v, f, scratch);
    const std::size_t q3 = static_cast<std::size_t>(s.q) * s.q * s.q;
    ElementSums acc;
    for_gauss_points(mesh, e, s, [&](std::size_t p, const Vec3& x, double w, const Mat3& inv) {
      Vec3 eu;
      Vec3 ev;
      Mat3 g;
      for (int c = 0; c < 3; ++c) {
        const std::size_t i = static_cast<std::size_t>(c) * q3 + p;
        eu[c] = f.val[i];
        ev[c] = f.rate[i];
        for (int a = 0; a < 3; ++a) g(c, a) = f.d[0][i] * inv(0, a) + f.d[1][i] * inv(1, a) + f.d[2][i] * inv(2, a);
      }
      if (model) {
        const ElasticSample ex = model->elastic(x, t);
        eu -= ex.u;
        ev -= ex.v;
        g -= ex.grad;
      }
      const Mat3 eps = 0.5 * (g + g.transpose());
      const double tr = eps.trace();
      acc.kinetic += w * m.density * ev.squaredNorm();
      acc.gradient += w * (m.lambda * tr * tr + 2.0 * m.mu * eps.squaredNorm());
      acc.l2 += w * eu.squaredNorm();
    });
    sums[static_cast<std::size_t>(se)] = acc;
  }
  return sums;
}

std::vector<ElementSums> acoustic_sums(const Discretization& d, const SimState* state, const AnalyticModel* model,
                                       double t) {
  const auto& space = *d.acoustic;
  const auto& mesh = *d.mesh;
  std::vector<ElementSums> sums(static_cast<std::size_t>(space.element_count()));
  std::vector<double> zeros;
  if (!state) zeros.assign(static_cast<std::size_t>(space.size()), 0.0);
  std::span<const double> phi = state ? std::span<const double>(state->phi) : std::span<const double>(zeros);
  std::span<const double> psi = state ? std::span<const double>(state->psi) : std::span<const double>(zeros);

#if defined(ELASTOWAVE_HAVE_OPENMP)
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
  for (int se = 0; se < space.element_count(); ++se) {
    const int e = space.elements[static_cast<std::size_t>(se)];
    const ElementSampler s(space.rule_of(se));
    const auto& m = d.materials.acoustic_for(mesh, e);
    LocalFields f;
    std::vector<double> scratch;
    sample_element(s, space, se, phi, psi, f, scratch);
    ElementSums acc;
    for_gauss_points(mesh, e, s, [&](std::size_t p, const Vec3& x, double w, const Mat3& inv) {
      double ephi = f.val[p];
      double epsi = f.rate[p];
      Vec3 g;
      for (int a = 0; a < 3; ++a) g[a] = f.d[0][p] * inv(0, a) + f.d[1][p] * inv(1, a) + f.d[2][p] * inv(2, a);
      if (model) {
        const AcousticSample ex = model->acoustic(x, t);
        ephi -= ex.phi;
        epsi -= ex.phi_t;
        g -= ex.grad;
      }
      acc.kinetic += w * m.density / (m.sound_speed * m.sound_speed) * epsi * epsi;
      acc.gradient += w * m.density * g.squaredNorm();
      acc.l2 += w * ephi * ephi;
    });
    sums[static_cast<std::size_t>(se)] = acc;
  }
  return sums;
}

double jump_term(const Discretization& d, const SimState& state) {
  const auto& space = *d.elastic;
  const auto& mesh = *d.mesh;
  double total = 0.0;
  std::array<double, 3> plus{};
  std::array<double, 3> minus{};
  for (std::size_t k = 0; k < d.faces.elastic_internal.size(); ++k) {
    const auto& pair = d.faces.elastic_internal[k];
    const double eta = d.internal_penalty[k];
    const int s1 = space.local_of[static_cast<std::size_t>(pair.first.element)];
    const int s2 = space.local_of[static_cast<std::size_t>(pair.second.element)];
    for (const auto& pt : pair.points) {
      evaluate(mesh, space, state.u, s1, face_to_reference(pair.first.local_face, pt.first_ref), plus);
      evaluate(mesh, space, state.u, s2, face_to_reference(pair.second.local_face, pt.second_ref), minus);
      double j2 = 0.0;
      for (int c = 0; c < 3; ++c) j2 += (plus[c] - minus[c]) * (plus[c] - minus[c]);
      total += eta * pt.weight * j2;
    }
  }
  return total;
}

}  // namespace

NormBreakdown measure(const Discretization& d, const SimState* state, const AnalyticModel* model, double t) {
  NormBreakdown out;
  if (d.elastic && d.elastic->element_count() > 0) {
    for (const auto& s : elastic_sums(d, state, model, t)) {
      out.elastic_kinetic += s.kinetic;
      out.elastic_strain += s.gradient;
      out.elastic_l2 += s.l2;
    }
    if (state) out.elastic_jump = jump_term(d, *state);
  }
  if (d.acoustic && d.acoustic->element_count() > 0) {
    for (const auto& s : acoustic_sums(d, state, model, t)) {
      out.acoustic_kinetic += s.kinetic;
      out.acoustic_gradient += s.gradient;
      out.acoustic_l2 += s.l2;
    }
  }
  return out;
}

double energy_norm_elastic(const Discretization& d, const SimState& state) {
  return std::sqrt(measure(d, &state, nullptr, state.t).elastic_energy());
}

double energy_norm_acoustic(const Discretization& d, const SimState& state) {
  return std::sqrt(measure(d, &state, nullptr, state.t).acoustic_energy());
}

double error_vs_analytic(const Discretization& d, const SimState& state, const AnalyticModel& model, double t,
                         NormKind kind) {
  const NormBreakdown n = measure(d, &state, &model, t);
  return kind == NormKind::Energy ? n.energy() : n.l2();
}

SimState interpolate_state(const Discretization& d, const AnalyticModel& model, double t) {
  SimState s = SimState::zeros(d.elastic->size(), d.acoustic->size());
  s.t = t;
  for (int n = 0; n < d.elastic->node_count(); ++n) {
    const ElasticSample e = model.elastic(d.elastic->node_coords[static_cast<std::size_t>(n)], t);
    for (int c = 0; c < 3; ++c) {
      const auto i = static_cast<std::size_t>(d.elastic->dof(n, c));
      s.u[i] = e.u[c];
      s.v[i] = e.v[c];
      s.a_e[i] = e.a[c];
    }
  }
  for (int n = 0; n < d.acoustic->node_count(); ++n) {
    const AcousticSample a = model.acoustic(d.acoustic->node_coords[static_cast<std::size_t>(n)], t);
    const auto i = static_cast<std::size_t>(n);
    s.phi[i] = a.phi;
    s.psi[i] = a.phi_t;
    s.a_a[i] = a.phi_tt;
  }
  return s;
}

FitResult fit_convergence_rate(std::span<const double> params, std::span<const double> errors, bool exponential) {
  if (params.size() != errors.size()) throw InvalidArgument("fit: parameter and error counts differ");
  if (params.size() < 3) throw InvalidArgument("fit: at least 3 samples are required");
  const std::size_t n = params.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) throw InvalidArgument("fit: errors must be positive");
    if (!exponential && !(params[i] > 0.0)) throw InvalidArgument("fit: parameters must be positive");
    x[i] = exponential ? params[i] : std::log(params[i]);
    y[i] = std::log(errors[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit: parameters must not all be equal");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return r;
}

ReceiverSet::ReceiverSet(const Discretization& d, const std::vector<std::pair<std::string, Vec3>>& points) {
  for (const auto& [name, x] : points) {
    Receiver r;
    r.name = name;
    r.position = x;
    auto w = point_weights(*d.mesh, *d.elastic, x);
    if (w) {
      r.kind = DomainKind::Elastic;
    } else {
      w = point_weights(*d.mesh, *d.acoustic, x);
      if (!w) throw InvalidArgument("receiver '" + name + "' lies outside the mesh");
      r.kind = DomainKind::Acoustic;
    }
    r.weights = std::move(*w);
    receivers_.push_back(std::move(r));
  }
  samples_.resize(receivers_.size());
}

void ReceiverSet::record(const SimState& state) {
  times_.push_back(state.t);
  for (std::size_t i = 0; i < receivers_.size(); ++i) {
    const auto& r = receivers_[i];
    if (r.kind == DomainKind::Elastic) {
      double s[3] = {0.0, 0.0, 0.0};
      for (const auto& [node, w] : r.weights) {
        for (int c = 0; c < 3; ++c) s[c] += w * state.u[static_cast<std::size_t>(3 * node + c)];
      }
      samples_[i].insert(samples_[i].end(), s, s + 3);
    } else {
      double s = 0.0;
      for (const auto& [node, w] : r.weights) s += w * state.phi[static_cast<std::size_t>(node)];
      samples_[i].push_back(s);
    }
  }
}

void ReceiverSet::write_csv(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (std::size_t i = 0; i < receivers_.size(); ++i) {
    const auto& r = receivers_[i];
    const auto path = dir / (r.name + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const bool elastic = r.kind == DomainKind::Elastic;
    out << (elastic ? "t,ux,uy,uz\n" : "t,phi\n");
    out << std::setprecision(17);
    const std::size_t width = elastic ? 3 : 1;
    for (std::size_t k = 0; k < times_.size(); ++k) {
      out << times_[k];
      for (std::size_t c = 0; c < width; ++c) out << ',' << samples_[i][k * width + c];
      out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
  }
}

}  // namespace elastowave
