#include "elastowave/scenario.hpp"

#include "elastowave/error.hpp"
#include "elastowave/parallel.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace elastowave {

namespace {

std::array<int, 3> cells_of(const RegionConfig& r) {
  if (r.cells) return *r.cells;
  std::array<int, 3> n{};
  for (int d = 0; d < 3; ++d) {
    const double extent = r.box->upper[d] - r.box->lower[d];
    n[static_cast<std::size_t>(d)] = std::max(1, static_cast<int>(std::lround(extent / *r.h)));
  }
  return n;
}

/// Largest cell edge of a built-in region.
double cell_size(const RegionConfig& r) {
  const auto n = cells_of(r);
  double h = 0.0;
  for (int d = 0; d < 3; ++d) h = std::max(h, (r.box->upper[d] - r.box->lower[d]) / n[static_cast<std::size_t>(d)]);
  return h;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

HexMesh build_mesh(const ScenarioConfig& config) {
  HexMesh mesh;
  if (config.mesh_file) {
    std::ifstream in(*config.mesh_file);
    if (!in) throw IoError("cannot read mesh " + *config.mesh_file);
    mesh = import_mesh(in);
    for (auto& region : mesh.regions) {
      const RegionConfig* r = config.region(region.id);
      if (!r) throw InvalidArgument("mesh region " + std::to_string(region.id) + " has no [region] section");
      if (r->kind != region.kind) {
        throw InvalidArgument("mesh region " + std::to_string(region.id) + " kind differs from its config");
      }
    }
  } else {
    for (const auto& r : config.regions) mesh.append(build_box_mesh(*r.box, cells_of(r), r.id, r.kind, r.hole));
  }
  for (auto& region : mesh.regions) {
    const RegionConfig* r = config.region(region.id);
    region.degree = r && r->degree ? *r->degree : config.degree;
  }
  validate_geometry(mesh);
  return mesh;
}

Discretization discretize(const ScenarioConfig& config) {
  HexMesh mesh = build_mesh(config);
  MaterialTable materials;
  DiscretizationOptions options;
  for (const auto& r : config.regions) {
    if (r.kind == DomainKind::Elastic) {
      materials.elastic[r.id] = r.elastic;
    } else {
      materials.acoustic[r.id] = r.acoustic;
    }
  }
  for (const auto& region : mesh.regions) options.degrees[region.id] = region.degree;
  options.penalty.alpha = config.penalty;
  options.mortar_order = config.mortar_order;
  options.boundary = config.boundary;
  return build_discretization(std::move(mesh), std::move(materials), options);
}

std::shared_ptr<const AnalyticModel> make_model(const ScenarioConfig& config) {
  if (config.model == ModelKind::None) return nullptr;
  const RegionConfig* solid = nullptr;
  const RegionConfig* fluid = nullptr;
  for (const auto& r : config.regions) {
    if (r.kind == DomainKind::Elastic && !solid) solid = &r;
    if (r.kind == DomainKind::Acoustic && !fluid) fluid = &r;
  }
  if (!solid || !fluid) throw InvalidArgument("analytic models need elastic and acoustic regions");
  if (config.model == ModelKind::Verification) {
    return std::make_shared<VerificationModel>(solid->elastic, fluid->acoustic);
  }
  return std::make_shared<ScholteModel>(scholte_dispersion_solve(solid->elastic, fluid->acoustic, config.omega));
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  RunResult result;
  result.output_dir = options.output_dir.value_or(config.output_dir);

  auto d = std::make_shared<Discretization>(discretize(config));
  result.warnings = d->warnings;
  const auto model = make_model(config);
  std::vector<RickerSource> sources;
  if (config.source) sources.push_back(*config.source);
  auto loads = std::make_shared<LoadAssembler>(*d->mesh, *d->elastic, *d->acoustic, d->faces, d->materials, model,
                                               std::move(sources));
  const DiscreteForcing forcing(loads, d->elastic, d->acoustic, model);
  const auto& ops = d->operators;

  double dt = 0.0;
  if (config.dt) {
    dt = *config.dt;
  } else {
    result.estimate = estimate_stable_dt(ops, config.safety);
    if (!result.estimate.converged) result.warnings.push_back("stable step estimate did not converge; using it anyway");
    dt = result.estimate.dt;
  }
  const auto steps = static_cast<std::size_t>(std::ceil(config.final_time / dt - 1e-9));
  dt = config.final_time / static_cast<double>(steps);
  result.dt = dt;
  result.steps = steps;

  SimState state = model ? interpolate_state(*d, *model, 0.0) : SimState::zeros(ops.elastic_size(), ops.acoustic_size());
  state.t = 0.0;
  if (options.initial_state) options.initial_state(*d, state);
  forcing.constrain_elastic(0.0, state.u, state.v, state.a_e);
  forcing.constrain_acoustic(0.0, state.phi, state.psi, state.a_a);
  initial_accelerations(ops, forcing, state);

  result.receivers = ReceiverSet(*d, config.receivers);
  const std::filesystem::path out = result.output_dir;
  if (options.write_outputs) ensure_directory(out);
  const std::filesystem::path snapshots = out / "snapshots";
  if (options.write_outputs && config.snapshot_every > 0) ensure_directory(snapshots);

  auto snapshot = [&](const SimState& s) {
    if (!options.write_outputs || config.snapshot_every <= 0) return;
    if (s.step % static_cast<std::size_t>(config.snapshot_every) != 0) return;
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << s.step << ".vtk";
    write_snapshot(*d, s, snapshots / name.str());
  };

  result.receivers.record(state);
  snapshot(state);
  if (options.observer) options.observer(*d, state);

  NewmarkStepper stepper(ops, forcing);
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.step(state, dt);
    if (state.step % static_cast<std::size_t>(config.receiver_every) == 0 || n + 1 == steps) {
      result.receivers.record(state);
    }
    snapshot(state);
    if (options.observer) options.observer(*d, state);
  }

  if (model) {
    result.error = measure(*d, &state, model.get(), state.t);
    result.reference = measure(*d, nullptr, model.get(), state.t);
  }

  if (options.write_outputs) {
    result.receivers.write_csv(out / "receivers");
    double h = 0.0;
    for (std::size_t r = 0; r < d->meshsize.size(); ++r) {
      if (d->mesh->regions[r].kind == DomainKind::Elastic) h = std::max(h, d->meshsize[r]);
    }
    if (result.error) {
      const double e = result.error->energy();
      const double l = result.error->l2();
      write_error_table(out / "errors.csv", std::span<const double>(&h, 1), std::span<const double>(&e, 1),
                        std::span<const double>(&l, 1));
    }

    nlohmann::json meta;
    meta["name"] = config.name;
    meta["config_sha1"] = git_blob_sha1(options.config_text.value_or(serialize_config(config)));
    meta["penalty_alpha"] = config.penalty;
    meta["zeta"] = 0.0;
    meta["zeta_convention"] = "energy norm drops the zeta-weighted displacement term (zeta = 0)";
    meta["dt"] = dt;
    meta["dt_source"] = config.dt ? "config" : "estimate";
    if (!config.dt) {
      meta["dt_estimate"] = {{"lambda_max", result.estimate.lambda_max},
                             {"damping_rate", result.estimate.damping_rate},
                             {"converged", result.estimate.converged},
                             {"iterations", result.estimate.iterations},
                             {"safety", config.safety}};
    }
    meta["steps"] = steps;
    meta["final_time"] = state.t;
    meta["threads"] = thread_count();
    meta["elements"] = d->mesh->elements.size();
    meta["elastic_dofs"] = ops.elastic_size();
    meta["acoustic_dofs"] = ops.acoustic_size();
    meta["interface_pairs"] = d->faces.interface.size();
    meta["elastic_internal_pairs"] = d->faces.elastic_internal.size();
    meta["model"] = to_string(config.model);
    if (result.error) {
      meta["energy_error"] = result.error->energy();
      meta["l2_error"] = result.error->l2();
      meta["energy_norm_exact"] = result.reference->energy();
      meta["l2_norm_exact"] = result.reference->l2();
    }
    meta["warnings"] = result.warnings;
    std::ofstream m(out / "metadata.json");
    if (!m) throw IoError("cannot write " + (out / "metadata.json").string());
    m << std::setw(2) << meta << '\n';
    if (!m) throw IoError("failed writing " + (out / "metadata.json").string());
  }

  result.state = std::move(state);
  return result;
}

ScenarioConfig with_meshsize(const ScenarioConfig& config, double h) {
  if (config.mesh_file) throw InvalidArgument("meshsize sweeps need the built-in box layout");
  if (!(h > 0.0)) throw InvalidArgument("meshsize must be positive");
  double ref = 0.0;
  for (const auto& r : config.regions) {
    if (r.kind == DomainKind::Elastic) ref = ref == 0.0 ? cell_size(r) : std::min(ref, cell_size(r));
  }
  if (ref == 0.0) throw InvalidArgument("meshsize sweeps need an elastic region");
  const double s = h / ref;
  ScenarioConfig out = config;
  for (auto& r : out.regions) {
    if (r.h) {
      *r.h *= s;
    } else {
      for (auto& n : *r.cells) n = std::max(1, static_cast<int>(std::lround(n / s)));
    }
  }
  return out;
}

ScenarioConfig with_degree(const ScenarioConfig& config, int degree) {
  ScenarioConfig out = config;
  out.degree = degree;
  for (auto& r : out.regions) r.degree.reset();
  return out;
}

ConvergenceSeries converge_sweep(const ScenarioConfig& config, SweepKind kind, std::span<const double> values,
                                 const RunOptions& options) {
  if (config.model == ModelKind::None) throw InvalidArgument("convergence sweeps need an analytic model");
  if (values.size() < 3) throw InvalidArgument("convergence sweeps need at least 3 values");
  ConvergenceSeries series;
  series.parameter = kind == SweepKind::MeshSize ? "h" : "N";
  const std::filesystem::path base = options.output_dir.value_or(config.output_dir);
  for (double v : values) {
    ScenarioConfig c;
    if (kind == SweepKind::MeshSize) {
      c = with_meshsize(config, v);
    } else {
      if (v != std::round(v)) throw InvalidArgument("degree sweeps need integer values");
      c = with_degree(config, static_cast<int>(v));
    }
    RunOptions o;
    o.write_outputs = false;
    const RunResult r = run_scenario(c, o);
    series.params.push_back(v);
    series.energy_errors.push_back(r.error->energy());
    series.l2_errors.push_back(r.error->l2());
  }
  const bool exponential = kind == SweepKind::Degree;
  series.energy_fit = fit_convergence_rate(series.params, series.energy_errors, exponential);
  series.l2_fit = fit_convergence_rate(series.params, series.l2_errors, exponential);
  if (options.write_outputs) {
    ensure_directory(base);
    write_error_table(base / "convergence.csv", series.params, series.energy_errors, series.l2_errors);
    nlohmann::json meta;
    meta["name"] = config.name;
    meta["config_sha1"] = git_blob_sha1(options.config_text.value_or(serialize_config(config)));
    meta["parameter"] = series.parameter;
    meta["fit"] = exponential ? "log(error) vs N" : "log(error) vs log(h)";
    meta["energy_slope"] = series.energy_fit.slope;
    meta["energy_r_squared"] = series.energy_fit.r_squared;
    meta["l2_slope"] = series.l2_fit.slope;
    meta["l2_r_squared"] = series.l2_fit.r_squared;
    meta["penalty_alpha"] = config.penalty;
    meta["zeta"] = 0.0;
    std::ofstream m(base / "convergence.json");
    if (!m) throw IoError("cannot write " + (base / "convergence.json").string());
    m << std::setw(2) << meta << '\n';
  }
  return series;
}

void write_error_table(const std::filesystem::path& path, std::span<const double> params,
                       std::span<const double> energy_errors, std::span<const double> l2_errors) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "param,energy_error,l2_error\n" << std::setprecision(17);
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << params[i] << ',' << energy_errors[i] << ',' << l2_errors[i] << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_snapshot(const Discretization& d, const SimState& state, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& mesh = *d.mesh;
  const std::size_t ne = mesh.elements.size();
  // VTK hexahedron corner order in (i, j, k) bits.
  constexpr std::array<int, 8> kOrder = {0, 1, 3, 2, 4, 5, 7, 6};

  out << "# vtk DataFile Version 3.0\nelastowave snapshot t=" << std::setprecision(17) << state.t
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 8 * ne << " double\n";
  for (std::size_t e = 0; e < ne; ++e) {
    for (int c : kOrder) {
      const Vec3 x = mesh.corner(static_cast<int>(e), c);
      out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
    }
  }
  out << "CELLS " << ne << ' ' << 9 * ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) {
    out << 8;
    for (std::size_t i = 0; i < 8; ++i) out << ' ' << 8 * e + i;
    out << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) out << "12\n";

  auto corner_node = [](const DofSpace& space, int se, int c) {
    const int n = space.degree[static_cast<std::size_t>(se)];
    const int np = n + 1;
    const int a = (c & 1) * n;
    const int b = ((c >> 1) & 1) * n;
    const int k = ((c >> 2) & 1) * n;
    return space.nodes_of(se)[static_cast<std::size_t>(a + np * (b + np * k))];
  };

  out << "POINT_DATA " << 8 * ne << "\nVECTORS displacement double\n";
  for (std::size_t e = 0; e < ne; ++e) {
    const int se = d.elastic->local_of[e];
    for (int c : kOrder) {
      if (se < 0) {
        out << "0 0 0\n";
        continue;
      }
      const auto node = static_cast<std::size_t>(corner_node(*d.elastic, se, c));
      out << state.u[3 * node] << ' ' << state.u[3 * node + 1] << ' ' << state.u[3 * node + 2] << '\n';
    }
  }
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (std::size_t e = 0; e < ne; ++e) {
    const int sa = d.acoustic->local_of[e];
    for (int c : kOrder) {
      if (sa < 0) {
        out << "0\n";
        continue;
      }
      out << state.phi[static_cast<std::size_t>(corner_node(*d.acoustic, sa, c))] << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return exit_codes::parse;
  if (dynamic_cast<const GeometryError*>(&e) || dynamic_cast<const ClassificationError*>(&e)) {
    return exit_codes::geometry;
  }
  if (dynamic_cast<const DivergenceError*>(&e)) return exit_codes::divergence;
  if (dynamic_cast<const IoError*>(&e)) return exit_codes::io;
  return exit_codes::other;
}

}  // namespace elastowave
