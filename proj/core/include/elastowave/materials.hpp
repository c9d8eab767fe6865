#pragma once

#include "elastowave/mesh.hpp"

#include <map>

namespace elastowave {

struct WaveSpeeds {
  double p = 0.0;
  double s = 0.0;
};

/// Isotropic linear elastic solid, sigma = lambda tr(eps) I + 2 mu eps.
struct ElasticMaterial {
  double density = 1.0;
  double lambda = 1.0;
  double mu = 1.0;

  static ElasticMaterial from_velocities(double density, double cp, double cs);

  double p_modulus() const { return lambda + 2.0 * mu; }
  bool operator==(const ElasticMaterial&) const = default;
};

struct AcousticMaterial {
  double density = 1.0;
  double sound_speed = 1.0;

  bool operator==(const AcousticMaterial&) const = default;
};

/// c_P = sqrt((lambda + 2 mu) / rho), c_S = sqrt(mu / rho).
WaveSpeeds wave_speeds(const ElasticMaterial& m);

/// Throws InvalidArgument unless rho > 0, mu > 0, lambda + 2 mu > 0.
void validate(const ElasticMaterial& m);
void validate(const AcousticMaterial& m);

/// Materials keyed by region id.
struct MaterialTable {
  std::map<int, ElasticMaterial> elastic;
  std::map<int, AcousticMaterial> acoustic;

  /// Throws AssemblyError when a region of the mesh has no material.
  const ElasticMaterial& elastic_for(const HexMesh& mesh, int element) const;
  const AcousticMaterial& acoustic_for(const HexMesh& mesh, int element) const;

  bool operator==(const MaterialTable&) const = default;
};

}  // namespace elastowave
