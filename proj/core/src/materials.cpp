#include "elastowave/materials.hpp"

#include "elastowave/error.hpp"

#include <cmath>
#include <string>

namespace elastowave {

ElasticMaterial ElasticMaterial::from_velocities(double density, double cp, double cs) {
  ElasticMaterial m;
  m.density = density;
  m.mu = density * cs * cs;
  m.lambda = density * cp * cp - 2.0 * m.mu;
  validate(m);
  return m;
}

WaveSpeeds wave_speeds(const ElasticMaterial& m) {
  return {std::sqrt(m.p_modulus() / m.density), std::sqrt(m.mu / m.density)};
}

void validate(const ElasticMaterial& m) {
  if (!(m.density > 0.0)) throw InvalidArgument("elastic density must be positive");
  if (!(m.mu > 0.0)) throw InvalidArgument("shear modulus mu must be positive");
  if (!(m.p_modulus() > 0.0)) throw InvalidArgument("lambda + 2 mu must be positive");
}

void validate(const AcousticMaterial& m) {
  if (!(m.density > 0.0)) throw InvalidArgument("acoustic density must be positive");
  if (!(m.sound_speed > 0.0)) throw InvalidArgument("sound speed must be positive");
}

const ElasticMaterial& MaterialTable::elastic_for(const HexMesh& mesh, int element) const {
  const int id = mesh.region_of(element).id;
  auto it = elastic.find(id);
  if (it == elastic.end()) throw AssemblyError("no elastic material for region " + std::to_string(id));
  return it->second;
}

const AcousticMaterial& MaterialTable::acoustic_for(const HexMesh& mesh, int element) const {
  const int id = mesh.region_of(element).id;
  auto it = acoustic.find(id);
  if (it == acoustic.end()) throw AssemblyError("no acoustic material for region " + std::to_string(id));
  return it->second;
}

}  // namespace elastowave
