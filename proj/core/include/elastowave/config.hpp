#pragma once

#include "elastowave/analytic.hpp"
#include "elastowave/face_sets.hpp"
#include "elastowave/materials.hpp"
#include "elastowave/mesh.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace elastowave {

/// One macroregion. With the built-in layout the region is a box split into
/// `cells` (or cells of size about `h`), minus an optional `hole`; with a
/// mesh file only the material and degree are used.
struct RegionConfig {
  int id = 0;
  DomainKind kind = DomainKind::Elastic;
  std::optional<Box> box;
  std::optional<Box> hole;
  std::optional<double> h;
  std::optional<std::array<int, 3>> cells;
  std::optional<int> degree;
  ElasticMaterial elastic;
  AcousticMaterial acoustic;

  bool operator==(const RegionConfig&) const = default;
};

enum class ModelKind { None, Verification, Scholte };

struct ScenarioConfig {
  std::string name = "run";
  std::optional<std::string> mesh_file;
  ModelKind model = ModelKind::None;
  double omega = 1.0;  ///< Scholte frequency
  std::vector<RegionConfig> regions;

  int degree = 2;  ///< default N
  double penalty = 1.0;
  int mortar_order = 0;

  double final_time = 0.0;
  std::optional<double> dt;  ///< nullopt: estimated
  double safety = 0.5;

  BoundarySpec boundary;
  std::optional<RickerSource> source;
  std::vector<std::pair<std::string, Vec3>> receivers;

  std::string output_dir = "output";
  int snapshot_every = 0;  ///< 0 disables snapshots
  int receiver_every = 1;

  bool operator==(const ScenarioConfig&) const = default;

  const RegionConfig* region(int id) const;
  RegionConfig* region(int id);
};

/// Sections: [domain], [region.<id>], [discretization], [time], [boundary],
/// [source], [receivers], [output]. Lines are `key = value`; `#` and `;`
/// start comments. Throws ParseError with the line number for unknown
/// sections or keys, malformed values and missing mandatory keys, then
/// InvalidArgument from validate().
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Text that parses back to an equal config.
std::string serialize_config(const ScenarioConfig& config);

/// Throws InvalidArgument on inconsistent or non-physical values.
void validate(const ScenarioConfig& config);

std::vector<std::string> preset_names();
/// Throws InvalidArgument for unknown names. `full` selects the paper-scale
/// cavity parameters.
ScenarioConfig preset(std::string_view name, bool full = false);

std::string to_string(ModelKind kind);

}  // namespace elastowave
