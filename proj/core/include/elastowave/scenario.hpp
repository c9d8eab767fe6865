#pragma once

#include "elastowave/config.hpp"
#include "elastowave/diagnostics.hpp"

#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace elastowave {

/// Box layout or mesh file of the config, with region degrees filled in.
HexMesh build_mesh(const ScenarioConfig& config);

Discretization discretize(const ScenarioConfig& config);

/// Null when the config names no model.
std::shared_ptr<const AnalyticModel> make_model(const ScenarioConfig& config);

struct RunOptions {
  std::optional<std::string> output_dir;  ///< overrides config.output_dir
  bool write_outputs = true;
  /// Text hashed into metadata.json; defaults to the serialized config.
  std::optional<std::string> config_text;
  /// Called after setup (step 0) and after every step.
  std::function<void(const Discretization&, const SimState&)> observer;
  /// Replaces the initial state (t = 0) built from the model.
  std::function<void(const Discretization&, SimState&)> initial_state;
};

struct RunResult {
  SimState state;
  double dt = 0.0;
  std::size_t steps = 0;
  StableStep estimate;  ///< zero when dt came from the config
  std::optional<NormBreakdown> error;
  std::optional<NormBreakdown> reference;  ///< norms of the analytic field at final time
  ReceiverSet receivers;
  std::vector<std::string> warnings;
  std::filesystem::path output_dir;
};

/// Sets up, integrates to final_time and writes receivers, snapshots,
/// errors.csv (with a model) and metadata.json. The step count is
/// ceil(T / dt) and dt is shrunk to land on T.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

enum class SweepKind { MeshSize, Degree };

/// Config with every region's h (or cells) scaled so that the smallest
/// elastic meshsize equals h; the ratio between regions is kept.
ScenarioConfig with_meshsize(const ScenarioConfig& config, double h);
/// Config with all regions at degree N.
ScenarioConfig with_degree(const ScenarioConfig& config, int degree);

/// One run per value, errors at final time, log-log fit against h or a
/// log-linear fit against N. Needs an analytic model and >= 3 values.
/// Writes convergence.csv when options.write_outputs.
ConvergenceSeries converge_sweep(const ScenarioConfig& config, SweepKind kind, std::span<const double> values,
                                 const RunOptions& options = {});

/// Header `param,energy_error,l2_error`.
void write_error_table(const std::filesystem::path& path, std::span<const double> params,
                       std::span<const double> energy_errors, std::span<const double> l2_errors);

/// Legacy ASCII VTK with the 8 corners of every element as separate points.
void write_snapshot(const Discretization& d, const SimState& state, const std::filesystem::path& path);

/// SHA-1 of "blob <size>\0<content>", lowercase hex.
std::string git_blob_sha1(std::string_view content);

namespace exit_codes {
inline constexpr int ok = 0;
inline constexpr int other = 1;
inline constexpr int parse = 2;
inline constexpr int geometry = 3;
inline constexpr int divergence = 4;
inline constexpr int io = 5;
}  // namespace exit_codes

int exit_code_for(const std::exception& e);

}  // namespace elastowave
