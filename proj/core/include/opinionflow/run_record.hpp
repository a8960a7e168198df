#pragma once

// Diagnostics of a finished run and the on-disk result format.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opinionflow/integrator.hpp"
#include "opinionflow/scenario.hpp"

namespace opinionflow {

struct DiagnosticsRow {
  double t = 0.0;
  std::string species;
  double m1 = 0.0;
  double var = 0.0;
  double tv = 0.0;
  /// NaN when the model has no stationary target.
  double w1_to_target = 0.0;
};

struct RunRecord {
  std::string scenario;
  /// SHA-1 of the serialized config, hashed as a git blob.
  std::string config_hash;
  std::string config_text;
  std::vector<std::string> species;
  OutputSelection outputs;
  std::vector<ParticleState> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  std::size_t steps = 0;
  std::size_t halvings = 0;
  std::size_t monitor_violations = 0;
};

/// Number of cells used to discretize a stationary target for W1 distances.
inline constexpr std::size_t kTargetCells = 4000;

/// Hex SHA-1 of "blob <size>\0<text>", the id git assigns to the same bytes.
std::string git_blob_hash(std::string_view text);

/// m1, variance, TV and W1-to-target for every species at every snapshot.
std::vector<DiagnosticsRow> compute_diagnostics(const ModelSpec& model, const std::vector<ParticleState>& snapshots,
                                                const StationaryProfile* target = nullptr);

/// Assembles the record: config echo and hash, snapshots, diagnostics.
RunRecord make_record(const Scenario& scenario, const Trajectory& traj, const MinMaxMonitor* monitor = nullptr);

/// Writes trajectories_<tag>.csv, density_<tag>_<k>.csv, diagnostics.csv and
/// run.json into dir (created if missing). Throws Error naming the path on
/// filesystem failures.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace opinionflow
