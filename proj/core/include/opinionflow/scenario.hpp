#pragma once

// Named experiment presets and the declarative configuration format.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opinionflow/integrator.hpp"
#include "opinionflow/model.hpp"
#include "opinionflow/stationary.hpp"
#include "opinionflow/validate.hpp"

namespace opinionflow {

struct OutputSelection {
  bool trajectories = true;
  bool densities = true;
  bool diagnostics = true;

  bool operator==(const OutputSelection&) const = default;
};

struct Scenario {
  std::string name;
  ModelSpec model;
  std::size_t N = 200;
  IntegratorConfig integrator;
  OutputSelection outputs;

  bool operator==(const Scenario&) const = default;
};

/// single-ini1, single-ini2, single-ini3, single-porous, fl-symmetric,
/// fl-asymmetric, flt-symmetric, flt-asymmetric.
const std::vector<std::string>& preset_names();

/// Throws std::invalid_argument for an unknown name.
Scenario preset(std::string_view name);

/// Parameters of the closed-form stationary target when the model is a
/// single non-troll species with P = 1 (m1_inf = 0); empty otherwise.
std::optional<StationaryParams> stationary_params(const ModelSpec& model);

/// Stationary target of a single-species model: stationary_porous for power
/// law diffusion, stationary_linear otherwise. Empty when no target exists.
std::optional<StationaryProfile> stationary_target(const ModelSpec& model);

/// Config text for a scenario; parse_config(serialize(s)) == s.
std::string serialize(const Scenario& s);

struct LoadedConfig {
  Scenario scenario;
  /// Warnings from parsing (e.g. defaulted kernels) followed by the
  /// validation findings.
  ValidationReport report;
};

/// Parses config text. Throws ConfigError with line and key on syntax
/// errors or unknown keys. Validation findings are returned, not thrown.
LoadedConfig parse_config(std::string_view text, std::string_view name = "config");

/// Reads and parses a file; the scenario name defaults to the file stem.
LoadedConfig load_config(const std::filesystem::path& path);

}  // namespace opinionflow
