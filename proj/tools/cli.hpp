#pragma once

// Command implementations behind the opinionflow executable.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opinionflow/run_record.hpp"
#include "opinionflow/scenario.hpp"

namespace opinionflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolations = 2;

/// Parses argv and dispatches to a command. Returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Least-squares slope of -log|y| against t over the second half of the
/// series (points with y = 0 are skipped). NaN with fewer than two points.
double fit_decay_rate(std::span<const double> t, std::span<const double> y);

/// Fraction of consecutive pairs with d[k+1] <= d[k].
double monotone_fraction(std::span<const double> d);

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t n_next = 0;
  /// sup over common snapshot times of max over species of d_W1(u^n, u^n_next).
  double distance = 0.0;
  /// log2(previous distance / distance); NaN for the first row.
  double order = 0.0;
};

/// Runs the scenario at every N of `ns` (ascending, at most `threads` runs at
/// a time) and compares consecutive entries.
std::vector<ConvergenceRow> convergence_study(const Scenario& sc, const std::vector<std::size_t>& ns,
                                              unsigned threads);

struct StationaryComparison {
  std::vector<double> times;
  std::vector<double> w1_to_target;
  std::vector<double> m1;
  double final_w1 = 0.0;
  double monotone_fraction = 0.0;
  double fitted_m1_rate = 0.0;
  /// Analytic rate for alpha = 1 linear diffusion, NaN otherwise.
  double analytic_m1_rate = 0.0;
  /// Interior particle hull [W_1, W_{N-1}] of the final state.
  double support_lo = 0.0;
  double support_hi = 0.0;
  StationaryProfile target;
  std::size_t monitor_violations = 0;
};

/// Runs a single-species P = 1 scenario and measures the approach to its
/// stationary state. Throws std::invalid_argument for other scenarios.
StationaryComparison compare_stationary(const Scenario& sc, bool porous_target);

/// Renders density_<tag>.svg and trajectories_<tag>.svg for every species
/// found in run_dir, plus trajectories_all.svg. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir);

}  // namespace opinionflow::cli
